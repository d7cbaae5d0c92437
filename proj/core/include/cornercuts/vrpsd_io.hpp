#ifndef CORNERCUTS_VRPSD_IO_HPP
#define CORNERCUTS_VRPSD_IO_HPP

#include <iosfwd>
#include <string>

#include "cornercuts/vrpsd.hpp"

namespace cornercuts {

// Line-oriented interchange format:
//   vrpsd 1
//   n <customers> k <vehicles> C <capacity>
//   qbar <n integers>
//   var <n rationals>
//   <|V| lower-triangular cost rows, depot row first>
// Unknown keys are a hard error.
VrpsdInstance readInstance(std::istream &in);
VrpsdInstance readInstanceFile(const std::string &path);

void writeInstance(const VrpsdInstance &instance, std::ostream &out);
void writeInstanceFile(const VrpsdInstance &instance, const std::string &path);

} // namespace cornercuts

#endif
