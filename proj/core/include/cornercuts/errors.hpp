#ifndef CORNERCUTS_ERRORS_HPP
#define CORNERCUTS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cornercuts {

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

#define CORNERCUTS_DECLARE_ERROR(Name)                                        \
    class Name : public Error {                                               \
      public:                                                                 \
        explicit Name(const std::string &what) : Error(#Name ": " + what) {}  \
    }

// LP layer
CORNERCUTS_DECLARE_ERROR(DimensionMismatchError);
CORNERCUTS_DECLARE_ERROR(NumericalFailureError);
CORNERCUTS_DECLARE_ERROR(EmptyProblemError);

// Corner / polar layer
CORNERCUTS_DECLARE_ERROR(InfeasibleBasisError);
CORNERCUTS_DECLARE_ERROR(UnboundedObjectiveError);
CORNERCUTS_DECLARE_ERROR(InfeasibleSetError);
CORNERCUTS_DECLARE_ERROR(CallbackFailureError);
CORNERCUTS_DECLARE_ERROR(UnboundedSupportError);
CORNERCUTS_DECLARE_ERROR(StructureUnsupportedError);
CORNERCUTS_DECLARE_ERROR(CutRepetitionError);

// Network layer
CORNERCUTS_DECLARE_ERROR(ArcInTreeError);
CORNERCUTS_DECLARE_ERROR(UnreachableNodeError);

// VRPSD layer
CORNERCUTS_DECLARE_ERROR(DomainError);
CORNERCUTS_DECLARE_ERROR(NotAQRouteError);
CORNERCUTS_DECLARE_ERROR(TooManyCustomersError);
CORNERCUTS_DECLARE_ERROR(SIntractableError);
CORNERCUTS_DECLARE_ERROR(TooLargeError);
CORNERCUTS_DECLARE_ERROR(InfeasibleInstanceError);
CORNERCUTS_DECLARE_ERROR(ParseError);

#undef CORNERCUTS_DECLARE_ERROR

} // namespace cornercuts

#endif
