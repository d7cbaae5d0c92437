#include "cornercuts/vrpsd_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace cornercuts {

namespace {

// Shortest decimal that round-trips the double.
std::string compactNumber(double value) {
    char buffer[64];
    const auto result =
        std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string nextLine(std::istream &in, const char *what) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) {
            return line;
        }
    }
    throw ParseError(std::string("unexpected end of file, expected ") + what);
}

} // namespace

VrpsdInstance readInstance(std::istream &in) {
    {
        std::istringstream header(nextLine(in, "header"));
        std::string magic;
        int version = 0;
        if (!(header >> magic >> version) || magic != "vrpsd" || version != 1) {
            throw ParseError("expected header 'vrpsd 1'");
        }
        std::string extra;
        if (header >> extra) {
            throw ParseError("trailing tokens on header line");
        }
    }

    int n = 0;
    int k = 0;
    long long capacity = 0;
    {
        std::istringstream line(nextLine(in, "dimensions"));
        std::string keyN, keyK, keyC;
        if (!(line >> keyN >> n >> keyK >> k >> keyC >> capacity) ||
            keyN != "n" || keyK != "k" || keyC != "C") {
            throw ParseError("expected 'n <int> k <int> C <int>'");
        }
    }
    if (n < 1) {
        throw ParseError("n must be at least 1");
    }

    std::vector<long long> qbar(n);
    {
        std::istringstream line(nextLine(in, "qbar"));
        std::string key;
        line >> key;
        if (key != "qbar") {
            throw ParseError("expected 'qbar' line");
        }
        for (int v = 0; v < n; ++v) {
            if (!(line >> qbar[v])) {
                throw ParseError("qbar needs n integers");
            }
        }
    }
    std::vector<double> variance(n);
    {
        std::istringstream line(nextLine(in, "var"));
        std::string key;
        line >> key;
        if (key != "var") {
            throw ParseError("expected 'var' line");
        }
        for (int v = 0; v < n; ++v) {
            if (!(line >> variance[v])) {
                throw ParseError("var needs n values");
            }
        }
    }

    MatrixXd costs = MatrixXd::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        std::istringstream line(nextLine(in, "cost row"));
        for (int j = 0; j <= i; ++j) {
            double value = 0;
            if (!(line >> value)) {
                throw ParseError("cost row " + std::to_string(i) +
                                 " is too short");
            }
            costs(i, j) = value;
            costs(j, i) = value;
        }
        std::string extra;
        if (line >> extra) {
            throw ParseError("cost row " + std::to_string(i) +
                             " has trailing tokens");
        }
    }

    return VrpsdInstance(n, k, capacity, std::move(costs), std::move(qbar),
                         std::move(variance));
}

VrpsdInstance readInstanceFile(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open instance file: " + path);
    }
    return readInstance(in);
}

void writeInstance(const VrpsdInstance &instance, std::ostream &out) {
    const int n = instance.numCustomers();
    out << "vrpsd 1\n";
    out << "n " << n << " k " << instance.vehicles() << " C "
        << instance.capacity() << "\n";
    out << "qbar";
    for (int v = 1; v <= n; ++v) {
        out << ' ' << instance.meanDemand(v);
    }
    out << "\nvar";
    for (int v = 1; v <= n; ++v) {
        out << ' ' << compactNumber(instance.variance(v));
    }
    out << "\n";
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= i; ++j) {
            if (j > 0) {
                out << ' ';
            }
            out << compactNumber(instance.cost(i, j));
        }
        out << "\n";
    }
}

void writeInstanceFile(const VrpsdInstance &instance,
                       const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open output file: " + path);
    }
    writeInstance(instance, out);
}

} // namespace cornercuts
