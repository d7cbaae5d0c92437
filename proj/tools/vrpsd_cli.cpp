// Command-line front end: solve instances, generate random instances, and
// build cumulative-distribution reports from summary files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cornercuts/oracle.hpp"
#include "cornercuts/vrpsd.hpp"
#include "cornercuts/vrpsd_io.hpp"

namespace fs = std::filesystem;
using namespace cornercuts;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTimeLimit = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitUsage = 64;
constexpr int kExitNoData = 66;
constexpr int kExitInternal = 70;

std::string instanceStem(const std::string &path) {
    return fs::path(path).stem().string();
}

// ---------------------------------------------------------------------- solve

struct SolveArgs {
    std::string instancePath;
    std::string mode = "corner";
    bool rootOnly = false;
    double timeLimit = 3600;
    std::string outDir = ".";
};

int runSolve(const SolveArgs &args) {
    VrpsdInstance instance = readInstanceFile(args.instancePath);
    const SolveMode mode = parseMode(args.mode);
    SolveOptions options;
    options.timeLimitSec = args.timeLimit;

    RootReport root;
    std::optional<IntegerResult> integer;
    bool infeasible = false;
    try {
        if (args.rootOnly) {
            root = cuttingPlaneLoop(instance, mode, options);
        } else {
            integer = solveInteger(instance, mode, options);
            root = integer->root;
        }
    } catch (const InfeasibleInstanceError &) {
        infeasible = true;
    }

    const std::string stem = instanceStem(args.instancePath);
    fs::create_directories(args.outDir);
    const std::string base =
        (fs::path(args.outDir) / (stem + "_" + args.mode)).string();

    {
        std::ofstream csv(base + "_convergence.csv");
        csv << "iter,time_s,bound,cut_type,cuts_total\n";
        for (const IterationLogEntry &entry : root.trace) {
            csv << entry.iteration << ',' << entry.timeSec << ','
                << std::setprecision(12) << entry.bound << ','
                << entry.cutType << ',' << entry.cutsTotal << '\n';
        }
    }

    std::string status = "optimal";
    if (infeasible) {
        status = "infeasible";
    } else if ((integer && integer->hitTimeLimit) || root.hitTimeLimit) {
        status = "time-limit";
    } else if (args.rootOnly) {
        status = "root-only";
    }

    std::ostringstream summary;
    summary << args.instancePath << ',' << args.mode << ','
            << std::setprecision(12);
    if (infeasible) {
        summary << ",,0,," << status;
    } else {
        summary << root.bound << ',' << root.timeSec << ','
                << (integer ? integer->nodes : 0) << ',';
        if (integer && std::isfinite(integer->value)) {
            summary << integer->value;
        }
        summary << ',' << status;
    }

    {
        std::ofstream out(base + "_summary.csv");
        out << "instance,mode,root_bound,root_time_s,bb_nodes,opt_value,"
               "status\n";
        out << summary.str() << '\n';
    }
    std::cout << summary.str() << '\n';

    if (infeasible) {
        return kExitInfeasible;
    }
    if (status == "time-limit") {
        return kExitTimeLimit;
    }
    return kExitOk;
}

// ------------------------------------------------------------------------ gen

// splitmix64; the stepping is part of the file-format determinism contract.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // Exact uniform integer in [lo, hi] via rejection.
    long long uniform(long long lo, long long hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo + 1);
        const std::uint64_t limit = range * (UINT64_MAX / range);
        std::uint64_t draw = next();
        while (draw >= limit) {
            draw = next();
        }
        return lo + static_cast<long long>(draw % range);
    }
};

struct GenArgs {
    int n = 0;
    int k = 0;
    double capacityRatio = 1.0;
    std::uint64_t seed = 0;
    std::string outPath;
};

int runGen(const GenArgs &args) {
    if (args.n < 1 || args.k < 1 || args.k > args.n ||
        args.capacityRatio <= 0) {
        std::cerr << "gen: need n >= 1, 1 <= k <= n, capacity-ratio > 0\n";
        return kExitUsage;
    }
    Rng rng(args.seed);
    const long long capacity =
        std::max<long long>(2, std::llround(10.0 * args.capacityRatio));

    // Distinct points on the 1000 x 1000 grid; depot first.
    std::vector<std::pair<long long, long long>> points;
    while (static_cast<int>(points.size()) < args.n + 1) {
        const long long x = rng.uniform(0, 999);
        const long long y = rng.uniform(0, 999);
        if (std::find(points.begin(), points.end(), std::make_pair(x, y)) ==
            points.end()) {
            points.emplace_back(x, y);
        }
    }
    MatrixXd costs = MatrixXd::Zero(args.n + 1, args.n + 1);
    for (int i = 0; i <= args.n; ++i) {
        for (int j = 0; j < i; ++j) {
            const double dx = static_cast<double>(points[i].first -
                                                  points[j].first);
            const double dy = static_cast<double>(points[i].second -
                                                  points[j].second);
            const double dist = std::sqrt(dx * dx + dy * dy);
            costs(i, j) = costs(j, i) = std::round(10.0 * dist) / 10.0;
        }
    }
    std::vector<long long> qbar(args.n);
    std::vector<double> variance(args.n);
    const long long maxDemand = std::max<long long>(1, capacity / 2);
    for (int v = 0; v < args.n; ++v) {
        qbar[v] = rng.uniform(1, maxDemand);
        variance[v] = static_cast<double>(qbar[v]);
    }

    VrpsdInstance instance(args.n, args.k, capacity, std::move(costs),
                           std::move(qbar), std::move(variance));
    if (args.outPath.empty()) {
        writeInstance(instance, std::cout);
    } else {
        writeInstanceFile(instance, args.outPath);
    }
    return kExitOk;
}

// --------------------------------------------------------------------- report

struct SummaryRow {
    std::string instance;
    std::string mode;
    double rootBound = 0;
    double rootTime = 0;
    long long nodes = 0;
    std::optional<double> optValue;
    std::string status;
};

bool wildcardMatch(const std::string &pattern, const std::string &text) {
    // Iterative '*'/'?' matcher.
    size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() &&
            (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') {
        ++p;
    }
    return p == pattern.size();
}

std::vector<SummaryRow> readSummaries(const std::string &glob) {
    const fs::path pattern(glob);
    const fs::path dir =
        pattern.parent_path().empty() ? "." : pattern.parent_path();
    const std::string namePattern = pattern.filename().string();

    std::vector<fs::path> files;
    if (fs::is_directory(dir)) {
        for (const auto &entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() &&
                wildcardMatch(namePattern, entry.path().filename().string())) {
                files.push_back(entry.path());
            }
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<SummaryRow> rows;
    for (const fs::path &file : files) {
        std::ifstream in(file);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) {
                fields.push_back(field);
            }
            fields.resize(7);
            SummaryRow row;
            row.instance = fields[0];
            row.mode = fields[1];
            row.rootBound = fields[2].empty() ? 0 : std::stod(fields[2]);
            row.rootTime = fields[3].empty() ? 0 : std::stod(fields[3]);
            row.nodes = fields[4].empty() ? 0 : std::stoll(fields[4]);
            if (!fields[5].empty()) {
                row.optValue = std::stod(fields[5]);
            }
            row.status = fields[6];
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

struct ReportArgs {
    std::string glob;
    std::string metric = "gap";
    std::string optimaPath;
    std::string outPath;
    std::string svgPath;
};

double optimumFor(const SummaryRow &row,
                  const std::map<std::string, double> &optima) {
    if (row.optValue && row.status == "optimal") {
        return *row.optValue;
    }
    auto it = optima.find(row.instance);
    if (it == optima.end()) {
        it = optima.find(instanceStem(row.instance));
    }
    if (it != optima.end()) {
        return it->second;
    }
    // Last resort at desk scale: brute force the instance file.
    VrpsdInstance instance = readInstanceFile(row.instance);
    return oracle::bruteForceOptimum(instance).value;
}

void writeSvg(const std::string &path,
              const std::map<std::string, std::vector<double>> &curves,
              const std::string &metric) {
    const int width = 640;
    const int height = 420;
    const int margin = 50;
    double maxX = 1e-9;
    for (const auto &[mode, values] : curves) {
        for (double v : values) {
            maxX = std::max(maxX, v);
        }
    }
    const char *palette[] = {"#1b77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ofstream svg(path);
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
        << "' height='" << height << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << margin << "' y1='" << height - margin << "' x2='"
        << width - margin << "' y2='" << height - margin
        << "' stroke='black'/>\n";
    svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin
        << "' y2='" << height - margin << "' stroke='black'/>\n";
    svg << "<text x='" << width / 2 << "' y='" << height - 12
        << "' font-size='13'>" << metric << "</text>\n";
    int colorIndex = 0;
    int legendY = margin;
    for (const auto &[mode, values] : curves) {
        const std::string color = palette[colorIndex % 4];
        std::ostringstream pts;
        const size_t total = values.size();
        for (size_t i = 0; i < total; ++i) {
            const double x =
                margin + (width - 2 * margin) * (values[i] / maxX);
            const double frac = static_cast<double>(i + 1) /
                                static_cast<double>(total);
            const double yPix = height - margin -
                                (height - 2 * margin) * frac;
            pts << x << ',' << yPix << ' ';
        }
        svg << "<polyline fill='none' stroke='" << color
            << "' stroke-width='1.5' points='" << pts.str() << "'/>\n";
        svg << "<text x='" << width - margin + 4 << "' y='" << legendY
            << "' font-size='12' fill='" << color << "'>" << mode
            << "</text>\n";
        legendY += 16;
        ++colorIndex;
    }
    svg << "</svg>\n";
}

int runReport(const ReportArgs &args) {
    const std::vector<SummaryRow> rows = readSummaries(args.glob);
    if (rows.empty()) {
        std::cerr << "report: no summary rows match " << args.glob << "\n";
        return kExitNoData;
    }
    std::map<std::string, double> optima;
    if (!args.optimaPath.empty()) {
        std::ifstream in(args.optimaPath);
        std::string name;
        double value;
        while (in >> name >> value) {
            optima[name] = value;
        }
    }

    std::map<std::string, std::vector<double>> curves;
    for (const SummaryRow &row : rows) {
        double value = 0;
        if (args.metric == "gap") {
            const double opt = optimumFor(row, optima);
            value = 100.0 * (opt - row.rootBound) / opt;
        } else if (args.metric == "time") {
            value = row.rootTime;
        } else if (args.metric == "nodes") {
            value = static_cast<double>(row.nodes);
        } else {
            std::cerr << "report: unknown metric " << args.metric << "\n";
            return kExitUsage;
        }
        curves[row.mode].push_back(value);
    }
    for (auto &[mode, values] : curves) {
        std::sort(values.begin(), values.end());
    }

    std::ostringstream csv;
    csv << "mode," << args.metric << ",fraction\n";
    for (const auto &[mode, values] : curves) {
        const size_t total = values.size();
        for (size_t i = 0; i < total; ++i) {
            csv << mode << ',' << values[i] << ','
                << static_cast<double>(i + 1) / static_cast<double>(total)
                << '\n';
        }
    }
    if (args.outPath.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(args.outPath);
        out << csv.str();
    }
    if (!args.svgPath.empty()) {
        writeSvg(args.svgPath, curves, args.metric);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Corner Benders' cuts toolkit for the VRPSD"};
    app.require_subcommand(1);

    SolveArgs solveArgs;
    CLI::App *solve = app.add_subcommand("solve", "solve one instance");
    solve->add_option("--instance", solveArgs.instancePath, "instance file")
        ->required();
    solve->add_option("--mode", solveArgs.mode,
                      "parada | benders | lagrange | corner");
    solve->add_flag("--root-only", solveArgs.rootOnly,
                    "stop after the root cutting-plane loop");
    solve->add_option("--time-limit", solveArgs.timeLimit,
                      "cooperative limit in seconds");
    solve->add_option("--out-dir", solveArgs.outDir,
                      "directory for CSV artifacts");

    GenArgs genArgs;
    CLI::App *gen = app.add_subcommand("gen", "generate a random instance");
    gen->add_option("--n", genArgs.n, "number of customers")->required();
    gen->add_option("--k", genArgs.k, "number of vehicles")->required();
    gen->add_option("--capacity-ratio", genArgs.capacityRatio,
                    "capacity = round(10 * ratio)");
    gen->add_option("--seed", genArgs.seed, "RNG seed");
    gen->add_option("--out", genArgs.outPath, "output file (default stdout)");

    ReportArgs reportArgs;
    CLI::App *report =
        app.add_subcommand("report", "cumulative-distribution profiles");
    report->add_option("--glob", reportArgs.glob, "summary file pattern")
        ->required();
    report->add_option("--metric", reportArgs.metric, "gap | time | nodes");
    report->add_option("--optima", reportArgs.optimaPath,
                       "file of '<instance> <optimum>' lines");
    report->add_option("--out", reportArgs.outPath, "CSV output path");
    report->add_option("--svg", reportArgs.svgPath, "optional SVG chart");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (solve->parsed()) {
            return runSolve(solveArgs);
        }
        if (gen->parsed()) {
            return runGen(genArgs);
        }
        if (report->parsed()) {
            return runReport(reportArgs);
        }
    } catch (const ParseError &e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const InfeasibleInstanceError &e) {
        std::cerr << e.what() << "\n";
        return kExitInfeasible;
    } catch (const Error &e) {
        std::cerr << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
