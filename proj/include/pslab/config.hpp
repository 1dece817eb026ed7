#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pslab/grid.hpp"
#include "pslab/types.hpp"

namespace pslab {

/// Bad command line or config document. The message names the offending
/// field. Exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// --help was given; what() holds the help text. Exit code 0.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fully resolved, validated run configuration for the `pspec` CLI.
struct RunConfig {
    std::string command;  // scan, contours, symbol, quasimode, lab, fit
    std::string action;   // symbol: sigma|lambda|order|volume|kappa; lab: weyl|ssv; fit: boundary

    std::string model = "davies";
    double h = 0.05;
    Eigen::Index N = 0;
    std::optional<double> delta;  // nullopt: schedule default (N⁻⁴ for weyl, 1e-3 for ssv)

    ComplexGrid grid;
    Rect gamma{-0.5, 0.5, -0.5, 0.5};
    std::vector<double> levels{1e-1, 1e-2, 1e-3};
    Complex z{1.0, 1.0};
    double t = 1e-3;
    std::vector<double> hlist{0.02, 0.01, 0.005, 0.0025};
    std::vector<double> tlist{1e-5, 1e-4, 1e-3, 1e-2};
    std::vector<double> tgrid;
    double energy = 16.0;
    int resolution = 401;
    int cap = 3;
    std::string sign = "plus";
    std::string kind = "gaussian";
    std::string law = "pm1";
    bool force = false;
    Eigen::Index modes = 0;
    double radius = 0.0;
    std::uint64_t seed = 7;
    int draws = 20;

    std::string out;
    std::string svg;
    std::string field;
    std::string eig_csv;
    int workers = 1;
    bool print_config = false;
};

/// Parses argv (without the program name). Precedence: built-in defaults,
/// then the JSON document given by --config, then explicit flags. Unknown
/// flags or config keys, out-of-range values and even N for the circle model
/// throw UsageError.
RunConfig parse_config(const std::vector<std::string>& args);

/// Resolved configuration as JSON (what --print-config echoes).
nlohmann::json to_json(const RunConfig& config);

/// FNV-1a hash (hex) of the resolved configuration, worker count excluded.
std::string fingerprint(const RunConfig& config);

/// `key=value` lines identifying the run, embedded in every output file.
std::string provenance(const RunConfig& config);

Complex parse_complex(const std::string& text);

}  // namespace pslab
