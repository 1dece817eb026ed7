#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pslab/pseudospectrum.hpp"
#include "pslab/quasimode.hpp"
#include "pslab/random_lab.hpp"

namespace pslab {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// `# key=value` provenance lines, then the header `re,im,sigma_min` and one
/// row per node in flat-index order. Values use 17 significant digits so a
/// re-read is bit-exact.
std::string field_csv(const SigmaMinField& field, const std::string& provenance = "");
SigmaMinField parse_field_csv(const std::string& text);

/// `re,im,draw` rows for every eigenvalue of every draw.
std::string eigenvalues_csv(const WeylExperimentReport& report, const std::string& provenance = "");

/// One <path> per polyline, carrying its level in a data-level attribute,
/// over labelled axes spanning the grid.
std::string contours_svg(const ContourSet& set, const ComplexGrid& frame,
                         const std::string& provenance = "");

/// Two panels: eigenvalue scatter with the Γ box, and the mean integrated
/// density against the Weyl curve.
std::string weyl_svg(const WeylExperimentReport& report, const std::string& provenance = "");

nlohmann::json to_json(const WeylExperimentReport& report);
nlohmann::json to_json(const SSVTailReport& report);
nlohmann::json to_json(const QuasimodeReport& report);
nlohmann::json to_json(const ResolventGrowth& report);

std::string format_double(double v);

}  // namespace pslab
