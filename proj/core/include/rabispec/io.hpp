#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rabispec/analytic.hpp"
#include "rabispec/fit.hpp"
#include "rabispec/regimes.hpp"
#include "rabispec/response.hpp"

namespace rabispec::io {

/// Provenance record written next to every output artifact.
struct RunManifest {
  std::string command;
  /// Resolved flag values in presentation order.
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string version;
  double duration_seconds = 0.0;
};

/// Energy sweep with optional transition-frequency columns.
struct LevelTable {
  std::vector<double> epsilon;
  std::vector<std::vector<double>> energies;  ///< one row per epsilon value
  std::vector<std::pair<int, int>> transitions;
  std::vector<std::vector<double>> frequencies;  ///< one row per epsilon value
};

[[nodiscard]] std::string shape_name(Shape shape);
[[nodiscard]] std::string location_name(FeatureLocation location);

/// CSV with header epsilon,E_0,...,E_{N-1} and one omega_i_j column per
/// requested transition; values carry 9 significant digits.
[[nodiscard]] std::string levels_csv(const LevelTable& table);

/// CSV with header epsilon,omega_p,transmission in epsilon-major order,
/// 9 significant digits.
[[nodiscard]] std::string spectrum_csv(const SpectrumGrid& grid);

/// JSON with axes, the flat epsilon-major value array, and the full model,
/// probe, and thermal metadata.
[[nodiscard]] std::string spectrum_json(const SpectrumGrid& grid);

/// Binary 8-bit P6 pixmap, one pixel per lattice point, epsilon along x,
/// omega_p increasing upward, gray level round(255 T).
[[nodiscard]] std::string heatmap_ppm(const SpectrumGrid& grid);

[[nodiscard]] std::string boundary_set_json(const BoundarySet& bounds);
[[nodiscard]] std::string regime_report_json(const RegimeReport& report);
[[nodiscard]] std::string pattern_json(const HigherLevelPattern& pattern);
[[nodiscard]] std::string fit_result_json(const FitResult& result);
[[nodiscard]] std::string manifest_json(const RunManifest& manifest);

/// Parses observation rows "bias,bias_kind,i,j,frequency,weight" with
/// bias_kind in {epsilon, nphi}; the weight field may be omitted. A header
/// row, blank lines, and # comments are skipped. Throws ParseError with the
/// offending line number.
[[nodiscard]] std::vector<ResonanceObservation> read_observations_csv(
    std::istream& in);
[[nodiscard]] std::vector<ResonanceObservation> read_observations_file(
    const std::string& path);

/// Writes contents byte for byte; throws std::runtime_error on failure.
void write_file(const std::string& path, const std::string& contents);

}  // namespace rabispec::io
