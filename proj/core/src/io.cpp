#include "rabispec/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "json.hpp"
#include "rabispec/errors.hpp"

namespace rabispec::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::string(buf);
}

ordered_json finite_or_null(double x) {
  if (std::isfinite(x)) {
    return ordered_json(x);
  }
  return ordered_json(nullptr);
}

ordered_json optional_json(const std::optional<double>& value) {
  if (value) {
    return ordered_json(*value);
  }
  return ordered_json(nullptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t pos = 0; pos <= line.size(); ++pos) {
    if (pos == line.size() || line[pos] == ',') {
      out.push_back(trim(line.substr(start, pos - start)));
      start = pos + 1;
    }
  }
  return out;
}

[[noreturn]] void fail_line(int line_no, const std::string& message) {
  throw ParseError("observations: line " + std::to_string(line_no) + ": " +
                   message);
}

double parse_double(std::string_view field, int line_no, const char* what) {
  double value = 0.0;
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    fail_line(line_no, std::string("bad ") + what + " value '" +
                           std::string(field) + "'");
  }
  return value;
}

int parse_int(std::string_view field, int line_no, const char* what) {
  int value = 0;
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), last, value);
  if (ec != std::errc() || ptr != last) {
    fail_line(line_no, std::string("bad ") + what + " value '" +
                           std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string shape_name(Shape shape) {
  switch (shape) {
    case Shape::peak:
      return "peak";
    case Shape::dip:
      return "dip";
    case Shape::flat:
      return "flat";
  }
  throw std::invalid_argument("shape_name: unknown shape");
}

std::string location_name(FeatureLocation location) {
  switch (location) {
    case FeatureLocation::at_zero:
      return "zero";
    case FeatureLocation::at_pm_omega:
      return "pm_omega";
  }
  throw std::invalid_argument("location_name: unknown location");
}

std::string levels_csv(const LevelTable& table) {
  const std::size_t rows = table.epsilon.size();
  if (table.energies.size() != rows || table.frequencies.size() != rows) {
    throw std::invalid_argument("levels_csv: row counts disagree");
  }
  const std::size_t n_levels = rows == 0 ? 0 : table.energies.front().size();

  std::ostringstream out;
  out << "epsilon";
  for (std::size_t k = 0; k < n_levels; ++k) {
    out << ",E_" << k;
  }
  for (const auto& [i, j] : table.transitions) {
    out << ",omega_" << i << "_" << j;
  }
  out << "\n";

  for (std::size_t r = 0; r < rows; ++r) {
    if (table.energies[r].size() != n_levels ||
        table.frequencies[r].size() != table.transitions.size()) {
      throw std::invalid_argument("levels_csv: ragged row");
    }
    out << fmt9(table.epsilon[r]);
    for (double e : table.energies[r]) {
      out << "," << fmt9(e);
    }
    for (double f : table.frequencies[r]) {
      out << "," << fmt9(f);
    }
    out << "\n";
  }
  return out.str();
}

std::string spectrum_csv(const SpectrumGrid& grid) {
  std::ostringstream out;
  out << "epsilon,omega_p,transmission\n";
  for (std::size_t ie = 0; ie < grid.epsilon_axis.size(); ++ie) {
    for (std::size_t ip = 0; ip < grid.probe_axis.size(); ++ip) {
      out << fmt9(grid.epsilon_axis[ie]) << "," << fmt9(grid.probe_axis[ip])
          << "," << fmt9(grid.at(ie, ip)) << "\n";
    }
  }
  return out.str();
}

std::string spectrum_json(const SpectrumGrid& grid) {
  ordered_json j;
  j["model"] = ordered_json{{"delta", grid.template_params.delta},
                            {"omega", grid.template_params.omega},
                            {"g", grid.template_params.g}};
  j["probe"] = ordered_json{{"amplitude_ap", grid.probe.amplitude_ap},
                            {"gamma", grid.probe.gamma},
                            {"r0", grid.probe.r0}};
  j["thermal"] = ordered_json{{"kt", grid.thermal.kt},
                              {"max_levels", grid.thermal.max_levels},
                              {"population_floor", grid.thermal.population_floor}};
  j["epsilon_axis"] = grid.epsilon_axis;
  j["probe_axis"] = grid.probe_axis;
  j["values"] = grid.values;
  j["clamp_events"] = grid.clamp_events;
  return j.dump() + "\n";
}

std::string heatmap_ppm(const SpectrumGrid& grid) {
  const std::size_t width = grid.epsilon_axis.size();
  const std::size_t height = grid.probe_axis.size();
  if (width == 0 || height == 0 || grid.values.size() != width * height) {
    throw std::invalid_argument("heatmap_ppm: empty or inconsistent grid");
  }
  std::string out = "P6\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n255\n";
  out.reserve(out.size() + 3 * width * height);
  for (std::size_t row = 0; row < height; ++row) {
    const std::size_t ip = height - 1 - row;
    for (std::size_t ie = 0; ie < width; ++ie) {
      const double t = std::clamp(grid.at(ie, ip), 0.0, 1.0);
      const char gray = static_cast<char>(
          static_cast<unsigned char>(std::lround(255.0 * t)));
      out.push_back(gray);
      out.push_back(gray);
      out.push_back(gray);
    }
  }
  return out;
}

std::string boundary_set_json(const BoundarySet& bounds) {
  ordered_json j;
  j["delta_ratio"] = bounds.delta_ratio;
  j["b1"] = optional_json(bounds.b1);
  j["b2"] = bounds.b2;
  j["b3"] = bounds.b3;
  j["b4"] = optional_json(bounds.b4);
  j["method"] = bounds.method == BoundarySet::Method::analytic_limit
                    ? "analytic_limit"
                    : "numeric_root";
  return j.dump(2) + "\n";
}

std::string regime_report_json(const RegimeReport& report) {
  ordered_json j;
  j["interval_index"] = report.interval_index;
  j["bounds"] = ordered_json::array(
      {finite_or_null(report.bounds.first), finite_or_null(report.bounds.second)});
  ordered_json features = ordered_json::array();
  for (const LineShapeFeature& f : report.features) {
    features.push_back(ordered_json{
        {"transition",
         ordered_json::array({f.transition.first, f.transition.second})},
        {"location", location_name(f.location)},
        {"shape", shape_name(f.shape)},
        {"allowed", f.allowed}});
  }
  j["features"] = std::move(features);
  if (report.near_boundary) {
    j["near_boundary"] =
        ordered_json{{"boundary_index", report.near_boundary->boundary_index},
                     {"boundary", report.near_boundary->boundary},
                     {"distance", report.near_boundary->distance}};
  } else {
    j["near_boundary"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string pattern_json(const HigherLevelPattern& pattern) {
  ordered_json j;
  j["allowed_24_35_at0"] = pattern.allowed_24_35_at0;
  j["shape_24_at0"] = shape_name(pattern.shape_24_at0);
  j["shape_24_at_eps_omega"] = shape_name(pattern.shape_24_at_eps_omega);
  j["shape_35_at_eps_omega"] = shape_name(pattern.shape_35_at_eps_omega);
  return j.dump(2) + "\n";
}

std::string fit_result_json(const FitResult& result) {
  ordered_json j;
  j["delta"] = result.params.delta;
  j["omega"] = result.params.omega;
  j["g"] = result.params.g;
  j["residual_rms"] = result.residual_rms;
  j["per_observation_residuals"] = result.per_observation_residuals;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  return j.dump(2) + "\n";
}

std::string manifest_json(const RunManifest& manifest) {
  ordered_json j;
  j["command"] = manifest.command;
  ordered_json params = ordered_json::object();
  for (const auto& [key, value] : manifest.parameters) {
    params[key] = value;
  }
  j["parameters"] = std::move(params);
  j["version"] = manifest.version;
  j["duration_seconds"] = manifest.duration_seconds;
  return j.dump(2) + "\n";
}

std::vector<ResonanceObservation> read_observations_csv(std::istream& in) {
  std::vector<ResonanceObservation> out;
  std::string line;
  int line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') {
      continue;
    }
    const std::vector<std::string_view> fields = split_fields(stripped);
    if (!seen_header && out.empty() && fields.front() == "bias") {
      seen_header = true;
      continue;
    }
    if (fields.size() != 5 && fields.size() != 6) {
      fail_line(line_no, "expected 5 or 6 comma-separated fields, got " +
                             std::to_string(fields.size()));
    }

    ResonanceObservation obs;
    obs.bias = parse_double(fields[0], line_no, "bias");
    if (fields[1] == "epsilon") {
      obs.kind = BiasKind::epsilon;
    } else if (fields[1] == "nphi") {
      obs.kind = BiasKind::nphi;
    } else {
      fail_line(line_no, "bias_kind must be 'epsilon' or 'nphi', got '" +
                             std::string(fields[1]) + "'");
    }
    obs.transition.first = parse_int(fields[2], line_no, "level index i");
    obs.transition.second = parse_int(fields[3], line_no, "level index j");
    obs.frequency = parse_double(fields[4], line_no, "frequency");
    if (fields.size() == 6 && !fields[5].empty()) {
      obs.weight = parse_double(fields[5], line_no, "weight");
    }
    try {
      obs.validate();
    } catch (const std::invalid_argument& e) {
      fail_line(line_no, e.what());
    }
    out.push_back(obs);
  }
  if (out.empty()) {
    throw ParseError("observations: no data rows");
  }
  return out;
}

std::vector<ResonanceObservation> read_observations_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("observations: cannot open '" + path + "'");
  }
  return read_observations_csv(in);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing '" + path + "'");
  }
}

}  // namespace rabispec::io
