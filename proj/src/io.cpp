#include "dsq/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "dsq/version.hpp"

namespace dsq {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("failed to format a double");
  return std::string(buf, ptr);
}

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"command", command},
                        {"parameters", parameters},
                        {"version", kVersion},
                        {"quadrature_convention", kQuadratureConvention},
                        {"timestamp", timestamp}};
}

RunManifest RunManifest::make(const std::string& command, nlohmann::json parameters) {
  RunManifest m;
  m.command = command;
  m.parameters = std::move(parameters);
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  m.timestamp = buf;
  return m;
}

namespace {

std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string render_csv(const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows,
                       const std::vector<std::string>* row_errors) {
  const bool with_errors = row_errors != nullptr;
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += csv_quote(columns[c]);
  }
  if (with_errors) out += ",error";
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    if (with_errors) {
      out += ',';
      out += csv_quote((*row_errors)[r]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json table_json(const RunManifest& manifest,
                          const std::vector<std::string>& columns,
                          const std::vector<std::vector<double>>& rows,
                          const std::vector<std::string>* row_errors) {
  nlohmann::json out;
  out["manifest"] = manifest.to_json();
  out["columns"] = columns;
  nlohmann::json jrows = nlohmann::json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    nlohmann::json jrow;
    for (std::size_t c = 0; c < rows[r].size(); ++c) jrow[columns[c]] = rows[r][c];
    if (row_errors && !(*row_errors)[r].empty()) jrow["error"] = (*row_errors)[r];
    jrows.push_back(std::move(jrow));
  }
  out["rows"] = std::move(jrows);
  return out;
}

void write_text_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
}

void write_csv_with_manifest(const std::string& path, const RunManifest& manifest,
                             const std::vector<std::string>& columns,
                             const std::vector<std::vector<double>>& rows,
                             const std::vector<std::string>* row_errors) {
  write_text_output(path, render_csv(columns, rows, row_errors));
  if (!path.empty()) {
    write_text_output(path + ".manifest.json", manifest.to_json().dump(2) + "\n");
  }
}

std::vector<std::pair<double, double>> read_fit_points(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open fit input: " + path);
  std::vector<std::pair<double, double>> points;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw std::invalid_argument("fit input line " + std::to_string(line_no) +
                                  ": expected at least two comma-separated columns");
    }
    if (!header_seen) {
      header_seen = true;
      // First line must be the header row (column names, not numbers).
      char* end = nullptr;
      std::strtod(a.c_str(), &end);
      if (end != a.c_str() && *end == '\0') {
        throw std::invalid_argument("fit input: missing header row (N,value)");
      }
      continue;
    }
    try {
      points.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      throw std::invalid_argument("fit input line " + std::to_string(line_no) +
                                  ": cannot parse numbers '" + a + "', '" + b + "'");
    }
  }
  if (points.size() < 4) {
    throw std::invalid_argument(
        "fit input needs at least 4 data rows (one per N); the power-law fit requires >= 4 "
        "distinct N values, got " +
        std::to_string(points.size()));
  }
  return points;
}

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& why) {
  throw std::invalid_argument("sweep config field '" + field + "': " + why);
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& field, const T& fallback,
            bool required = false) {
  if (!j.contains(field)) {
    if (required) config_error(field, "missing");
    return fallback;
  }
  try {
    return j.at(field).get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_error(field, e.what());
  }
}

}  // namespace

SweepSpec read_sweep_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open sweep config: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("sweep config is not valid JSON: ") + e.what());
  }

  SweepSpec spec;
  spec.model = sweep_model_from_name(get_field<std::string>(j, "model", "", true));
  if (!j.contains("axes") || !j["axes"].is_array()) config_error("axes", "must be an array");
  for (const auto& ja : j["axes"]) {
    AxisSpec axis;
    axis.name = get_field<std::string>(ja, "name", "", true);
    axis.start = get_field<double>(ja, "start", 0.0, true);
    axis.stop = get_field<double>(ja, "stop", 0.0, true);
    axis.count = get_field<int>(ja, "count", 0, true);
    axis.spacing = axis_spacing_from_name(get_field<std::string>(ja, "spacing", "linear"));
    spec.axes.push_back(std::move(axis));
  }
  spec.observables = get_field<std::vector<std::string>>(j, "observables", {}, true);
  spec.omega = get_field<double>(j, "omega", spec.omega);
  spec.Omega = get_field<double>(j, "Omega", spec.Omega);
  spec.ratio = get_field<double>(j, "ratio", spec.ratio);
  spec.n_spins = get_field<int>(j, "n_spins", spec.n_spins);
  if (j.contains("cutoff") && !j["cutoff"].is_null()) {
    if (j["cutoff"].is_string()) {
      if (j["cutoff"].get<std::string>() != "auto") {
        config_error("cutoff", "expected an integer or \"auto\"");
      }
    } else {
      spec.cutoff = get_field<int>(j, "cutoff", 0, true);
    }
  }
  if (j.contains("solve")) {
    const auto& js = j["solve"];
    spec.solve.eig_tol = get_field<double>(js, "eig_tol", spec.solve.eig_tol);
    spec.solve.max_lanczos_iters =
        get_field<int>(js, "max_lanczos_iters", spec.solve.max_lanczos_iters);
    spec.solve.dense_threshold =
        get_field<int>(js, "dense_threshold", spec.solve.dense_threshold);
    spec.solve.seed = get_field<std::uint64_t>(js, "seed", spec.solve.seed);
  }
  spec.validate();
  return spec;
}

}  // namespace dsq
