#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dsq/sweep_fit.hpp"

namespace dsq {

/// Shortest decimal representation that round-trips to the same double
/// (std::to_chars); nan/inf render as "nan"/"inf".
std::string format_double(double value);

/// Provenance block written next to (or into) every output: command name,
/// fully resolved parameters, tool version, quadrature convention, timestamp.
struct RunManifest {
  std::string command;
  nlohmann::json parameters;
  std::string timestamp;  // ISO-8601 UTC, excluded from reproducibility checks

  nlohmann::json to_json() const;

  static RunManifest make(const std::string& command, nlohmann::json parameters);
};

/// RFC-4180-style CSV: comma separator, header row, LF line endings, floats
/// in shortest round-trip form. Text cells are quoted when needed.
std::string render_csv(const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows,
                       const std::vector<std::string>* row_errors = nullptr);

/// {"manifest": ..., "rows": [...]} with one object per row.
nlohmann::json table_json(const RunManifest& manifest,
                          const std::vector<std::string>& columns,
                          const std::vector<std::vector<double>>& rows,
                          const std::vector<std::string>* row_errors = nullptr);

/// Writes `text` to `path`, or to stdout when path is empty.
void write_text_output(const std::string& path, const std::string& text);

/// Writes the CSV to `path` and the manifest to `<path>.manifest.json`.
/// With an empty path the CSV goes to stdout and the manifest is skipped.
void write_csv_with_manifest(const std::string& path, const RunManifest& manifest,
                             const std::vector<std::string>& columns,
                             const std::vector<std::vector<double>>& rows,
                             const std::vector<std::string>* row_errors = nullptr);

/// Reads a two-column (N, value) CSV for the fit command. Requires a header;
/// extra columns are ignored.
std::vector<std::pair<double, double>> read_fit_points(const std::string& path);

/// Parses a SweepSpec from the JSON config document at `path`. Field errors
/// name the offending field.
SweepSpec read_sweep_config(const std::string& path);

}  // namespace dsq
