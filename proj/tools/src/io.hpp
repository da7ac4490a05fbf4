#pragma once

// CSV and JSON file formats used by the command-line tool.

#include "ridgekit/active_subspace.hpp"
#include "ridgekit/polyridge.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ridgekit::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kIoError = 2,
  kParseError = 3,
  kMissingInput = 4,
  kDimensionMismatch = 5,
  kUnsupported = 6,
};

class CliError : public std::runtime_error {
 public:
  CliError(ExitCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

struct Table {
  std::vector<std::string> header;
  Matrix values;

  /// Index of a named column, or -1.
  Eigen::Index column(const std::string& name) const;
  /// Columns prefix1..prefixK in order; every such column must be present
  /// without gaps. Throws a parse error if there are none.
  Matrix numbered(const std::string& prefix) const;
};

/// Reads a CSV with a mandatory header row. Blank lines are skipped.
Table read_csv(const std::string& path);

/// 17 significant digits, so values survive a round trip.
std::string format_double(double v);

void write_text(const std::string& path, const std::string& contents);
std::string csv_text(const std::vector<std::string>& header, const Matrix& values);
std::vector<std::string> numbered_header(const std::string& prefix, Eigen::Index count);

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& doc);

inline constexpr const char* kModelVersion = "ridgekit-model-v1";

Json model_to_json(const RidgeModel& model, double residual_final);
RidgeModel model_from_json(const Json& doc);

struct SpectrumFile {
  Spectrum spectrum;
  std::optional<std::size_t> suggested_n;
};

Json spectrum_to_json(const Spectrum& spectrum, std::optional<std::size_t> suggested_n,
                                const BootstrapSummary* bootstrap);
SpectrumFile spectrum_from_json(const Json& doc);

}  // namespace ridgekit::cli
