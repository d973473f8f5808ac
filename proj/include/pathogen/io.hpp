#ifndef PATHOGEN_IO_HPP
#define PATHOGEN_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathogen/experiments.hpp"
#include "pathogen/outcome.hpp"
#include "pathogen/params.hpp"

namespace pathogen::io {

using json = nlohmann::ordered_json;

/// Frozen CSV header for estimate/sweep/bisect rows.
inline constexpr const char* kEstimateCsvHeader =
    "model,dim,lambda,r,trials,survivors,estimate,ci_low,ci_high,seed,"
    "wall_time_s,anomaly";

/// 9 significant digits, '.' decimal separator, locale-free.
std::string format_g9(double value);

/// JSON value for a double; infinities become the string "inf".
json json_number(double value);

struct EstimateRow {
  std::string model;
  std::optional<int> dim;
  double lambda = 0.0;
  double r = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t survivors = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::string anomaly;
};

EstimateRow make_row(const SurvivalEstimate& est, const std::string& anomaly,
                     bool with_timing);

std::string to_csv(const std::vector<EstimateRow>& rows);
/// Probe rows plus the two-line bracket trailer.
std::string bisect_to_csv(const std::vector<EstimateRow>& rows, double bracket_lo,
                          double bracket_hi);

json row_to_json(const EstimateRow& row);
json outcome_to_json(const Outcome& outcome);

/// Serialize with a trailing newline (byte-stable across runs).
std::string dump(const json& value);

/// Write via temp file + rename in the target directory.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace pathogen::io

#endif  // PATHOGEN_IO_HPP
