#ifndef PATHOGEN_EXPERIMENTS_HPP
#define PATHOGEN_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathogen/nonspatial.hpp"
#include "pathogen/outcome.hpp"
#include "pathogen/params.hpp"
#include "pathogen/stats.hpp"

namespace pathogen {

/// Monte Carlo survival estimate over independent seeded trials. Survivors
/// are SurvivedProxy verdicts by population cap or time horizon; event-cap
/// verdicts are tallied separately and taint the estimate when they exceed
/// one per thousand trials.
struct SurvivalEstimate {
  SimParams params;
  std::uint64_t trials = 0;
  std::uint64_t survivors = 0;
  std::uint64_t event_cap_hits = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double confidence = 0.99;
  std::uint64_t master_seed = 0;
  double wall_time_s = 0.0;  // measured; excluded from determinism comparisons

  bool anomalous() const {
    return static_cast<double>(event_cap_hits) >
           0.001 * static_cast<double>(trials);
  }
  /// Field-for-field equality over everything reproducible (wall time is
  /// measurement, not result).
  bool same_result(const SurvivalEstimate& other) const;
};

/// Trials run with independent per-trial streams derive_trial_rng(seed, i);
/// the result is identical for every parallelism degree (0 = hardware).
SurvivalEstimate estimate_survival(const SimParams& params, std::uint64_t trials,
                                   std::uint64_t master_seed, unsigned parallelism,
                                   double confidence = 0.99);

/// All trial outcomes, indexed by trial, with the given recording options.
std::vector<Outcome> run_batch(const SimParams& params, std::uint64_t trials,
                               std::uint64_t master_seed, unsigned parallelism,
                               const RecordOptions& rec);

/// Mutant-offspring histogram pooled over the completed types of many runs.
/// completed_types_out receives the pool size when non-null.
std::map<std::uint64_t, std::uint64_t> pooled_offspring_histogram(
    const SimParams& params, std::uint64_t trials, std::uint64_t master_seed,
    unsigned parallelism, std::uint64_t* completed_types_out = nullptr);

/// Independent single-type clan lifetimes (Models 2 and 3).
std::vector<TypeLifetime> batch_type_lifetimes(ModelId model, double lambda,
                                               double r, std::uint64_t count,
                                               std::uint64_t master_seed,
                                               unsigned parallelism);

struct SweepCell {
  double lambda = 0.0;
  double r = 0.0;
  std::uint64_t cell_seed = 0;
  SurvivalEstimate estimate;
  std::string anomaly;  // empty when clean
};

/// Cartesian sweep, row-major with lambda outer and r inner. Each cell runs
/// under its own derived seed, so any cell is individually reproducible;
/// cell failures are recorded and the sweep continues.
struct SweepResult {
  std::vector<SweepCell> cells;
};
SweepResult sweep(const SimParams& base, std::span<const double> lambdas,
                  std::span<const double> rs, std::uint64_t trials,
                  std::uint64_t master_seed, unsigned parallelism,
                  double confidence = 0.99);

struct BracketInvalidError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UndecidableProbeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BisectAxis { Lambda, R };

struct BisectionProbe {
  double value = 0.0;
  SurvivalEstimate estimate;
  bool supercritical = false;
  bool escalated = false;  // true for the 4x re-run of an indecisive probe
};

struct BisectionResult {
  BisectAxis axis = BisectAxis::Lambda;
  double lo = 0.0;
  double hi = 0.0;
  double decision_threshold = 0.005;
  std::uint64_t trials_per_probe = 0;
  std::vector<BisectionProbe> probes;
};

/// Interval bisection on the Monte Carlo survival decision. A probe is
/// supercritical when survivors >= max(3, threshold * trials); a probe whose
/// Wilson interval straddles the threshold is re-run once with 4x trials and
/// throws UndecidableProbeError if still straddling. The endpoints must
/// classify subcritical (lo) and supercritical (hi) or
/// BracketInvalidError is thrown.
BisectionResult bisect_critical(const SimParams& params_template, BisectAxis axis,
                                double lo, double hi, double resolution,
                                std::uint64_t trials_per_probe,
                                std::uint64_t master_seed, unsigned parallelism,
                                double confidence = 0.99,
                                double decision_threshold = 0.005);

/// Deterministic bisection core. classify(x) -> true when supercritical.
/// Pre: classify(lo) == false, classify(hi) == true (caller-checked).
template <typename Classify>
std::pair<double, double> bisect_interval(double lo, double hi, double resolution,
                                          Classify&& classify) {
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (!(lo < hi)) throw std::invalid_argument("bracket endpoints out of order");
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (classify(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

/// Linear-growth diagnostic over surviving runs with series: the empirical
/// distribution of N(t_probe)/t_probe and the fraction at or above the
/// threshold (default min(1, λ/6)/2). N(t_probe) is read from the last
/// series sample at or before t_probe.
struct GrowthDiagnostic {
  std::uint64_t surviving_runs = 0;
  std::uint64_t meeting_threshold = 0;
  double threshold = 0.0;
  std::vector<double> ratios;

  double fraction_meeting() const {
    return surviving_runs == 0
               ? 0.0
               : static_cast<double>(meeting_threshold) /
                     static_cast<double>(surviving_runs);
  }
};
GrowthDiagnostic linear_growth_diagnostic(std::span<const Outcome> outcomes,
                                          double lambda, double t_probe,
                                          std::optional<double> threshold = {});

}  // namespace pathogen

#endif  // PATHOGEN_EXPERIMENTS_HPP
