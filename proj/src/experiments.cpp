#include "pathogen/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "pathogen/spatial.hpp"

namespace pathogen {

namespace {

unsigned effective_parallelism(unsigned requested, std::uint64_t trials) {
  unsigned p = requested == 0 ? std::thread::hardware_concurrency() : requested;
  if (p == 0) p = 1;
  return static_cast<unsigned>(
      std::min<std::uint64_t>(p, std::max<std::uint64_t>(trials, 1)));
}

/// Static contiguous partition of [0, trials) across workers. fn is called
/// as fn(chunk_id, begin, end); chunk results must be merged by chunk id so
/// scheduling never affects the outcome.
template <typename Fn>
void parallel_chunks(std::uint64_t trials, unsigned parallelism, Fn&& fn) {
  const unsigned workers = effective_parallelism(parallelism, trials);
  if (workers <= 1) {
    fn(0u, std::uint64_t{0}, trials);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::uint64_t per = trials / workers;
  const std::uint64_t extra = trials % workers;
  std::uint64_t begin = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t len = per + (w < extra ? 1 : 0);
    const std::uint64_t end = begin + len;
    threads.emplace_back([&fn, &errors, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    begin = end;
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

Outcome run_one(const SimParams& params, Rng& rng, const RecordOptions& rec) {
  return params.spatial() ? sp_run(params, rng, rec) : ns_run(params, rng, rec);
}

}  // namespace

bool SurvivalEstimate::same_result(const SurvivalEstimate& other) const {
  return params == other.params && trials == other.trials &&
         survivors == other.survivors && event_cap_hits == other.event_cap_hits &&
         estimate == other.estimate && ci_low == other.ci_low &&
         ci_high == other.ci_high && confidence == other.confidence &&
         master_seed == other.master_seed;
}

SurvivalEstimate estimate_survival(const SimParams& params, std::uint64_t trials,
                                   std::uint64_t master_seed, unsigned parallelism,
                                   double confidence) {
  params.validate();
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const auto start = std::chrono::steady_clock::now();

  struct Tally {
    std::uint64_t survivors = 0;
    std::uint64_t event_caps = 0;
  };
  std::vector<Tally> tallies(effective_parallelism(parallelism, trials));
  parallel_chunks(trials, parallelism,
                  [&](unsigned chunk, std::uint64_t begin, std::uint64_t end) {
                    Tally local;
                    for (std::uint64_t i = begin; i < end; ++i) {
                      Rng rng = derive_trial_rng(master_seed, i);
                      const Outcome out = run_one(params, rng, RecordOptions{});
                      if (out.verdict.survived_proxy()) {
                        if (out.verdict.reason == ProxyReason::EventCap)
                          ++local.event_caps;
                        else
                          ++local.survivors;
                      }
                    }
                    tallies[chunk] = local;
                  });

  SurvivalEstimate est;
  est.params = params;
  est.trials = trials;
  est.master_seed = master_seed;
  est.confidence = confidence;
  for (const Tally& t : tallies) {
    est.survivors += t.survivors;
    est.event_cap_hits += t.event_caps;
  }
  est.estimate = static_cast<double>(est.survivors) / static_cast<double>(trials);
  const WilsonInterval ci = wilson_interval(est.survivors, trials, confidence);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  est.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

std::vector<Outcome> run_batch(const SimParams& params, std::uint64_t trials,
                               std::uint64_t master_seed, unsigned parallelism,
                               const RecordOptions& rec) {
  params.validate();
  std::vector<Outcome> outcomes(trials);
  parallel_chunks(trials, parallelism,
                  [&](unsigned, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t i = begin; i < end; ++i) {
                      Rng rng = derive_trial_rng(master_seed, i);
                      outcomes[i] = run_one(params, rng, rec);
                    }
                  });
  return outcomes;
}

std::map<std::uint64_t, std::uint64_t> pooled_offspring_histogram(
    const SimParams& params, std::uint64_t trials, std::uint64_t master_seed,
    unsigned parallelism, std::uint64_t* completed_types_out) {
  params.validate();
  RecordOptions rec;
  rec.genealogy = true;
  using Histogram = std::map<std::uint64_t, std::uint64_t>;
  std::vector<Histogram> partials(effective_parallelism(parallelism, trials));
  parallel_chunks(trials, parallelism,
                  [&](unsigned chunk, std::uint64_t begin, std::uint64_t end) {
                    Histogram local;
                    for (std::uint64_t i = begin; i < end; ++i) {
                      Rng rng = derive_trial_rng(master_seed, i);
                      const Outcome out = run_one(params, rng, rec);
                      for (const TypeRecord& type : out.genealogy->types)
                        if (type.completed()) local[type.mutant_offspring] += 1;
                    }
                    partials[chunk] = std::move(local);
                  });
  Histogram pooled;
  std::uint64_t total = 0;
  for (const Histogram& partial : partials) {
    for (const auto& [offspring, count] : partial) {
      pooled[offspring] += count;
      total += count;
    }
  }
  if (completed_types_out != nullptr) *completed_types_out = total;
  return pooled;
}

std::vector<TypeLifetime> batch_type_lifetimes(ModelId model, double lambda,
                                               double r, std::uint64_t count,
                                               std::uint64_t master_seed,
                                               unsigned parallelism) {
  std::vector<TypeLifetime> lifetimes(count);
  parallel_chunks(count, parallelism,
                  [&](unsigned, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t i = begin; i < end; ++i) {
                      Rng rng = derive_trial_rng(master_seed, i);
                      lifetimes[i] = simulate_type_lifetime(model, lambda, r, rng);
                    }
                  });
  return lifetimes;
}

SweepResult sweep(const SimParams& base, std::span<const double> lambdas,
                  std::span<const double> rs, std::uint64_t trials,
                  std::uint64_t master_seed, unsigned parallelism,
                  double confidence) {
  if (lambdas.empty() || rs.empty())
    throw std::invalid_argument("sweep grids must be nonempty");
  SweepResult result;
  std::uint64_t cell_index = 0;
  for (const double lambda : lambdas) {
    for (const double r : rs) {
      SweepCell cell;
      cell.lambda = lambda;
      cell.r = r;
      cell.cell_seed = derive_cell_seed(master_seed, cell_index);
      SimParams params = base;
      params.lambda = lambda;
      params.r = r;
      try {
        cell.estimate = estimate_survival(params, trials, cell.cell_seed,
                                          parallelism, confidence);
        if (cell.estimate.event_cap_hits > 0) {
          std::ostringstream note;
          note << "event_cap=" << cell.estimate.event_cap_hits;
          cell.anomaly = note.str();
        }
      } catch (const std::exception& e) {
        cell.anomaly = std::string("error: ") + e.what();
        cell.estimate = SurvivalEstimate{};
        cell.estimate.params = params;
        cell.estimate.trials = trials;
        cell.estimate.master_seed = cell.cell_seed;
        cell.estimate.confidence = confidence;
      }
      result.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  return result;
}

namespace {

struct ProbeClassifier {
  const SimParams& params_template;
  BisectAxis axis;
  std::uint64_t trials;
  std::uint64_t master_seed;
  unsigned parallelism;
  double confidence;
  double threshold;
  std::uint64_t probe_counter = 0;
  std::vector<BisectionProbe>* probes;

  static std::uint64_t cutoff(double threshold, std::uint64_t trials) {
    const auto scaled = static_cast<std::uint64_t>(
        std::ceil(threshold * static_cast<double>(trials)));
    return std::max<std::uint64_t>(3, scaled);
  }

  SurvivalEstimate run_probe(double value, std::uint64_t probe_trials) {
    SimParams params = params_template;
    (axis == BisectAxis::Lambda ? params.lambda : params.r) = value;
    const std::uint64_t seed = derive_cell_seed(master_seed, probe_counter++);
    return estimate_survival(params, probe_trials, seed, parallelism, confidence);
  }

  /// true = supercritical. Indecisive probes (Wilson interval straddling the
  /// threshold) escalate once to 4x trials.
  bool operator()(double value) {
    SurvivalEstimate est = run_probe(value, trials);
    bool super = est.survivors >= cutoff(threshold, est.trials);
    bool decisive = super ? est.ci_low > threshold : est.ci_high < threshold;
    probes->push_back({value, est, super, false});
    if (decisive) return super;

    est = run_probe(value, 4 * trials);
    super = est.survivors >= cutoff(threshold, est.trials);
    decisive = super ? est.ci_low > threshold : est.ci_high < threshold;
    probes->push_back({value, est, super, true});
    if (!decisive) {
      std::ostringstream msg;
      msg << "undecidable probe at " << value << ": estimate " << est.estimate
          << " with CI [" << est.ci_low << ", " << est.ci_high
          << "] straddles the decision threshold " << threshold;
      throw UndecidableProbeError(msg.str());
    }
    return super;
  }
};

}  // namespace

BisectionResult bisect_critical(const SimParams& params_template, BisectAxis axis,
                                double lo, double hi, double resolution,
                                std::uint64_t trials_per_probe,
                                std::uint64_t master_seed, unsigned parallelism,
                                double confidence, double decision_threshold) {
  if (!(lo < hi)) throw std::invalid_argument("bracket endpoints out of order");
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (trials_per_probe == 0) throw std::invalid_argument("trials must be positive");

  BisectionResult result;
  result.axis = axis;
  result.decision_threshold = decision_threshold;
  result.trials_per_probe = trials_per_probe;

  ProbeClassifier classify{params_template, axis,        trials_per_probe,
                           master_seed,     parallelism, confidence,
                           decision_threshold, 0,        &result.probes};
  if (classify(lo)) {
    std::ostringstream msg;
    msg << "bracket invalid: lower endpoint " << lo << " classifies supercritical";
    throw BracketInvalidError(msg.str());
  }
  if (!classify(hi)) {
    std::ostringstream msg;
    msg << "bracket invalid: upper endpoint " << hi << " classifies subcritical";
    throw BracketInvalidError(msg.str());
  }
  const auto [final_lo, final_hi] = bisect_interval(lo, hi, resolution, classify);
  result.lo = final_lo;
  result.hi = final_hi;
  return result;
}

GrowthDiagnostic linear_growth_diagnostic(std::span<const Outcome> outcomes,
                                          double lambda, double t_probe,
                                          std::optional<double> threshold) {
  if (!(t_probe > 0.0)) throw std::invalid_argument("t_probe must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  GrowthDiagnostic diag;
  const double gamma = std::min(1.0, lambda / 6.0);
  diag.threshold = threshold.value_or(gamma / 2.0);
  for (const Outcome& out : outcomes) {
    if (!out.verdict.survived_proxy() ||
        out.verdict.reason == ProxyReason::EventCap || out.series.empty())
      continue;
    // Last sample at or before the probe time; the state is right-continuous
    // and piecewise constant, so this is N(t_probe) whenever the series
    // covers the probe (runs capped earlier report their final size).
    const auto after = std::upper_bound(
        out.series.begin(), out.series.end(), t_probe,
        [](double t, const SeriesPoint& p) { return t < p.t; });
    if (after == out.series.begin()) continue;
    const SeriesPoint& at_probe = *std::prev(after);
    const double ratio = static_cast<double>(at_probe.population) / t_probe;
    diag.ratios.push_back(ratio);
    ++diag.surviving_runs;
    if (ratio >= diag.threshold) ++diag.meeting_threshold;
  }
  return diag;
}

}  // namespace pathogen
