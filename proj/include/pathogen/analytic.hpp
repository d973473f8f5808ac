#ifndef PATHOGEN_ANALYTIC_HPP
#define PATHOGEN_ANALYTIC_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace pathogen {

/// Offspring law of a branching process on {0, 1, 2, ...}. Either a finite
/// vector or a lazily evaluated mass function whose support is extended on
/// demand until the residual tail mass drops below a requested bound.
class OffspringPmf {
 public:
  static OffspringPmf finite(std::vector<double> probabilities);
  static OffspringPmf from_function(std::function<double(std::size_t)> mass_fn);
  /// Mutant-offspring law of a Model 3 type: (r λ)^k / (1 + r λ)^{k+1}.
  static OffspringPmf model3(double lambda, double r);

  double mass(std::size_t k) const;
  bool lazily_extended() const { return static_cast<bool>(fn_); }

  /// Truncated support whose residual mass is below eps. Throws
  /// std::runtime_error when that cannot be achieved (mass deficit for a
  /// finite pmf, or support cap reached for a lazy one).
  const std::vector<double>& truncated(double eps) const;

  /// Mean of the truncated law (lower bound on the true mean).
  double truncated_mean(double eps) const;

 private:
  OffspringPmf() = default;
  void extend_to(std::size_t k) const;

  static constexpr std::size_t kMaxSupport = 1u << 22;
  mutable std::vector<double> probs_;
  mutable double cumulative_ = 0.0;
  std::function<double(std::size_t)> fn_;  // empty for finite laws
};

/// Survival classification of a model at given parameters. The probability
/// is Known when a closed form exists, UnknownPositive when survival is
/// proven without a formula, Zero when extinction is almost sure.
struct PhaseVerdict {
  enum class Probability { Known, UnknownPositive, Zero };
  bool survives = false;
  Probability kind = Probability::Zero;
  double value = 0.0;  // meaningful when kind == Known

  friend bool operator==(const PhaseVerdict&, const PhaseVerdict&) = default;
};

/// P(a Model 3 type leaves exactly k mutant-founded child types).
double model3_offspring_pmf(std::int64_t k, double lambda, double r);

/// Model 3 survives iff r λ > 1; survival probability 1 - 1/(r λ) above the
/// boundary, 0 at and below it.
PhaseVerdict model3_phase(double lambda, double r);

/// Mean number of child types founded by a Model 2 type:
/// r λ / (1 - λ(1-r)) when λ(1-r) < 1, +infinity otherwise (exact IEEE
/// infinity, compared exactly; never a large finite float). r = 0 yields 0.
double model2_mean_offspring(double lambda, double r);

/// Model 2 survives iff λ > 1 (no closed-form probability).
PhaseVerdict model2_phase(double lambda, double r);

/// P(a p-up/(1-p)-down birth-death chain started at its reflecting level
/// never returns below it): (2p - 1)/p for p > 1/2, else 0.
double bd_chain_survival(double p);

/// Minimal fixed point of the offspring pgf in [0, 1] (the extinction
/// probability). Subcritical and critical laws (truncated mean <= 1 with
/// p_1 < 1) return exactly 1; supercritical laws iterate s <- f(s) from 0
/// until successive iterates differ by less than tol. The result q satisfies
/// |f(q) - q| < 10 tol.
double gw_extinction(const OffspringPmf& pmf, double tol = 1e-12);

}  // namespace pathogen

#endif  // PATHOGEN_ANALYTIC_HPP
