#include "pathogen/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace pathogen {

namespace {

void check_lambda_r(double lambda, double r) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be positive and finite");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("r must lie in [0, 1]");
}

double check_mass(double p, std::size_t k) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("pmf mass at k=" + std::to_string(k) +
                                " outside [0, 1]");
  return p;
}

}  // namespace

OffspringPmf OffspringPmf::finite(std::vector<double> probabilities) {
  OffspringPmf pmf;
  pmf.probs_ = std::move(probabilities);
  for (std::size_t k = 0; k < pmf.probs_.size(); ++k)
    pmf.cumulative_ += check_mass(pmf.probs_[k], k);
  if (pmf.cumulative_ > 1.0 + 1e-12)
    throw std::invalid_argument("pmf masses sum above 1");
  return pmf;
}

OffspringPmf OffspringPmf::from_function(std::function<double(std::size_t)> mass_fn) {
  OffspringPmf pmf;
  pmf.fn_ = std::move(mass_fn);
  return pmf;
}

OffspringPmf OffspringPmf::model3(double lambda, double r) {
  check_lambda_r(lambda, r);
  return from_function([lambda, r](std::size_t k) {
    return model3_offspring_pmf(static_cast<std::int64_t>(k), lambda, r);
  });
}

void OffspringPmf::extend_to(std::size_t k) const {
  while (probs_.size() <= k) {
    const std::size_t next = probs_.size();
    const double p = check_mass(fn_(next), next);
    probs_.push_back(p);
    cumulative_ += p;
  }
}

double OffspringPmf::mass(std::size_t k) const {
  if (fn_) extend_to(k);
  return k < probs_.size() ? probs_[k] : 0.0;
}

const std::vector<double>& OffspringPmf::truncated(double eps) const {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!fn_) {
    if (1.0 - cumulative_ > eps)
      throw std::runtime_error("finite pmf truncation mass error exceeds tolerance");
    return probs_;
  }
  while (1.0 - cumulative_ >= eps) {
    if (probs_.size() >= kMaxSupport)
      throw std::runtime_error("pmf tail mass not below tolerance within support cap");
    extend_to(probs_.size());
  }
  return probs_;
}

double OffspringPmf::truncated_mean(double eps) const {
  const auto& p = truncated(eps);
  double mean = 0.0;
  for (std::size_t k = p.size(); k-- > 1;) mean += static_cast<double>(k) * p[k];
  return mean;
}

double model3_offspring_pmf(std::int64_t k, double lambda, double r) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  check_lambda_r(lambda, r);
  const double m = r * lambda;
  if (m == 0.0) return k == 0 ? 1.0 : 0.0;
  // (m / (1+m))^k / (1+m), evaluated in log space for large k.
  return std::exp(static_cast<double>(k) * (std::log(m) - std::log1p(m)) - std::log1p(m));
}

PhaseVerdict model3_phase(double lambda, double r) {
  check_lambda_r(lambda, r);
  const double m = r * lambda;  // offspring mean of the type tree
  PhaseVerdict verdict;
  verdict.kind = PhaseVerdict::Probability::Known;
  verdict.survives = m > 1.0;
  verdict.value = verdict.survives ? 1.0 - 1.0 / m : 0.0;
  return verdict;
}

double model2_mean_offspring(double lambda, double r) {
  check_lambda_r(lambda, r);
  if (r == 0.0) return 0.0;  // no mutant offspring at all
  const double growth = lambda * (1.0 - r);  // within-type Yule rate
  if (growth >= 1.0) return std::numeric_limits<double>::infinity();
  return r * lambda / (1.0 - growth);
}

PhaseVerdict model2_phase(double lambda, double r) {
  check_lambda_r(lambda, r);
  if (r == 0.0) throw std::invalid_argument("model2_phase requires r > 0");
  PhaseVerdict verdict;
  verdict.survives = lambda > 1.0;
  verdict.kind = verdict.survives ? PhaseVerdict::Probability::UnknownPositive
                                  : PhaseVerdict::Probability::Zero;
  return verdict;
}

double bd_chain_survival(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (p <= 0.5) return 0.0;
  return (2.0 * p - 1.0) / p;
}

double gw_extinction(const OffspringPmf& pmf, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  // Extend support until the tail cannot move the answer, then decide
  // criticality from the truncated mean. The mean <= 1 case returns the exact
  // fixed point 1 (fixed-point iteration converges only harmonically there,
  // too slow to reach fine tolerances near criticality).
  const std::vector<double>& p = pmf.truncated(tol / 10.0);
  double mean = 0.0;
  for (std::size_t k = p.size(); k-- > 1;) mean += static_cast<double>(k) * p[k];
  const double p1 = p.size() > 1 ? p[1] : 0.0;
  if (mean <= 1.0 && p1 < 1.0) return 1.0;

  const auto pgf = [&p](double s) {
    double acc = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) acc = acc * s + p[k];
    return acc;
  };
  double s = 0.0;
  for (std::uint64_t it = 0; it < 1'000'000; ++it) {
    const double next = pgf(s);
    if (std::abs(next - s) < tol) return next < 1.0 ? next : 1.0;
    s = next;
  }
  throw std::runtime_error("gw_extinction: fixed-point iteration did not converge");
}

}  // namespace pathogen
