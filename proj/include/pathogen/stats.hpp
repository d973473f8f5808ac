#ifndef PATHOGEN_STATS_HPP
#define PATHOGEN_STATS_HPP

#include <cstdint>

namespace pathogen {

/// Standard normal quantile function (Wichura's AS 241, double precision).
/// Pre: 0 < p < 1.
double inverse_normal_cdf(double p);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval for a binomial proportion at the given two-sided
/// confidence level (e.g. 0.99). Well behaved at 0 and n successes.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                               double confidence);

}  // namespace pathogen

#endif  // PATHOGEN_STATS_HPP
