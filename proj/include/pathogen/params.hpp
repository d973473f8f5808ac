#ifndef PATHOGEN_PARAMS_HPP
#define PATHOGEN_PARAMS_HPP

#include <cstdint>
#include <optional>
#include <string>

namespace pathogen {

/// The six models: M1-M3 are non-spatial branching dynamics, S1-S3 their
/// lattice counterparts. The digit selects the immune response:
///   1 - one death event per unit time, uniform over live types;
///   2 - each live type dies at rate 1;
///   3 - each pathogen carries a rate-1 clock that kills its whole type.
enum class ModelId { M1, M2, M3, S1, S2, S3 };

bool is_spatial(ModelId model);
std::string to_string(ModelId model);
std::optional<ModelId> parse_model(std::string_view text);

inline constexpr int kMaxDim = 4;

/// Finite-computation stopping rule. A trajectory halts at extinction or at
/// the first bound reached; reaching max_population or max_time is the
/// survival proxy, while max_events is a safety valve reported separately.
struct StopRule {
  std::uint64_t max_population = 10'000;
  double max_time = 1'000.0;
  std::uint64_t max_events = 100'000'000;

  void validate() const;
  friend bool operator==(const StopRule&, const StopRule&) = default;
};

/// Full experiment configuration for one model.
struct SimParams {
  ModelId model = ModelId::M1;
  double lambda = 1.0;            // per-pathogen birth rate
  double r = 0.0;                 // mutation probability per birth
  std::optional<int> dim;         // lattice dimension, spatial models only
  StopRule stop;

  bool spatial() const { return is_spatial(model); }
  void validate() const;  // throws std::invalid_argument
  friend bool operator==(const SimParams&, const SimParams&) = default;
};

/// What a single run records beyond its verdict.
struct RecordOptions {
  bool series = false;        // sample (t, N, K) and, for d=1 spatial, (L, R)
  double stride = 0.5;        // sampling stride; 0 records every event
  bool genealogy = false;     // retain per-type records
  bool verify_each_event = false;  // spatial engines: from-scratch check per event
};

}  // namespace pathogen

#endif  // PATHOGEN_PARAMS_HPP
