#ifndef PATHOGEN_OUTCOME_HPP
#define PATHOGEN_OUTCOME_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace pathogen {

enum class ProxyReason { PopulationCap, TimeHorizon, EventCap };

/// Extinct(time) or SurvivedProxy(reason, time). Survival in finite
/// computation is always the proxy verdict; the reason records which bound
/// fired. EventCap is never conflated with the other two by the harness.
struct Verdict {
  enum class Kind { Extinct, SurvivedProxy } kind = Kind::Extinct;
  ProxyReason reason = ProxyReason::PopulationCap;  // meaningful for SurvivedProxy
  double time = 0.0;

  bool extinct() const { return kind == Kind::Extinct; }
  bool survived_proxy() const { return kind == Kind::SurvivedProxy; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// One sampled point of a trajectory. Extent fields are filled for d=1
/// spatial runs only (left/right-most occupied coordinate).
struct SeriesPoint {
  double t = 0.0;
  std::uint64_t population = 0;
  std::uint64_t type_count = 0;
  bool has_extent = false;
  std::int64_t left = 0;
  std::int64_t right = 0;
  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Lifetime record of one type. parent_type is 0 for the originator type 1.
/// death_time stays empty for types still alive when the run stopped.
struct TypeRecord {
  std::uint64_t type_id = 0;
  std::uint64_t parent_type = 0;
  double birth_time = 0.0;
  std::optional<double> death_time;
  std::uint64_t mutant_offspring = 0;   // children in the type tree
  std::uint64_t max_size = 1;           // max simultaneous pathogens of this type
  bool completed() const { return death_time.has_value(); }
  friend bool operator==(const TypeRecord&, const TypeRecord&) = default;
};

/// Type genealogy of one run: completed types in death order, then the types
/// still open at the end in engine slot order.
struct GenealogyRecord {
  std::vector<TypeRecord> types;
  friend bool operator==(const GenealogyRecord&, const GenealogyRecord&) = default;
};

struct RunDiagnostics {
  std::uint64_t events = 0;
  std::uint64_t consistency_failures = 0;  // nonzero only with per-event verification
  friend bool operator==(const RunDiagnostics&, const RunDiagnostics&) = default;
};

struct Outcome {
  Verdict verdict;
  std::uint64_t final_population = 0;
  std::uint64_t final_type_count = 0;
  std::vector<SeriesPoint> series;             // present when requested
  std::optional<GenealogyRecord> genealogy;    // present when requested
  RunDiagnostics diagnostics;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

}  // namespace pathogen

#endif  // PATHOGEN_OUTCOME_HPP
