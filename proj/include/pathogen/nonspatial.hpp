#ifndef PATHOGEN_NONSPATIAL_HPP
#define PATHOGEN_NONSPATIAL_HPP

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "pathogen/outcome.hpp"
#include "pathogen/params.hpp"
#include "pathogen/rng.hpp"
#include "pathogen/weighted_index.hpp"

namespace pathogen {

/// One event of the non-spatial dynamics.
struct NsEvent {
  enum class Kind { Birth, TypeDeath } kind = Kind::Birth;
  double at = 0.0;
  // Birth
  std::uint64_t parent_type = 0;
  std::uint64_t child_type = 0;
  bool is_mutant = false;
  // TypeDeath
  std::uint64_t type_id = 0;
  std::uint64_t victims = 0;
};

/// Live state of Models 1-3: per-type counts behind a cumulative-weight
/// index (counts double as sampling weights), plus genealogy bookkeeping.
/// Killed types are pruned; type ids are never reused.
class NonSpatialState {
 public:
  double time() const { return time_; }
  std::uint64_t total() const { return weights_.total(); }
  std::uint64_t type_count() const { return entries_.size(); }
  std::uint64_t next_type_id() const { return next_type_id_; }

  std::uint64_t slot_type(std::size_t slot) const { return entries_[slot].type_id; }
  std::uint64_t slot_count(std::size_t slot) const { return weights_.weight(slot); }

  /// Slot selection primitives; they consume a draw but leave the state
  /// unchanged (exposed so tests can probe the selection laws directly).
  std::size_t sample_slot_by_count(Rng& rng) const;
  std::size_t sample_slot_uniform(Rng& rng) const;

  /// Live counts keyed by type id (ordered; for tests and inspection).
  std::map<std::uint64_t, std::uint64_t> live_counts() const;

  /// Completed + open type records, completed first in death order.
  GenealogyRecord genealogy_snapshot() const;

  /// Arbitrary live configuration for tests. Type ids must be distinct and
  /// counts positive; new ids continue after the largest given id.
  static NonSpatialState testing_state(
      const SimParams& params,
      const std::vector<std::pair<std::uint64_t, std::uint64_t>>& type_counts,
      bool retain_genealogy = false);

 private:
  struct TypeEntry {
    std::uint64_t type_id = 0;
    std::uint64_t parent_type = 0;
    double birth_time = 0.0;
    std::uint64_t mutant_offspring = 0;
    std::uint64_t max_size = 1;
  };

  double time_ = 0.0;
  std::uint64_t next_type_id_ = 2;
  bool retain_genealogy_ = false;
  std::vector<TypeEntry> entries_;      // dense, live types only
  WeightedIndex weights_;               // weight(slot) == live count of that type
  std::vector<TypeRecord> completed_;   // retained when genealogy is on

  friend NonSpatialState ns_init(const SimParams&, bool);
  friend NsEvent ns_apply_event(NonSpatialState&, const SimParams&, Rng&, double);
};

/// Fresh state: a single pathogen of type 1 at time zero.
NonSpatialState ns_init(const SimParams& params, bool retain_genealogy = false);

/// (birth rate, death rate) = (λN, {1 | K | N}). Rejects extinct states.
std::pair<double, double> ns_total_rates(const NonSpatialState& state,
                                         const SimParams& params);

/// Exponential holding time at the current aggregate rate.
double ns_draw_holding(const NonSpatialState& state, const SimParams& params, Rng& rng);

/// Categorize and apply one event at the given time. Draw order: event
/// category, target selection, then (for births with 0 < r < 1) the
/// mutation flag.
NsEvent ns_apply_event(NonSpatialState& state, const SimParams& params, Rng& rng,
                       double at);

/// Advance by one event: holding time, then ns_apply_event.
NsEvent ns_step(NonSpatialState& state, const SimParams& params, Rng& rng);

/// Run to extinction or the stopping rule.
Outcome ns_run(const SimParams& params, Rng& rng, const RecordOptions& rec = {});

/// Mutant offspring, peak size, and duration of a single type's clan,
/// simulated in isolation (valid for Models 2 and 3, whose types evolve
/// independently of the rest of the population).
struct TypeLifetime {
  std::uint64_t mutant_offspring = 0;
  std::uint64_t max_size = 1;
  double duration = 0.0;
};
TypeLifetime simulate_type_lifetime(ModelId model, double lambda, double r, Rng& rng);

/// Histogram of mutant-offspring counts over completed types.
std::map<std::uint64_t, std::uint64_t> ns_offspring_histogram(
    std::span<const GenealogyRecord> records);

}  // namespace pathogen

#endif  // PATHOGEN_NONSPATIAL_HPP
