#include "pathogen/nonspatial.hpp"

#include <algorithm>
#include <stdexcept>

#include "pathogen/detail/runner.hpp"

namespace pathogen {

namespace {

void require_nonspatial(const SimParams& params) {
  params.validate();
  if (params.spatial())
    throw std::invalid_argument("non-spatial engine requires model M1, M2 or M3");
}

void require_live(const NonSpatialState& state) {
  if (state.total() == 0) throw std::logic_error("state is extinct");
}

}  // namespace

std::size_t NonSpatialState::sample_slot_by_count(Rng& rng) const {
  return weights_.sample(rng.below(weights_.total()));
}

std::size_t NonSpatialState::sample_slot_uniform(Rng& rng) const {
  return static_cast<std::size_t>(rng.below(entries_.size()));
}

std::map<std::uint64_t, std::uint64_t> NonSpatialState::live_counts() const {
  std::map<std::uint64_t, std::uint64_t> counts;
  for (std::size_t slot = 0; slot < entries_.size(); ++slot)
    counts[entries_[slot].type_id] = weights_.weight(slot);
  return counts;
}

GenealogyRecord NonSpatialState::genealogy_snapshot() const {
  GenealogyRecord record;
  record.types = completed_;
  for (std::size_t slot = 0; slot < entries_.size(); ++slot) {
    const TypeEntry& e = entries_[slot];
    TypeRecord open;
    open.type_id = e.type_id;
    open.parent_type = e.parent_type;
    open.birth_time = e.birth_time;
    open.mutant_offspring = e.mutant_offspring;
    open.max_size = e.max_size;
    record.types.push_back(open);
  }
  return record;
}

NonSpatialState NonSpatialState::testing_state(
    const SimParams& params,
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& type_counts,
    bool retain_genealogy) {
  require_nonspatial(params);
  NonSpatialState state;
  state.retain_genealogy_ = retain_genealogy;
  state.next_type_id_ = 1;
  for (const auto& [id, count] : type_counts) {
    if (count == 0) throw std::invalid_argument("type counts must be positive");
    TypeEntry e;
    e.type_id = id;
    e.max_size = count;
    state.entries_.push_back(e);
    state.weights_.push_back(count);
    state.next_type_id_ = std::max(state.next_type_id_, id + 1);
  }
  return state;
}

NonSpatialState ns_init(const SimParams& params, bool retain_genealogy) {
  require_nonspatial(params);
  NonSpatialState state;
  state.retain_genealogy_ = retain_genealogy;
  NonSpatialState::TypeEntry origin;
  origin.type_id = 1;
  state.entries_.push_back(origin);
  state.weights_.push_back(1);
  state.next_type_id_ = 2;
  return state;
}

std::pair<double, double> ns_total_rates(const NonSpatialState& state,
                                         const SimParams& params) {
  require_live(state);
  const double birth = params.lambda * static_cast<double>(state.total());
  double death = 0.0;
  switch (params.model) {
    case ModelId::M1: death = 1.0; break;
    case ModelId::M2: death = static_cast<double>(state.type_count()); break;
    case ModelId::M3: death = static_cast<double>(state.total()); break;
    default: throw std::invalid_argument("non-spatial rates require M1, M2 or M3");
  }
  return {birth, death};
}

double ns_draw_holding(const NonSpatialState& state, const SimParams& params,
                       Rng& rng) {
  const auto [birth, death] = ns_total_rates(state, params);
  return rng.exponential(birth + death);
}

NsEvent ns_apply_event(NonSpatialState& state, const SimParams& params, Rng& rng,
                       double at) {
  const auto [birth_rate, death_rate] = ns_total_rates(state, params);
  state.time_ = at;

  NsEvent event;
  event.at = at;
  if (rng.next_double() * (birth_rate + death_rate) < birth_rate) {
    event.kind = NsEvent::Kind::Birth;
    const std::size_t slot = state.sample_slot_by_count(rng);
    NonSpatialState::TypeEntry& parent = state.entries_[slot];
    event.parent_type = parent.type_id;
    event.is_mutant = rng.bernoulli(params.r);
    if (event.is_mutant) {
      event.child_type = state.next_type_id_++;
      parent.mutant_offspring += 1;
      NonSpatialState::TypeEntry child;
      child.type_id = event.child_type;
      child.parent_type = parent.type_id;
      child.birth_time = at;
      state.entries_.push_back(child);
      state.weights_.push_back(1);
    } else {
      event.child_type = parent.type_id;
      state.weights_.add(slot, 1);
      parent.max_size = std::max(parent.max_size, state.weights_.weight(slot));
    }
  } else {
    event.kind = NsEvent::Kind::TypeDeath;
    const std::size_t slot = params.model == ModelId::M3
                                 ? state.sample_slot_by_count(rng)
                                 : state.sample_slot_uniform(rng);
    NonSpatialState::TypeEntry& victim = state.entries_[slot];
    event.type_id = victim.type_id;
    event.victims = state.weights_.weight(slot);
    if (state.retain_genealogy_) {
      TypeRecord record;
      record.type_id = victim.type_id;
      record.parent_type = victim.parent_type;
      record.birth_time = victim.birth_time;
      record.death_time = at;
      record.mutant_offspring = victim.mutant_offspring;
      record.max_size = victim.max_size;
      state.completed_.push_back(record);
    }
    const std::size_t last = state.entries_.size() - 1;
    if (slot != last) {
      state.entries_[slot] = state.entries_[last];
      state.weights_.set_weight(slot, state.weights_.weight(last));
    }
    state.weights_.pop_back();
    state.entries_.pop_back();
  }
  return event;
}

NsEvent ns_step(NonSpatialState& state, const SimParams& params, Rng& rng) {
  const double dt = ns_draw_holding(state, params, rng);
  return ns_apply_event(state, params, rng, state.time() + dt);
}

namespace {

struct NsEngine {
  NonSpatialState state;
  const SimParams& params;
  Rng& rng;

  double time() const { return state.time(); }
  std::uint64_t population() const { return state.total(); }
  std::uint64_t types() const { return state.type_count(); }
  double draw_holding() { return ns_draw_holding(state, params, rng); }
  void apply(double at) { ns_apply_event(state, params, rng, at); }
  bool verify() const { return true; }  // O(1)-consistent by construction
  GenealogyRecord genealogy_snapshot() const { return state.genealogy_snapshot(); }

  SeriesPoint sample(double t) const {
    SeriesPoint p;
    p.t = t;
    p.population = state.total();
    p.type_count = state.type_count();
    return p;
  }
};

}  // namespace

Outcome ns_run(const SimParams& params, Rng& rng, const RecordOptions& rec) {
  NsEngine engine{ns_init(params, rec.genealogy), params, rng};
  return detail::run_to_stop(engine, params.stop, rec);
}

TypeLifetime simulate_type_lifetime(ModelId model, double lambda, double r,
                                    Rng& rng) {
  if (model != ModelId::M2 && model != ModelId::M3)
    throw std::invalid_argument(
        "type lifetimes are clan-autonomous only for Models 2 and 3");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("r must lie in [0, 1]");

  TypeLifetime life;
  std::uint64_t size = 1;
  double t = 0.0;
  for (;;) {
    const double birth_rate = lambda * static_cast<double>(size);
    const double death_rate = model == ModelId::M2 ? 1.0 : static_cast<double>(size);
    t += rng.exponential(birth_rate + death_rate);
    if (rng.next_double() * (birth_rate + death_rate) < birth_rate) {
      if (rng.bernoulli(r)) {
        life.mutant_offspring += 1;  // the mutant founds its own clan
      } else {
        size += 1;
        life.max_size = std::max(life.max_size, size);
      }
    } else {
      life.duration = t;
      return life;
    }
  }
}

std::map<std::uint64_t, std::uint64_t> ns_offspring_histogram(
    std::span<const GenealogyRecord> records) {
  std::map<std::uint64_t, std::uint64_t> histogram;
  for (const GenealogyRecord& record : records)
    for (const TypeRecord& type : record.types)
      if (type.completed()) histogram[type.mutant_offspring] += 1;
  return histogram;
}

}  // namespace pathogen
