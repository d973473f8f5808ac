#ifndef PATHOGEN_DETAIL_RUNNER_HPP
#define PATHOGEN_DETAIL_RUNNER_HPP

#include <cstdint>

#include "pathogen/outcome.hpp"
#include "pathogen/params.hpp"

namespace pathogen::detail {

/// Shared event loop for both engines. Engine must provide:
///   double time() const; uint64_t population() const; uint64_t types() const;
///   double draw_holding();            // exponential at current total rate
///   void apply(double at);            // categorize + apply one event
///   SeriesPoint sample(double t) const;
///   bool verify() const;              // from-scratch consistency check
///   GenealogyRecord genealogy_snapshot() const;
///
/// Stop semantics: the holding time for the next event is drawn first; if it
/// would land past max_time the event never happens and the run is declared
/// surviving at the horizon with the pre-event state. Otherwise the event is
/// applied and extinction, the population cap, and the event cap are checked
/// in that order. The series samples the piecewise-constant state at stride
/// multiples (right-continuous convention); stride 0 records every event.
template <typename Engine>
Outcome run_to_stop(Engine& eng, const StopRule& stop, const RecordOptions& rec) {
  Outcome out;
  const bool per_event = rec.series && rec.stride <= 0.0;
  std::uint64_t sample_index = 1;
  double next_sample = rec.stride;
  if (rec.series) out.series.push_back(eng.sample(0.0));

  std::uint64_t events = 0;
  for (;;) {
    const double t_next = eng.time() + eng.draw_holding();
    if (t_next > stop.max_time) {
      if (rec.series && !per_event) {
        while (next_sample <= stop.max_time) {
          out.series.push_back(eng.sample(next_sample));
          next_sample = rec.stride * static_cast<double>(++sample_index);
        }
      }
      out.verdict = {Verdict::Kind::SurvivedProxy, ProxyReason::TimeHorizon,
                     stop.max_time};
      break;
    }
    if (rec.series && !per_event) {
      while (next_sample < t_next) {
        out.series.push_back(eng.sample(next_sample));
        next_sample = rec.stride * static_cast<double>(++sample_index);
      }
    }
    eng.apply(t_next);
    ++events;
    if (rec.verify_each_event && !eng.verify()) ++out.diagnostics.consistency_failures;
    if (per_event) out.series.push_back(eng.sample(t_next));
    if (eng.population() == 0) {
      out.verdict = {Verdict::Kind::Extinct, ProxyReason::PopulationCap, t_next};
      break;
    }
    if (eng.population() >= stop.max_population) {
      out.verdict = {Verdict::Kind::SurvivedProxy, ProxyReason::PopulationCap, t_next};
      break;
    }
    if (events >= stop.max_events) {
      out.verdict = {Verdict::Kind::SurvivedProxy, ProxyReason::EventCap, t_next};
      break;
    }
  }

  out.final_population = eng.population();
  out.final_type_count = eng.types();
  out.diagnostics.events = events;
  if (rec.genealogy) out.genealogy = eng.genealogy_snapshot();
  return out;
}

}  // namespace pathogen::detail

#endif  // PATHOGEN_DETAIL_RUNNER_HPP
