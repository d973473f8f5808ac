#include "pathogen/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pathogen::io {

std::string format_g9(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

json json_number(double value) {
  if (std::isinf(value)) return value > 0 ? json("inf") : json("-inf");
  return json(value);
}

EstimateRow make_row(const SurvivalEstimate& est, const std::string& anomaly,
                     bool with_timing) {
  EstimateRow row;
  row.model = to_string(est.params.model);
  row.dim = est.params.dim;
  row.lambda = est.params.lambda;
  row.r = est.params.r;
  row.trials = est.trials;
  row.survivors = est.survivors;
  row.estimate = est.estimate;
  row.ci_low = est.ci_low;
  row.ci_high = est.ci_high;
  row.seed = est.master_seed;
  row.wall_time_s = with_timing ? est.wall_time_s : 0.0;
  row.anomaly = anomaly;
  if (anomaly.empty() && est.event_cap_hits > 0) {
    std::ostringstream note;
    note << "event_cap=" << est.event_cap_hits;
    row.anomaly = note.str();
  }
  return row;
}

namespace {

void append_row(std::ostringstream& out, const EstimateRow& row) {
  out << row.model << ',';
  if (row.dim.has_value()) out << *row.dim;
  out << ',' << format_g9(row.lambda) << ',' << format_g9(row.r) << ','
      << row.trials << ',' << row.survivors << ',' << format_g9(row.estimate)
      << ',' << format_g9(row.ci_low) << ',' << format_g9(row.ci_high) << ','
      << row.seed << ',' << format_g9(row.wall_time_s) << ',' << row.anomaly
      << '\n';
}

}  // namespace

std::string to_csv(const std::vector<EstimateRow>& rows) {
  std::ostringstream out;
  out << kEstimateCsvHeader << '\n';
  for (const EstimateRow& row : rows) append_row(out, row);
  return out.str();
}

std::string bisect_to_csv(const std::vector<EstimateRow>& rows, double bracket_lo,
                          double bracket_hi) {
  std::ostringstream out;
  out << to_csv(rows);
  out << "bracket_lo,bracket_hi\n";
  out << format_g9(bracket_lo) << ',' << format_g9(bracket_hi) << '\n';
  return out.str();
}

json row_to_json(const EstimateRow& row) {
  json j;
  j["model"] = row.model;
  j["dim"] = row.dim.has_value() ? json(*row.dim) : json(nullptr);
  j["lambda"] = json_number(row.lambda);
  j["r"] = json_number(row.r);
  j["trials"] = row.trials;
  j["survivors"] = row.survivors;
  j["estimate"] = json_number(row.estimate);
  j["ci_low"] = json_number(row.ci_low);
  j["ci_high"] = json_number(row.ci_high);
  j["seed"] = row.seed;
  j["wall_time_s"] = json_number(row.wall_time_s);
  j["anomaly"] = row.anomaly;
  return j;
}

json outcome_to_json(const Outcome& outcome) {
  json j;
  j["verdict"] = outcome.verdict.extinct() ? "extinct" : "survived_proxy";
  if (outcome.verdict.survived_proxy()) {
    switch (outcome.verdict.reason) {
      case ProxyReason::PopulationCap: j["reason"] = "population_cap"; break;
      case ProxyReason::TimeHorizon: j["reason"] = "time_horizon"; break;
      case ProxyReason::EventCap: j["reason"] = "event_cap"; break;
    }
  }
  j["time"] = json_number(outcome.verdict.time);
  j["final_population"] = outcome.final_population;
  j["final_type_count"] = outcome.final_type_count;
  j["events"] = outcome.diagnostics.events;
  if (!outcome.series.empty()) {
    json series = json::array();
    for (const SeriesPoint& p : outcome.series) {
      json point = json::array({json_number(p.t), p.population, p.type_count});
      if (p.has_extent) {
        point.push_back(p.left);
        point.push_back(p.right);
      }
      series.push_back(std::move(point));
    }
    j["series"] = std::move(series);
  }
  if (outcome.genealogy.has_value()) {
    json types = json::array();
    for (const TypeRecord& type : outcome.genealogy->types) {
      json t;
      t["type_id"] = type.type_id;
      t["parent_type"] =
          type.parent_type == 0 ? json(nullptr) : json(type.parent_type);
      t["birth_time"] = json_number(type.birth_time);
      t["death_time"] = type.death_time.has_value() ? json_number(*type.death_time)
                                                    : json(nullptr);
      t["mutant_offspring"] = type.mutant_offspring;
      t["max_size"] = type.max_size;
      types.push_back(std::move(t));
    }
    j["genealogy"] = std::move(types);
  }
  return j;
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target);
}

}  // namespace pathogen::io
