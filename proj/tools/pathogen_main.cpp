#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathogen/analytic.hpp"
#include "pathogen/experiments.hpp"
#include "pathogen/io.hpp"
#include "pathogen/nonspatial.hpp"
#include "pathogen/spatial.hpp"

namespace {

using pathogen::io::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRunAnomaly = 3;
constexpr int kExitBadBracket = 4;

struct Options {
  std::string model;
  std::string lambda_text;
  std::string r_text;
  int dim = 0;  // 0 = not set
  std::uint64_t seed = 1;
  std::uint64_t max_pop = 10'000;
  double max_time = 1'000.0;
  std::uint64_t max_events = 100'000'000;
  std::uint64_t trials = 0;  // 0 = model-dependent default
  unsigned parallelism = 0;  // 0 = hardware
  double confidence = 0.99;
  std::string out_format;  // empty = command default (csv; run/analytic emit json)
  std::string out_path;
  bool timing = false;
  // run
  bool series = false;
  bool genealogy = false;
  double stride = 0.5;
  // bisect
  std::string axis;
  double lo = 0.0;
  double hi = 0.0;
  double resolution = 0.0;
  // analytic
  std::uint64_t chain_n = 0;  // 0 = smallest N with N*lambda*r > 1
  std::string config_path;   // consumed by the pre-parse expansion
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

/// Expand `--config FILE` into CLI tokens: each `key=value` line becomes
/// `--key=value`, inserted right after the subcommand name so that flags
/// given on the command line come later and win (options take the last
/// occurrence).
std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::vector<std::string> config_tokens;
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line is not key=value: '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ValidationError("config line has an empty key");
    config_tokens.push_back("--" + key + "=" + value);
  }

  // Insert after the subcommand token (the first token not starting with -).
  std::vector<std::string> expanded;
  bool inserted = false;
  for (const std::string& arg : args) {
    expanded.push_back(arg);
    if (!inserted && !arg.empty() && arg[0] != '-') {
      expanded.insert(expanded.end(), config_tokens.begin(), config_tokens.end());
      inserted = true;
    }
  }
  if (!inserted)
    throw ValidationError("--config requires a subcommand");
  return expanded;
}

std::vector<double> parse_grid(const std::string& text, const std::string& name) {
  const auto parse_one = [&](const std::string& token) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse " + name + " value '" + token + "'");
    }
    if (used != token.size())
      throw ValidationError("cannot parse " + name + " value '" + token + "'");
    return value;
  };

  if (text.empty()) throw ValidationError(name + " is required");
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    // lo:hi:step, inclusive of lo; the endpoint joins when a grid point
    // lands within 1e-12 of hi.
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos = text.find(':'); pos != std::string::npos;
         pos = text.find(':', start)) {
      parts.push_back(text.substr(start, pos - start));
      start = pos + 1;
    }
    parts.push_back(text.substr(start));
    if (parts.size() != 3)
      throw ValidationError(name + " range must be lo:hi:step");
    const double lo = parse_one(parts[0]);
    const double hi = parse_one(parts[1]);
    const double step = parse_one(parts[2]);
    if (!(step > 0.0)) throw ValidationError(name + " range step must be positive");
    if (hi < lo) throw ValidationError(name + " range must have hi >= lo");
    for (std::uint64_t k = 0;; ++k) {
      const double v = lo + static_cast<double>(k) * step;
      if (v > hi + 1e-12) break;
      values.push_back(v);
    }
  } else {
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = text.find(',', start);
      values.push_back(parse_one(text.substr(
          start, pos == std::string::npos ? std::string::npos : pos - start)));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
  }
  return values;
}

double parse_scalar(const std::string& text, const std::string& name) {
  const std::vector<double> values = parse_grid(text, name);
  if (values.size() != 1)
    throw ValidationError(name + " takes a single value for this command");
  return values.front();
}

pathogen::SimParams build_params(const Options& opt, double lambda, double r) {
  pathogen::SimParams params;
  const auto model = pathogen::parse_model(opt.model);
  if (!model.has_value())
    throw ValidationError("unknown model '" + opt.model +
                          "' (expected m1, m2, m3, s1, s2 or s3)");
  params.model = *model;
  params.lambda = lambda;
  params.r = r;
  if (opt.dim != 0) params.dim = opt.dim;
  params.stop.max_population = opt.max_pop;
  params.stop.max_time = opt.max_time;
  params.stop.max_events = opt.max_events;
  params.validate();
  return params;
}

std::uint64_t trials_or_default(const Options& opt, const pathogen::SimParams& params) {
  if (opt.trials != 0) return opt.trials;
  return params.spatial() ? 2'000 : 10'000;  // spatial trials cost more
}

void emit(const Options& opt, const std::string& content) {
  if (opt.out_path.empty())
    std::cout << content;
  else
    pathogen::io::write_atomic(opt.out_path, content);
}

int cmd_run(const Options& opt) {
  const auto params =
      build_params(opt, parse_scalar(opt.lambda_text, "--lambda"),
                   parse_scalar(opt.r_text, "--r"));
  if (!opt.out_format.empty() && opt.out_format != "json")
    throw ValidationError("run emits JSON only");
  pathogen::RecordOptions rec;
  rec.series = opt.series;
  rec.stride = opt.stride;
  rec.genealogy = opt.genealogy;
  pathogen::Rng rng = pathogen::derive_trial_rng(opt.seed, 0);
  const pathogen::Outcome outcome =
      params.spatial() ? pathogen::sp_run(params, rng, rec)
                       : pathogen::ns_run(params, rng, rec);
  emit(opt, pathogen::io::dump(pathogen::io::outcome_to_json(outcome)));
  const bool event_capped = outcome.verdict.survived_proxy() &&
                            outcome.verdict.reason == pathogen::ProxyReason::EventCap;
  return event_capped ? kExitRunAnomaly : kExitOk;
}

int cmd_estimate(const Options& opt) {
  const auto params =
      build_params(opt, parse_scalar(opt.lambda_text, "--lambda"),
                   parse_scalar(opt.r_text, "--r"));
  const std::uint64_t trials = trials_or_default(opt, params);
  const pathogen::SurvivalEstimate est = pathogen::estimate_survival(
      params, trials, opt.seed, opt.parallelism, opt.confidence);
  const pathogen::io::EstimateRow row = pathogen::io::make_row(est, "", opt.timing);
  if (opt.out_format == "json")
    emit(opt, pathogen::io::dump(pathogen::io::row_to_json(row)));
  else
    emit(opt, pathogen::io::to_csv({row}));
  return est.anomalous() ? kExitRunAnomaly : kExitOk;
}

int cmd_sweep(const Options& opt) {
  const std::vector<double> lambdas = parse_grid(opt.lambda_text, "--lambda");
  const std::vector<double> rs = parse_grid(opt.r_text, "--r");
  const auto params = build_params(opt, lambdas.front(), rs.front());
  const std::uint64_t trials = trials_or_default(opt, params);
  const pathogen::SweepResult result = pathogen::sweep(
      params, lambdas, rs, trials, opt.seed, opt.parallelism, opt.confidence);

  std::vector<pathogen::io::EstimateRow> rows;
  bool any_anomaly = false;
  for (const pathogen::SweepCell& cell : result.cells) {
    rows.push_back(pathogen::io::make_row(cell.estimate, cell.anomaly, opt.timing));
    any_anomaly = any_anomaly || !rows.back().anomaly.empty();
  }
  if (opt.out_format == "json") {
    json j;
    j["rows"] = json::array();
    for (const auto& row : rows) j["rows"].push_back(pathogen::io::row_to_json(row));
    emit(opt, pathogen::io::dump(j));
  } else {
    emit(opt, pathogen::io::to_csv(rows));
  }
  return any_anomaly ? kExitRunAnomaly : kExitOk;
}

int cmd_bisect(const Options& opt) {
  pathogen::BisectAxis axis;
  if (opt.axis == "lambda")
    axis = pathogen::BisectAxis::Lambda;
  else if (opt.axis == "r")
    axis = pathogen::BisectAxis::R;
  else
    throw ValidationError("--axis must be lambda or r");
  if (!(opt.resolution > 0.0)) throw ValidationError("--resolution must be positive");
  if (!(opt.lo < opt.hi)) throw ValidationError("--lo must be below --hi");

  // The swept axis takes a placeholder from the bracket; the other axis
  // comes from its flag.
  double lambda = 0.0, r = 0.0;
  if (axis == pathogen::BisectAxis::Lambda) {
    lambda = opt.lo;
    r = parse_scalar(opt.r_text, "--r");
  } else {
    lambda = parse_scalar(opt.lambda_text, "--lambda");
    r = opt.lo;
  }
  const auto params = build_params(opt, lambda, r);
  const std::uint64_t trials = trials_or_default(opt, params);
  const pathogen::BisectionResult result = pathogen::bisect_critical(
      params, axis, opt.lo, opt.hi, opt.resolution, trials, opt.seed,
      opt.parallelism, opt.confidence);

  std::vector<pathogen::io::EstimateRow> rows;
  for (const pathogen::BisectionProbe& probe : result.probes)
    rows.push_back(pathogen::io::make_row(probe.estimate,
                                          probe.escalated ? "escalated" : "",
                                          opt.timing));
  if (opt.out_format == "json") {
    json j;
    j["probes"] = json::array();
    for (const auto& row : rows) j["probes"].push_back(pathogen::io::row_to_json(row));
    j["bracket_lo"] = pathogen::io::json_number(result.lo);
    j["bracket_hi"] = pathogen::io::json_number(result.hi);
    j["decision_threshold"] = pathogen::io::json_number(result.decision_threshold);
    emit(opt, pathogen::io::dump(j));
  } else {
    emit(opt, pathogen::io::bisect_to_csv(rows, result.lo, result.hi));
  }
  return kExitOk;
}

int cmd_analytic(const Options& opt) {
  const double lambda = parse_scalar(opt.lambda_text, "--lambda");
  const double r = parse_scalar(opt.r_text, "--r");
  const auto model = pathogen::parse_model(opt.model);
  if (!model.has_value()) throw ValidationError("unknown model '" + opt.model + "'");

  json j;
  j["model"] = pathogen::to_string(*model);
  j["lambda"] = pathogen::io::json_number(lambda);
  j["r"] = pathogen::io::json_number(r);
  switch (*model) {
    case pathogen::ModelId::M3: {
      const pathogen::PhaseVerdict verdict = pathogen::model3_phase(lambda, r);
      j["survives"] = verdict.survives;
      j["survival_probability"] = pathogen::io::json_number(verdict.value);
      j["offspring_mean"] = pathogen::io::json_number(r * lambda);
      break;
    }
    case pathogen::ModelId::M2: {
      const pathogen::PhaseVerdict verdict = pathogen::model2_phase(lambda, r);
      j["survives"] = verdict.survives;
      j["survival_probability"] =
          verdict.survives ? json("unknown-positive") : json("zero");
      j["mean_offspring"] = pathogen::io::json_number(
          pathogen::model2_mean_offspring(lambda, r));
      break;
    }
    case pathogen::ModelId::M1: {
      if (!(r > 0.0))
        throw ValidationError("the M1 survival result requires r > 0");
      // Comparison chain at level N: climbs with probability
      // p = N λ r / (1 + N λ r); survival from N on is (2p-1)/p.
      std::uint64_t n = opt.chain_n;
      if (n == 0) {
        n = 1;
        while (static_cast<double>(n) * lambda * r <= 1.0) ++n;
      }
      const double p = static_cast<double>(n) * lambda * r /
                       (1.0 + static_cast<double>(n) * lambda * r);
      j["survives"] = true;
      j["survival_probability"] = json("unknown-positive");
      j["chain_n"] = n;
      j["chain_p"] = pathogen::io::json_number(p);
      j["chain_bound"] = pathogen::io::json_number(pathogen::bd_chain_survival(p));
      j["note"] = "chain_bound lower-bounds survival from a state with chain_n "
                  "live types";
      break;
    }
    default:
      throw ValidationError("analytic results cover m1, m2 and m3 only");
  }
  emit(opt, pathogen::io::dump(j));
  return kExitOk;
}

void add_model_options(CLI::App* cmd, Options& opt, bool grids) {
  cmd->add_option("--model", opt.model, "model: m1, m2, m3, s1, s2, s3")->required();
  const char* lambda_help =
      grids ? "birth rate grid: value, comma list, or lo:hi:step"
            : "birth rate (per pathogen per unit time)";
  const char* r_help = grids ? "mutation probability grid: value, comma list, or "
                               "lo:hi:step"
                             : "mutation probability in [0, 1]";
  cmd->add_option("--lambda", opt.lambda_text, lambda_help);
  cmd->add_option("--r", opt.r_text, r_help);
  cmd->add_option("--dim", opt.dim, "lattice dimension (spatial models)");
  cmd->add_option("--seed", opt.seed, "master seed")->envname("PATHOGEN_SEED");
  cmd->add_option("--max-pop", opt.max_pop, "population cap (survival proxy)");
  cmd->add_option("--max-time", opt.max_time, "simulated time horizon");
  cmd->add_option("--max-events", opt.max_events, "event safety cap");
  cmd->add_option("--config", opt.config_path,
                  "key=value config file; flags win on conflict");
}

void add_batch_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--trials", opt.trials,
                  "trials per estimate (default 10000 non-spatial, 2000 spatial)");
  cmd->add_option("--parallelism", opt.parallelism,
                  "worker threads (0 = machine cores); never changes results");
  cmd->add_option("--confidence", opt.confidence, "Wilson interval confidence");
  cmd->add_option("--out-format", opt.out_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out-path", opt.out_path, "write output atomically to this path");
  cmd->add_flag("--timing", opt.timing,
                "report measured wall time (off keeps output byte-reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulation and analysis of six pathogen-immune models"};
  app.require_subcommand(1);
  // Options accept repeats with the last occurrence winning, so config-file
  // values (inserted first) yield to explicit flags.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Options opt;

  CLI::App* run = app.add_subcommand("run", "simulate one trajectory (JSON)");
  add_model_options(run, opt, false);
  run->add_flag("--series", opt.series, "record a (t, N, K[, L, R]) time series");
  run->add_option("--stride", opt.stride,
                  "series sampling stride (0 = every event)");
  run->add_flag("--genealogy", opt.genealogy, "record the type genealogy");
  run->add_option("--out-format", opt.out_format, "json")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--out-path", opt.out_path, "write output atomically to this path");

  CLI::App* estimate =
      app.add_subcommand("estimate", "Monte Carlo survival estimate");
  add_model_options(estimate, opt, false);
  add_batch_options(estimate, opt);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "survival over a (lambda, r) grid");
  add_model_options(sweep_cmd, opt, true);
  add_batch_options(sweep_cmd, opt);

  CLI::App* bisect = app.add_subcommand("bisect", "bracket a critical parameter");
  add_model_options(bisect, opt, false);
  add_batch_options(bisect, opt);
  bisect->add_option("--axis", opt.axis, "bisected parameter: lambda or r")->required();
  bisect->add_option("--lo", opt.lo, "subcritical endpoint")->required();
  bisect->add_option("--hi", opt.hi, "supercritical endpoint")->required();
  bisect->add_option("--resolution", opt.resolution, "final bracket width")->required();

  CLI::App* analytic = app.add_subcommand("analytic", "closed-form results (JSON)");
  add_model_options(analytic, opt, false);
  analytic->add_option("--chain-n", opt.chain_n,
                       "level for the M1 comparison-chain bound");
  analytic->add_option("--out-path", opt.out_path,
                       "write output atomically to this path");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config_args(args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (run->parsed()) return cmd_run(opt);
    if (estimate->parsed()) return cmd_estimate(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
    if (bisect->parsed()) return cmd_bisect(opt);
    if (analytic->parsed()) return cmd_analytic(opt);
  } catch (const pathogen::BracketInvalidError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadBracket;
  } catch (const pathogen::UndecidableProbeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunAnomaly;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunAnomaly;
  }
  return kExitOk;
}
