#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "scenbound/bounding.hpp"
#include "scenbound/core_types.hpp"
#include "scenbound/error.hpp"
#include "scenbound/hub_io.hpp"
#include "scenbound/oracle_sim.hpp"
#include "scenbound/random.hpp"
#include "scenbound/validation.hpp"
#include "scenbound/violation.hpp"

namespace scenbound::cli {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int { kOk = 0, kInputError = 2, kValidationFailure = 3 };

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "short write to " + path);
}

/// Seed used when none is given: $SCENBOUND_SEED if set, else 0.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("SCENBOUND_SEED"); env && *env) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

/// Everything needed to reproduce one command's output. Embedded in every
/// result file; contains no timestamps so reruns stay byte-identical.
struct RunManifest {
  std::string command;
  std::string input_digest;
  std::string scenario_x;
  std::string scenario_y;
  std::vector<double> labels;
  std::optional<ViolationParams> violation;
  std::optional<double> alpha;
  std::optional<std::size_t> n_samples;
  std::optional<std::uint64_t> seed;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["tool_version"] = kToolVersion;
    if (!input_digest.empty()) j["input_sha256"] = input_digest;
    if (!scenario_x.empty()) {
      j["scenario_order"] = {scenario_x, scenario_y};
      j["difference"] = scenario_x + " - " + scenario_y;
    }
    if (!labels.empty()) j["labels"] = labels;
    if (violation) {
      j["eps_l"] = violation->lower;
      j["eps_u"] = violation->upper;
      j["eps_provenance"] = std::string(to_string(violation->provenance));
    }
    if (alpha) j["alpha"] = *alpha;
    if (n_samples) j["n_samples"] = *n_samples;
    if (seed) {
      j["seed"] = *seed;
      j["rng"] = std::string(CounterRng::name);
    }
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
  }
};

struct SelectionOptions {
  std::string input;
  std::string scenario_x;
  std::string scenario_y;
  std::string target;
  std::string location;
  std::string model;              // empty: every model in the file
  std::string column_map;         // optional JSON mapping file
  bool lenient = false;
};

struct LoadedInput {
  std::string digest;
  hub::ParseResult parsed;
  std::vector<std::string> models;
};

inline LoadedInput load_input(const SelectionOptions& sel) {
  if (sel.scenario_x.empty() || sel.scenario_y.empty()) {
    throw Error(ErrorCode::InvalidArgument, "both scenarios must be named, in X, Y order");
  }
  LoadedInput in;
  const std::string bytes = read_file(sel.input);
  in.digest = sha256_hex(bytes);
  hub::ParseOptions po;
  po.lenient = sel.lenient;
  if (!sel.column_map.empty()) {
    po.columns = hub::ColumnMap::from_json(nlohmann::json::parse(read_file(sel.column_map)));
  }
  const auto slash = sel.input.find_last_of('/');
  po.default_model = slash == std::string::npos ? sel.input : sel.input.substr(slash + 1);
  std::istringstream stream(bytes);
  in.parsed = hub::parse_submission(stream, po);
  in.models = sel.model.empty() ? hub::list_models(in.parsed.records)
                                : std::vector<std::string>{sel.model};
  return in;
}

inline hub::AssembleResult assemble_for(const LoadedInput& in, const SelectionOptions& sel,
                                        const std::string& model, int t_app) {
  hub::AssembleRequest req;
  req.model = model;
  req.scenario_x = sel.scenario_x;
  req.scenario_y = sel.scenario_y;
  req.target = sel.target;
  req.location = sel.location;
  req.t_app = t_app;
  return hub::assemble_pairs(in.parsed.records, req);
}

struct EpsilonOptions {
  SelectionOptions selection;
  int t_app = 0;
  std::string method = "estimate";  // estimate | pchip | both
  std::size_t grid_points = 1001;
  bool literal = false;
};

/// Per-model violation estimates from the weeks before t_app, with the
/// per-week trace for inspecting how stable the maxima are over time.
inline nlohmann::json cmd_epsilon(const EpsilonOptions& opt) {
  if (opt.t_app < 1) {
    throw Error(ErrorCode::NoPreDivergenceWeeks,
                "t_app=" + std::to_string(opt.t_app) + " leaves no week before divergence");
  }
  if (opt.method != "estimate" && opt.method != "pchip" && opt.method != "both") {
    throw Error(ErrorCode::InvalidArgument, "method must be estimate, pchip or both");
  }
  const auto& sel = opt.selection;
  const auto in = load_input(sel);

  RunManifest manifest;
  manifest.command = "epsilon";
  manifest.input_digest = in.digest;
  manifest.scenario_x = sel.scenario_x;
  manifest.scenario_y = sel.scenario_y;
  manifest.extra = {{"t_app", opt.t_app},
                    {"method", opt.method},
                    {"grid_points", opt.grid_points},
                    {"estimator", opt.literal ? "literal" : "conservative"},
                    {"target", sel.target},
                    {"location", sel.location}};

  nlohmann::json report;
  report["models"] = nlohmann::json::array();
  std::size_t succeeded = 0;
  for (const auto& model : in.models) {
    nlohmann::json entry{{"model", model}};
    try {
      const auto assembled = assemble_for(in, sel, model, opt.t_app);
      std::vector<ScenarioPair> pre;
      for (const auto& p : assembled.pairs) {
        if (p.pre_divergence()) pre.push_back(p);
      }
      if (pre.empty()) {
        throw Error(ErrorCode::NoPreDivergenceWeeks, "no complete week before t_app");
      }
      if (manifest.labels.empty()) {
        const auto lv = pre.front().labels().levels();
        manifest.labels.assign(lv.begin(), lv.end());
      }
      entry["weeks_used"] = pre.size();
      entry["excluded"] = hub::pairs_to_json(assembled)["excluded"];
      if (opt.method != "pchip") {
        const auto trace = estimate_epsilon(
            pre, opt.literal ? EstimateMode::Literal : EstimateMode::Conservative);
        nlohmann::json e{{"eps_l", trace.final.lower}, {"eps_u", trace.final.upper}};
        e["weeks"] = nlohmann::json::array();
        for (const auto& w : trace.per_week()) {
          e["weeks"].push_back({{"week", w.week}, {"eps_l", w.lower}, {"eps_u", w.upper}});
        }
        e["contributions"] = nlohmann::json::array();
        for (const auto& c : trace.contributions) {
          e["contributions"].push_back(
              {{"week", c.week}, {"index", c.index}, {"eps_l", c.lower}, {"eps_u", c.upper}});
        }
        entry["estimate"] = e;
      }
      if (opt.method != "estimate") {
        const auto trace = approx_epsilon_trace(pre, opt.grid_points);
        nlohmann::json e{{"eps_l", trace.final.lower},
                         {"eps_u", trace.final.upper},
                         {"degenerate", trace.degenerate}};
        e["weeks"] = nlohmann::json::array();
        for (const auto& w : trace.weeks) {
          e["weeks"].push_back({{"week", w.week}, {"eps_l", w.lower}, {"eps_u", w.upper}});
        }
        entry["pchip"] = e;
      }
      ++succeeded;
    } catch (const Error& e) {
      if (in.models.size() == 1) throw;
      entry["error"] = e.what();
    }
    report["models"].push_back(entry);
  }
  if (succeeded == 0) {
    throw Error(ErrorCode::NoPreDivergenceWeeks, "no model had a usable pre-divergence week");
  }
  report["manifest"] = manifest.to_json();
  return report;
}

struct BoundOptions {
  SelectionOptions selection;
  double alpha = 0.8;
  double eps_l = 0.0;
  double eps_u = 0.0;
  std::string method = "grid";  // grid | interp
  std::string split = "symmetric";
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
};

struct BoundOutput {
  std::string jsonl;  // manifest line, then one object per (model, week)
  std::string csv;    // '#' manifest line, header, one row per (model, week)
  bool certificates_ok = true;
};

/// Per-week alpha-intervals for x - y with the supplied violation.
inline BoundOutput cmd_bound(const BoundOptions& opt) {
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  if (opt.method != "grid" && opt.method != "interp") {
    throw Error(ErrorCode::InvalidArgument, "method must be grid or interp");
  }
  if (opt.split != "symmetric" && opt.split != "shortest") {
    throw Error(ErrorCode::InvalidArgument, "split must be symmetric or shortest");
  }
  const auto& sel = opt.selection;
  const auto in = load_input(sel);
  const ViolationParams eps(opt.eps_l, opt.eps_u, Provenance::UserSupplied);
  const BoundConfig cfg{opt.n_samples, opt.seed,
                        opt.method == "grid" ? BoundMethod::QuantileGrid
                                             : BoundMethod::Interpolated,
                        eps};
  const TailSplit split = opt.split == "symmetric" ? TailSplit::Symmetric : TailSplit::Shortest;

  RunManifest manifest;
  manifest.command = "bound";
  manifest.input_digest = in.digest;
  manifest.scenario_x = sel.scenario_x;
  manifest.scenario_y = sel.scenario_y;
  manifest.violation = eps;
  manifest.alpha = opt.alpha;
  manifest.n_samples = opt.n_samples;
  manifest.seed = opt.seed;
  manifest.extra = {{"method", opt.method},
                    {"tail_split", opt.split},
                    {"target", sel.target},
                    {"location", sel.location}};

  std::vector<nlohmann::json> rows;
  std::ostringstream csv_rows;
  BoundOutput out;
  for (const auto& model : in.models) {
    const auto assembled = assemble_for(in, sel, model, 0);
    if (manifest.labels.empty() && assembled.labels) {
      const auto lv = assembled.labels->levels();
      manifest.labels.assign(lv.begin(), lv.end());
    }
    for (const auto& pair : assembled.pairs) {
      const auto samples = sample_bounds(pair, cfg);
      if (samples.ordering_violations() != 0) {
        throw Error(ErrorCode::InvalidArgument, "bound ordering violated");
      }
      const auto ci = extract_ci(samples, opt.alpha, split);
      out.certificates_ok = out.certificates_ok && ci.certificate >= opt.alpha;
      rows.push_back({{"model", model},
                      {"week", pair.meta().week},
                      {"lower", ci.lower},
                      {"upper", ci.upper},
                      {"alpha", ci.alpha},
                      {"p_low", ci.p_low},
                      {"p_high", ci.p_high},
                      {"certificate", ci.certificate}});
      csv_rows << hub::detail::quote_csv(model) << ',' << pair.meta().week << ','
               << hub::format_real(ci.lower) << ',' << hub::format_real(ci.upper) << ','
               << hub::format_real(ci.alpha) << ',' << hub::format_real(ci.p_low) << ','
               << hub::format_real(ci.p_high) << ',' << hub::format_real(ci.certificate)
               << '\n';
    }
  }
  const auto mj = manifest.to_json();
  std::ostringstream jl;
  jl << nlohmann::json{{"manifest", mj}}.dump() << '\n';
  for (const auto& r : rows) jl << r.dump() << '\n';
  out.jsonl = jl.str();
  out.csv = "# manifest: " + mj.dump() + "\nmodel,week,lower,upper,alpha,p_low,p_high,certificate\n" +
            csv_rows.str();
  return out;
}

namespace detail {

inline oracle::Transform law_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "gaussian") return oracle::GaussianLaw{j.at("mean").get<double>(), j.at("sd").get<double>()};
  if (type == "uniform") return oracle::UniformLaw{j.at("lo").get<double>(), j.at("hi").get<double>()};
  if (type == "affine") {
    return oracle::Affine{j.value("scale", 1.0), j.value("shift", 0.0)};
  }
  if (type == "piecewise_linear") {
    return oracle::PiecewiseLinear{j.at("xs").get<std::vector<double>>(),
                                   j.at("ys").get<std::vector<double>>()};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown law type '" + type + "'");
}

}  // namespace detail

/// Reads a simulation spec; omitted keys keep the SimulationSpec defaults.
inline oracle::SimulationSpec simulation_spec_from_json(const nlohmann::json& j) {
  oracle::SimulationSpec s;
  s.n = j.value("n", s.n);
  s.weeks = j.value("weeks", s.weeks);
  s.t_app = j.value("t_app", s.t_app);
  s.seed = j.value("seed", s.seed);
  if (j.contains("x_law")) s.x_law = detail::law_from_json(j.at("x_law"));
  if (j.contains("y_law")) s.y_law = detail::law_from_json(j.at("y_law"));
  s.weekly_growth = j.value("weekly_growth", s.weekly_growth);
  s.window = j.value("window", s.window);
  if (j.contains("labels")) s.labels = QuantileLabels(j.at("labels").get<std::vector<double>>());
  s.model = j.value("model", s.model);
  s.target = j.value("target", s.target);
  s.location = j.value("location", s.location);
  s.scenario_x = j.value("scenario_x", s.scenario_x);
  s.scenario_y = j.value("scenario_y", s.scenario_y);
  return s;
}

/// Hub-format CSV for a synthetic projection; the '#' manifest line records
/// the exact violation of every week's matching.
inline std::string cmd_simulate(const oracle::SimulationSpec& spec, const std::string& spec_text) {
  const auto weeks = oracle::generate_weekly(spec);
  std::vector<hub::SubmissionRecord> records;
  nlohmann::json per_week = nlohmann::json::array();
  double max_l = 0.0;
  double max_u = 0.0;
  for (const auto& w : weeks) {
    const auto pair = oracle::quantize(
        w.universe, spec.labels, PairMeta{spec.model, spec.target, spec.location, w.week, spec.t_app});
    auto rows = hub::pair_records(pair, spec.scenario_x, spec.scenario_y);
    records.insert(records.end(), rows.begin(), rows.end());
    per_week.push_back({{"week", w.week}, {"eps_l", w.epsilon.lower}, {"eps_u", w.epsilon.upper}});
    max_l = std::max(max_l, w.epsilon.lower);
    max_u = std::max(max_u, w.epsilon.upper);
  }
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.input_digest = sha256_hex(spec_text);
  manifest.scenario_x = spec.scenario_x;
  manifest.scenario_y = spec.scenario_y;
  manifest.labels.assign(spec.labels.begin(), spec.labels.end());
  manifest.seed = spec.seed;
  manifest.extra = {{"n", spec.n},
                    {"weeks", spec.weeks},
                    {"t_app", spec.t_app},
                    {"window", spec.window},
                    {"true_eps_l", max_l},
                    {"true_eps_u", max_u},
                    {"true_eps_by_week", per_week}};
  std::ostringstream os;
  hub::emit_submission(os, records, "manifest: " + manifest.to_json().dump());
  return os.str();
}

struct ValidateReport {
  std::vector<validation::SuiteResult> suites;
  bool passed = true;

  std::string text() const {
    std::ostringstream os;
    for (const auto& s : suites) {
      os << (s.passed ? "PASS " : "FAIL ") << s.name << ": " << s.detail << '\n';
    }
    os << (passed ? "all suites passed" : "validation FAILED") << '\n';
    return os.str();
  }
};

inline ValidateReport cmd_validate(const validation::Options& opt) {
  ValidateReport r;
  r.suites = validation::run_all(opt);
  for (const auto& s : r.suites) r.passed = r.passed && s.passed;
  return r;
}

}  // namespace scenbound::cli
