#include "fbst/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>
#include <system_error>

#include "fbst/errors.hpp"
#include "fbst/reparameterization.hpp"

#ifndef FBST_VERSION_STRING
#define FBST_VERSION_STRING "0.0.0"
#endif

namespace fbst {

using nlohmann::json;

std::string version_string() { return FBST_VERSION_STRING; }

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

const json& require_object(const json& parent, std::string_view key, const std::string& path) {
  const auto it = parent.find(key);
  if (it == parent.end()) invalid(path, "missing required field '" + std::string(key) + "'");
  if (!it->is_object()) invalid(path + "." + std::string(key), "expected an object");
  return *it;
}

void check_keys(const json& object, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) invalid(path, "unknown field '" + key + "'");
  }
}

double number(const json& object, std::string_view key, const std::string& path,
              std::optional<double> fallback = std::nullopt) {
  const auto it = object.find(key);
  if (it == object.end()) {
    if (fallback) return *fallback;
    invalid(path, "missing required field '" + std::string(key) + "'");
  }
  if (!it->is_number()) invalid(path + "." + std::string(key), "expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) invalid(path + "." + std::string(key), "expected a finite number");
  return v;
}

std::int64_t integer(const json& object, std::string_view key, const std::string& path,
                     std::optional<std::int64_t> fallback = std::nullopt) {
  const auto it = object.find(key);
  if (it == object.end()) {
    if (fallback) return *fallback;
    invalid(path, "missing required field '" + std::string(key) + "'");
  }
  if (!it->is_number_integer()) invalid(path + "." + std::string(key), "expected an integer");
  return it->get<std::int64_t>();
}

std::size_t count(const json& object, std::string_view key, const std::string& path,
                  std::size_t fallback) {
  const std::int64_t v = integer(object, key, path, static_cast<std::int64_t>(fallback));
  if (v < 0) invalid(path + "." + std::string(key), "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::string text(const json& object, std::string_view key, const std::string& path,
                 std::optional<std::string> fallback = std::nullopt) {
  const auto it = object.find(key);
  if (it == object.end()) {
    if (fallback) return *fallback;
    invalid(path, "missing required field '" + std::string(key) + "'");
  }
  if (!it->is_string()) invalid(path + "." + std::string(key), "expected a string");
  return it->get<std::string>();
}

std::vector<double> numbers(const json& object, std::string_view key, const std::string& path) {
  const auto it = object.find(key);
  if (it == object.end()) invalid(path, "missing required field '" + std::string(key) + "'");
  if (!it->is_array()) invalid(path + "." + std::string(key), "expected an array");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) invalid(path + "." + std::string(key), "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::int64_t> integers(const json& object, std::string_view key,
                                   const std::string& path) {
  const auto it = object.find(key);
  if (it == object.end()) invalid(path, "missing required field '" + std::string(key) + "'");
  if (!it->is_array()) invalid(path + "." + std::string(key), "expected an array");
  std::vector<std::int64_t> out;
  for (const auto& v : *it) {
    if (!v.is_number_integer())
      invalid(path + "." + std::string(key), "expected an array of integers");
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

Hyperparameters parse_prior(Family family, const json& prior) {
  const std::string path = "model.prior";
  switch (family) {
    case Family::beta_binomial:
      check_keys(prior, path, {"a", "b"});
      return BetaParams{number(prior, "a", path), number(prior, "b", path)};
    case Family::dirichlet_multinomial:
      check_keys(prior, path, {"alpha"});
      return DirichletParams{numbers(prior, "alpha", path)};
    case Family::normal_known_variance:
      check_keys(prior, path, {"mean", "variance", "known_variance"});
      return NormalParams{number(prior, "mean", path), number(prior, "variance", path),
                          number(prior, "known_variance", path, 1.0)};
    case Family::normal_mean_variance:
      check_keys(prior, path, {"mean", "kappa", "shape", "scale"});
      return NormalInverseGammaParams{number(prior, "mean", path), number(prior, "kappa", path),
                                      number(prior, "shape", path), number(prior, "scale", path)};
    case Family::gamma_poisson:
      check_keys(prior, path, {"shape", "rate"});
      return GammaParams{number(prior, "shape", path), number(prior, "rate", path)};
    case Family::custom: break;
  }
  invalid("model.family", "custom models cannot be described in a spec file");
}

DataSet parse_data(Family family, const Hyperparameters& prior, const json& data) {
  const std::string path = "model.data";
  if (data.contains("observations")) {
    check_keys(data, path, {"observations"});
    const std::vector<double> obs = numbers(data, "observations", path);
    std::size_t categories = 0;
    if (const auto* d = std::get_if<DirichletParams>(&prior)) categories = d->alpha.size();
    return DataSet::from_observations(family, obs, categories);
  }
  switch (family) {
    case Family::beta_binomial:
      check_keys(data, path, {"successes", "trials"});
      return DataSet::binomial(integer(data, "successes", path), integer(data, "trials", path));
    case Family::dirichlet_multinomial:
      check_keys(data, path, {"counts"});
      return DataSet::multinomial(integers(data, "counts", path));
    case Family::normal_known_variance:
    case Family::normal_mean_variance:
      check_keys(data, path, {"n", "sum", "sum_squares"});
      return DataSet::normal(family, integer(data, "n", path), number(data, "sum", path),
                             number(data, "sum_squares", path,
                                    family == Family::normal_known_variance
                                        ? std::optional<double>(0.0)
                                        : std::nullopt));
    case Family::gamma_poisson:
      check_keys(data, path, {"total", "exposure"});
      return DataSet::poisson(integer(data, "total", path), number(data, "exposure", path));
    case Family::custom: break;
  }
  invalid("model.family", "custom models cannot be described in a spec file");
}

HypothesisSpec parse_hypothesis(const json& block) {
  const std::string path = "hypothesis";
  check_keys(block, path, {"type", "fix", "coordinates", "route"});
  HypothesisSpec h;
  h.type = text(block, "type", path);
  if (h.type != "point" && h.type != "hardy_weinberg" && h.type != "equal_means" &&
      h.type != "none") {
    invalid(path + ".type", "unknown hypothesis type '" + h.type + "'");
  }
  if (const auto it = block.find("fix"); it != block.end()) {
    if (!it->is_object()) invalid(path + ".fix", "expected an object of label: value");
    for (const auto& [label, value] : it->items()) {
      if (!value.is_number() || !std::isfinite(value.get<double>()))
        invalid(path + ".fix." + label, "expected a finite number");
      h.fix.emplace_back(label, value.get<double>());
    }
  }
  if (const auto it = block.find("coordinates"); it != block.end()) {
    if (!it->is_array()) invalid(path + ".coordinates", "expected an array of labels");
    for (const auto& v : *it) {
      if (!v.is_string()) invalid(path + ".coordinates", "expected an array of labels");
      h.coordinates.push_back(v.get<std::string>());
    }
  }
  if (h.type == "point" && h.fix.empty()) invalid(path + ".fix", "point hypothesis fixes nothing");
  if (h.type != "point" && !h.fix.empty()) invalid(path + ".fix", "only point hypotheses fix values");
  if (h.type == "equal_means" && h.coordinates.size() < 2)
    invalid(path + ".coordinates", "equal_means needs at least two coordinates");
  try {
    h.route = route_from_string(text(block, "route", path, "auto"));
  } catch (const ValidationError& e) {
    invalid(path + ".route", e.what());
  }
  return h;
}

void parse_sampling(const json& block, EvaluationSettings& s) {
  const std::string path = "sampling";
  check_keys(block, path, {"method", "draws", "seed", "burn_in_fraction", "thin", "step_scale"});
  try {
    s.integration = integration_route_from_string(text(block, "method", path, "auto"));
  } catch (const ValidationError& e) {
    invalid(path + ".method", e.what());
  }
  s.draws = count(block, "draws", path, s.draws);
  if (s.draws == 0) invalid(path + ".draws", "must be positive");
  if (const auto it = block.find("seed"); it != block.end()) {
    const bool nonnegative =
        it->is_number_unsigned() || (it->is_number_integer() && it->get<std::int64_t>() >= 0);
    if (!nonnegative) invalid(path + ".seed", "expected a nonnegative integer");
    s.seed = it->get<std::uint64_t>();
  }
  s.tuning.burn_in_fraction = number(block, "burn_in_fraction", path, s.tuning.burn_in_fraction);
  if (!(s.tuning.burn_in_fraction >= 0.0 && s.tuning.burn_in_fraction < 1.0))
    invalid(path + ".burn_in_fraction", "must lie in [0, 1)");
  s.tuning.thin = count(block, "thin", path, s.tuning.thin);
  if (s.tuning.thin == 0) invalid(path + ".thin", "must be positive");
  s.tuning.step_scale = number(block, "step_scale", path, s.tuning.step_scale);
  if (!(s.tuning.step_scale > 0.0)) invalid(path + ".step_scale", "must be positive");
}

}  // namespace

TestSpec parse_test_spec(const json& document) {
  if (!document.is_object()) invalid("spec", "expected a JSON object");
  check_keys(document, "spec",
             {"schema_version", "model", "reference", "hypothesis", "sampling", "optimizer",
              "decision", "calibration", "invariance", "output"});
  if (integer(document, "schema_version", "spec") != kSchemaVersion)
    invalid("spec.schema_version", "unsupported schema version");

  TestSpec spec;
  const json& model = require_object(document, "model", "spec");
  check_keys(model, "model", {"family", "prior", "data"});
  Family family;
  try {
    family = family_from_string(text(model, "family", "model"));
  } catch (const ValidationError& e) {
    invalid("model.family", e.what());
  }
  spec.prior = parse_prior(family, require_object(model, "prior", "model"));
  validate(spec.prior);
  if (model.contains("data"))
    spec.data = parse_data(family, spec.prior, require_object(model, "data", "model"));

  try {
    spec.reference = reference_kind_from_string(text(document, "reference", "spec", "uniform"));
  } catch (const ValidationError& e) {
    invalid("spec.reference", e.what());
  }
  if (spec.reference == ReferenceKind::custom)
    invalid("spec.reference", "custom references need a programmatic model");

  spec.hypothesis = parse_hypothesis(require_object(document, "hypothesis", "spec"));

  if (document.contains("sampling")) parse_sampling(require_object(document, "sampling", "spec"), spec.settings);
  spec.settings.optimizer.seed = spec.settings.seed;

  if (document.contains("optimizer")) {
    const json& block = require_object(document, "optimizer", "spec");
    check_keys(block, "optimizer", {"starts", "max_evaluations"});
    spec.settings.optimizer.starts = count(block, "starts", "optimizer", spec.settings.optimizer.starts);
    spec.settings.optimizer.max_evaluations =
        count(block, "max_evaluations", "optimizer", spec.settings.optimizer.max_evaluations);
    if (spec.settings.optimizer.starts == 0) invalid("optimizer.starts", "must be positive");
    if (spec.settings.optimizer.max_evaluations < 10)
      invalid("optimizer.max_evaluations", "must be at least 10");
  }
  spec.settings.route = spec.hypothesis.route;

  if (document.contains("decision")) {
    const json& block = require_object(document, "decision", "spec");
    check_keys(block, "decision", {"c1", "c2"});
    spec.settings.thresholds.c1 = number(block, "c1", "decision", spec.settings.thresholds.c1);
    spec.settings.thresholds.c2 = number(block, "c2", "decision", spec.settings.thresholds.c2);
    try {
      spec.settings.thresholds.validate();
    } catch (const ValidationError& e) {
      invalid("decision", e.what());
    }
  }

  if (document.contains("calibration")) {
    const json& block = require_object(document, "calibration", "spec");
    check_keys(block, "calibration", {"n_grid", "replicates", "alpha", "theta0"});
    StudySpec study;
    study.n_grid = integers(block, "n_grid", "calibration");
    for (auto n : study.n_grid)
      if (n <= 0) invalid("calibration.n_grid", "sample sizes must be positive");
    study.replicates = count(block, "replicates", "calibration", study.replicates);
    study.alpha = number(block, "alpha", "calibration", study.alpha);
    if (!(study.alpha >= 0.0 && study.alpha < 1.0)) invalid("calibration.alpha", "must lie in [0, 1)");
    study.theta0 = numbers(block, "theta0", "calibration");
    spec.study = std::move(study);
  }

  if (document.contains("invariance")) {
    const json& block = require_object(document, "invariance", "spec");
    check_keys(block, "invariance", {"map"});
    spec.invariance_map = text(block, "map", "invariance");
  }

  if (document.contains("output")) {
    const json& block = require_object(document, "output", "spec");
    check_keys(block, "output", {"report", "w_curve"});
    if (block.contains("report")) spec.report_path = text(block, "report", "output");
    if (block.contains("w_curve")) spec.w_curve_path = text(block, "w_curve", "output");
  }
  return spec;
}

TestSpec load_test_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file '" + path.string() + "'");
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("spec file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_test_spec(document);
}

namespace {

std::size_t label_index(const ParameterSpace& space, const std::string& label) {
  if (const auto k = space.index_of(label)) return *k;
  std::string known;
  for (const auto& l : space.labels()) known += (known.empty() ? "" : ", ") + l;
  throw ValidationError("hypothesis: unknown coordinate '" + label + "' (known: " + known + ")");
}

}  // namespace

Hypothesis build_hypothesis(const HypothesisSpec& spec, const ParameterSpace& space,
                            const std::optional<Box>& search_box) {
  if (spec.type == "point") {
    std::vector<std::pair<std::size_t, double>> fixings;
    for (const auto& [label, value] : spec.fix) fixings.emplace_back(label_index(space, label), value);
    return Hypothesis::point(space, fixings, search_box);
  }
  if (spec.type == "hardy_weinberg") return Hypothesis::hardy_weinberg(space);
  if (spec.type == "equal_means") {
    std::vector<std::size_t> coords;
    for (const auto& label : spec.coordinates) coords.push_back(label_index(space, label));
    return Hypothesis::equal_coordinates(space, coords);
  }
  if (spec.type == "none") return Hypothesis::whole_space(space, search_box);
  throw ValidationError("unknown hypothesis type '" + spec.type + "'");
}

namespace {

std::vector<double> to_vector(const Point& p) { return {p.data(), p.data() + p.size()}; }

double safe_exp(double log_value) {
  const double v = std::exp(log_value);
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

std::optional<double> finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return std::nullopt;
}

EvalReport make_report(const Evaluation& e, const SurpriseFunction& sf, const Hypothesis& hypothesis,
                       const EvaluationSettings& settings) {
  EvalReport r;
  r.version = version_string();
  r.family = std::string(to_string(sf.posterior().family()));
  r.reference = std::string(to_string(sf.reference().kind()));
  r.hypothesis = hypothesis.name();
  r.labels = sf.space().labels();
  r.theta_star = to_vector(e.constrained.maximizer);
  r.log_s_star = finite_or_null(e.log_s_star);
  r.s_star = e.log_s_star == -kInf ? 0.0 : safe_exp(e.log_s_star);
  r.theta_hat = to_vector(e.global.maximizer);
  r.log_s_hat = finite_or_null(e.log_s_hat);
  r.s_hat = e.log_s_hat == -kInf ? 0.0 : safe_exp(e.log_s_hat);
  r.ev = e.estimate.ev;
  r.ev_bar = e.estimate.ev_bar;
  r.standard_error = e.estimate.standard_error;
  r.draws = e.estimate.draws;
  r.method = std::string(to_string(e.estimate.method));
  r.t = e.t;
  r.h = e.h;
  r.sev = e.sev;
  if (e.decision) r.decision = std::string(to_string(e.decision->verdict));
  r.c1 = settings.thresholds.c1;
  r.c2 = settings.thresholds.c2;
  r.mode_attained = e.mode_attained;
  r.route = std::string(to_string(e.constrained.route));
  r.optimizer_status = std::string(to_string(e.constrained.status));
  r.constraint_residual = e.constrained.constraint_residual;
  r.sampler.kind = std::string(to_string(e.integration));
  r.sampler.effective_size = e.effective_size;
  if (e.mcmc) {
    r.sampler.acceptance_rate = e.mcmc->acceptance_rate;
    r.sampler.burn_in = e.mcmc->burn_in;
    r.sampler.thin = e.mcmc->thin;
    r.sampler.warnings = e.mcmc->warnings;
  }
  r.seed = settings.seed;
  return r;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j, std::string_view key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

Scenario scenario_of(const TestSpec& spec) {
  const PosteriorModel prior_model = PosteriorModel::from_hyperparameters(spec.prior);
  Scenario s{spec.prior, spec.reference,
             build_hypothesis(spec.hypothesis, prior_model.space(), prior_model.search_box()),
             spec.settings};
  if (s.settings.integration == IntegrationRoute::automatic && prior_model.space().dimension() <= 2)
    s.settings.integration = IntegrationRoute::quadrature;
  return s;
}

const DataSet& data_of(const TestSpec& spec) {
  if (!spec.data) throw ValidationError("model: missing required field 'data'");
  return *spec.data;
}

const StudySpec& study_of(const TestSpec& spec) {
  if (!spec.study) throw ValidationError("spec has no calibration block");
  if (spec.study->n_grid.empty()) throw ValidationError("calibration.n_grid: must be nonempty");
  return *spec.study;
}

Point theta0_of(const StudySpec& study) {
  return Eigen::Map<const Eigen::VectorXd>(study.theta0.data(),
                                           static_cast<Eigen::Index>(study.theta0.size()));
}

}  // namespace

json hashable_section(const EvalReport& r) {
  json sampler = {{"kind", r.sampler.kind},
                  {"effective_size", optional_json(r.sampler.effective_size)},
                  {"acceptance_rate", optional_json(r.sampler.acceptance_rate)},
                  {"burn_in", optional_json(r.sampler.burn_in)},
                  {"thin", optional_json(r.sampler.thin)},
                  {"warnings", r.sampler.warnings}};
  return json{{"version", r.version},
              {"family", r.family},
              {"reference", r.reference},
              {"hypothesis", r.hypothesis},
              {"labels", r.labels},
              {"theta_star", r.theta_star},
              {"s_star", r.s_star},
              {"log_s_star", optional_json(r.log_s_star)},
              {"theta_hat", r.theta_hat},
              {"s_hat", r.s_hat},
              {"log_s_hat", optional_json(r.log_s_hat)},
              {"ev", r.ev},
              {"ev_bar", r.ev_bar},
              {"standard_error", r.standard_error},
              {"draws", r.draws},
              {"method", r.method},
              {"t", r.t},
              {"h", r.h},
              {"sev", optional_json(r.sev)},
              {"decision", optional_json(r.decision)},
              {"thresholds", {{"c1", r.c1}, {"c2", r.c2}}},
              {"mode_attained", r.mode_attained},
              {"route", r.route},
              {"optimizer_status", r.optimizer_status},
              {"constraint_residual", r.constraint_residual},
              {"sampler", sampler},
              {"w_curve", optional_json(r.w_curve)},
              {"seed", r.seed}};
}

json to_json(const EvalReport& r) {
  return json{{"report", hashable_section(r)},
              {"runtime", {{"wall_clock_seconds", r.wall_clock_seconds}}}};
}

EvalReport eval_report_from_json(const json& document) {
  try {
    const json& j = document.at("report");
    EvalReport r;
    r.version = j.at("version").get<std::string>();
    r.family = j.at("family").get<std::string>();
    r.reference = j.at("reference").get<std::string>();
    r.hypothesis = j.at("hypothesis").get<std::string>();
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.theta_star = j.at("theta_star").get<std::vector<double>>();
    r.s_star = j.at("s_star").get<double>();
    r.log_s_star = optional_from<double>(j, "log_s_star");
    r.theta_hat = j.at("theta_hat").get<std::vector<double>>();
    r.s_hat = j.at("s_hat").get<double>();
    r.log_s_hat = optional_from<double>(j, "log_s_hat");
    r.ev = j.at("ev").get<double>();
    r.ev_bar = j.at("ev_bar").get<double>();
    r.standard_error = j.at("standard_error").get<double>();
    r.draws = j.at("draws").get<std::size_t>();
    r.method = j.at("method").get<std::string>();
    r.t = j.at("t").get<std::size_t>();
    r.h = j.at("h").get<std::size_t>();
    r.sev = optional_from<double>(j, "sev");
    r.decision = optional_from<std::string>(j, "decision");
    r.c1 = j.at("thresholds").at("c1").get<double>();
    r.c2 = j.at("thresholds").at("c2").get<double>();
    r.mode_attained = j.at("mode_attained").get<bool>();
    r.route = j.at("route").get<std::string>();
    r.optimizer_status = j.at("optimizer_status").get<std::string>();
    r.constraint_residual = j.at("constraint_residual").get<double>();
    const json& s = j.at("sampler");
    r.sampler.kind = s.at("kind").get<std::string>();
    r.sampler.effective_size = optional_from<double>(s, "effective_size");
    r.sampler.acceptance_rate = optional_from<double>(s, "acceptance_rate");
    r.sampler.burn_in = optional_from<std::size_t>(s, "burn_in");
    r.sampler.thin = optional_from<std::size_t>(s, "thin");
    r.sampler.warnings = s.at("warnings").get<std::vector<std::string>>();
    r.w_curve = optional_from<std::string>(j, "w_curve");
    r.seed = j.at("seed").get<std::uint64_t>();
    r.wall_clock_seconds = document.at("runtime").at("wall_clock_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

RunOutput run_test(const TestSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const PosteriorModel model = conjugate_posterior_update(spec.prior, data_of(spec));
  const SurpriseFunction sf(model, ReferenceDensity::of_kind(spec.reference, model));
  const Hypothesis hypothesis = build_hypothesis(spec.hypothesis, model.space(), model.search_box());
  EvaluationSettings settings = spec.settings;
  settings.keep_truth_function = spec.w_curve_path.has_value();
  const Evaluation e = evaluate(sf, hypothesis, settings);

  RunOutput out;
  out.report = make_report(e, sf, hypothesis, settings);
  if (spec.w_curve_path && e.truth) {
    std::ostringstream csv;
    write_truth_curve_csv(csv, *e.truth);
    out.w_curve_csv = csv.str();
    out.report.w_curve = spec.w_curve_path->string();
  }
  out.report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

CalibrationTable run_calibration(const TestSpec& spec) {
  const StudySpec& study = study_of(spec);
  const Scenario scenario = scenario_of(spec);
  CalibrationTable table;
  for (const std::int64_t n : study.n_grid) {
    table.rows.push_back(calibrate_critical_level(scenario, theta0_of(study), n, study.replicates,
                                                  study.alpha, spec.settings.seed,
                                                  spec.settings.threads));
  }
  return table;
}

ConsistencyTable run_consistency_study(const TestSpec& spec) {
  const StudySpec& study = study_of(spec);
  return consistency_study(scenario_of(spec), theta0_of(study), study.n_grid, study.replicates,
                           spec.settings.seed, spec.settings.threads);
}

InvarianceResult run_invariance_check(const TestSpec& spec, const std::string& map_name) {
  const PosteriorModel model = conjugate_posterior_update(spec.prior, data_of(spec));
  const SurpriseFunction sf(model, ReferenceDensity::of_kind(spec.reference, model));
  const Hypothesis hypothesis = build_hypothesis(spec.hypothesis, model.space(), model.search_box());
  const Reparameterization map = Reparameterization::by_name(map_name, model.space());

  const auto timed = [&](const SurpriseFunction& f, const Hypothesis& h) {
    const auto start = std::chrono::steady_clock::now();
    EvalReport r = make_report(evaluate(f, h, spec.settings), f, h, spec.settings);
    r.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };

  InvarianceResult result;
  result.map = map.name();
  result.original = timed(sf, hypothesis);
  result.transformed = timed(pushforward(sf, map), hypothesis.pushforward(map));
  result.delta_ev = std::abs(result.transformed.ev - result.original.ev);
  const bool quadrature = spec.settings.integration == IntegrationRoute::quadrature;
  result.tolerance = quadrature ? 1e-5
                                : 3.0 * std::hypot(result.original.standard_error,
                                                   result.transformed.standard_error);
  result.passed = result.delta_ev < result.tolerance || result.delta_ev == 0.0;
  return result;
}

json to_json(const InvarianceResult& r) {
  return json{{"invariance",
               {{"map", r.map},
                {"delta_ev", r.delta_ev},
                {"tolerance", r.tolerance},
                {"passed", r.passed},
                {"original", hashable_section(r.original)},
                {"transformed", hashable_section(r.transformed)}}},
              {"runtime",
               {{"wall_clock_seconds", r.original.wall_clock_seconds + r.transformed.wall_clock_seconds}}}};
}

std::string qq_table_csv(std::size_t t, const std::vector<std::size_t>& hs, std::size_t points) {
  if (t == 0) throw ValidationError("t must be positive");
  if (hs.empty()) throw ValidationError("at least one h is required");
  if (points < 2) throw ValidationError("at least two grid points are required");
  for (std::size_t h : hs)
    if (h > t) throw ValidationError("h must not exceed t");
  std::ostringstream out;
  out.precision(17);
  out << 'c';
  for (std::size_t h : hs) out << ",qq_t" << t << "_h" << h;
  out << '\n';
  for (std::size_t i = 0; i < points; ++i) {
    const double c = static_cast<double>(i) / static_cast<double>(points - 1);
    out << c;
    for (std::size_t h : hs) out << ',' << qq_confidence(t, h, c);
    out << '\n';
  }
  return out.str();
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + temp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw Error("failed writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(temp, path, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw Error("cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace fbst
