// fbst: command-line front end for e-value tests and studies.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fbst/errors.hpp"
#include "fbst/harness.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kOtherFailure = 1,
  kValidationFailure = 2,
  kOptimizerFailure = 3,
  kSamplerFailure = 4,
};

struct CommonOptions {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::string format;
};

void add_common(CLI::App& cmd, CommonOptions& o, bool needs_spec) {
  auto* spec = cmd.add_option("--spec", o.spec, "Test specification (JSON)");
  if (needs_spec) spec->required()->check(CLI::ExistingFile);
  cmd.add_option("--out", o.out, "Output path (default: the spec's output path, else stdout)");
  cmd.add_option("--seed", o.seed, "Override the spec's seed");
  cmd.add_option("--threads", o.threads, "Worker threads for replicate-level work")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

fbst::TestSpec load(const CommonOptions& o) {
  fbst::TestSpec spec = fbst::load_test_spec(o.spec);
  if (o.seed) {
    spec.settings.seed = *o.seed;
    spec.settings.optimizer.seed = *o.seed;
  }
  spec.settings.threads = o.threads;
  return spec;
}

void emit(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content << std::flush;
  } else {
    fbst::write_file_atomically(path, content);
  }
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

int run(int argc, char** argv) {
  CLI::App app{"Full Bayesian Significance Test: e-values, decisions and calibration studies"};
  app.set_version_flag("--version", fbst::version_string());
  app.require_subcommand(1);

  CommonOptions test_opts;
  CommonOptions calib_opts;
  CommonOptions consist_opts;
  CommonOptions inv_opts;
  CommonOptions qq_opts;
  std::string map_name;
  std::size_t qq_t = 1;
  std::vector<std::size_t> qq_h{0};
  std::size_t qq_points = 21;

  auto* test = app.add_subcommand("test", "Run one e-value test");
  add_common(*test, test_opts, true);
  auto* calibrate = app.add_subcommand("calibrate", "Empirical critical levels c(n)");
  add_common(*calibrate, calib_opts, true);
  auto* consistency = app.add_subcommand("consistency", "Median ev-bar and KS distance over n");
  add_common(*consistency, consist_opts, true);
  auto* invariance = app.add_subcommand("invariance", "Compare ev before and after a reparameterization");
  add_common(*invariance, inv_opts, true);
  invariance->add_option("--map", map_name,
                         "identity, affine, log, log_odds or stick_breaking (default: spec)");
  auto* qq = app.add_subcommand("qq", "Tabulate QQ(t, h, c)");
  qq->set_help_flag("--help", "Print this help message and exit");
  add_common(*qq, qq_opts, false);
  qq->add_option("--t", qq_t, "Dimension of the parameter space")->check(CLI::PositiveNumber);
  qq->add_option("--h", qq_h, "Hypothesis dimensions")->delimiter(',');
  qq->add_option("--points", qq_points, "Grid points on [0, 1]")->check(CLI::Range(2, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationFailure;
  }

  if (test->parsed()) {
    const fbst::TestSpec spec = load(test_opts);
    const fbst::RunOutput result = fbst::run_test(spec);
    std::string content;
    if (test_opts.format == "csv") {
      const auto& r = result.report;
      std::ostringstream csv;
      csv.precision(17);
      csv << "ev,ev_bar,standard_error,s_star,s_hat,t,h,sev,decision,seed\n"
          << r.ev << ',' << r.ev_bar << ',' << r.standard_error << ',' << r.s_star << ','
          << r.s_hat << ',' << r.t << ',' << r.h << ',';
      if (r.sev) csv << *r.sev;
      csv << ',' << r.decision.value_or("") << ',' << r.seed << '\n';
      content = csv.str();
    } else {
      content = json_text(fbst::to_json(result.report));
    }
    const std::string path =
        !test_opts.out.empty() ? test_opts.out
                               : (spec.report_path ? spec.report_path->string() : std::string());
    if (result.w_curve_csv) fbst::write_file_atomically(*spec.w_curve_path, *result.w_curve_csv);
    emit(content, path);
  } else if (calibrate->parsed()) {
    const fbst::CalibrationTable table = fbst::run_calibration(load(calib_opts));
    std::string content;
    if (calib_opts.format == "json") {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : table.rows)
        rows.push_back({{"n", r.n}, {"c_n", r.critical_level}, {"replicates", r.replicates}, {"seed", r.seed}});
      content = json_text({{"calibration", rows}});
    } else {
      std::ostringstream csv;
      fbst::write_csv(csv, table);
      content = csv.str();
    }
    emit(content, calib_opts.out);
  } else if (consistency->parsed()) {
    const fbst::ConsistencyTable table = fbst::run_consistency_study(load(consist_opts));
    std::string content;
    if (consist_opts.format == "json") {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : table.rows) {
        rows.push_back({{"n", r.n},
                        {"median_ev_bar", r.median_ev_bar},
                        {"ks_statistic", r.ks_statistic},
                        {"replicates", r.replicates}});
      }
      content = json_text({{"consistency", rows}});
    } else {
      std::ostringstream csv;
      fbst::write_csv(csv, table);
      content = csv.str();
    }
    emit(content, consist_opts.out);
  } else if (invariance->parsed()) {
    const fbst::TestSpec spec = load(inv_opts);
    if (map_name.empty()) {
      if (!spec.invariance_map) throw fbst::ValidationError("no map given (--map or invariance.map)");
      map_name = *spec.invariance_map;
    }
    const fbst::InvarianceResult result = fbst::run_invariance_check(spec, map_name);
    std::string content;
    if (inv_opts.format == "csv") {
      std::ostringstream csv;
      csv.precision(17);
      csv << "map,ev_original,ev_transformed,delta_ev,tolerance,passed\n"
          << result.map << ',' << result.original.ev << ',' << result.transformed.ev << ','
          << result.delta_ev << ',' << result.tolerance << ',' << (result.passed ? "true" : "false")
          << '\n';
      content = csv.str();
    } else {
      content = json_text(fbst::to_json(result));
    }
    emit(content, inv_opts.out);
  } else if (qq->parsed()) {
    const std::string csv = fbst::qq_table_csv(qq_t, qq_h, qq_points);
    std::string content = csv;
    if (qq_opts.format == "json") {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < qq_points; ++i) {
        const double c = static_cast<double>(i) / static_cast<double>(qq_points - 1);
        nlohmann::json row = {{"c", c}};
        for (std::size_t h : qq_h) row["h" + std::to_string(h)] = fbst::qq_confidence(qq_t, h, c);
        rows.push_back(row);
      }
      content = json_text({{"t", qq_t}, {"qq", rows}});
    }
    emit(content, qq_opts.out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fbst::ValidationError& e) {
    std::cerr << "fbst: invalid input: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const fbst::OptimizationError& e) {
    std::cerr << "fbst: optimizer failure: " << e.what() << '\n';
    return kOptimizerFailure;
  } catch (const fbst::SamplingError& e) {
    std::cerr << "fbst: sampler failure: " << e.what() << '\n';
    return kSamplerFailure;
  } catch (const std::exception& e) {
    std::cerr << "fbst: " << e.what() << '\n';
    return kOtherFailure;
  }
}
