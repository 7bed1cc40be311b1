#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbst/calibration.hpp"
#include "fbst/pipeline.hpp"

namespace fbst {

std::string version_string();

inline constexpr int kSchemaVersion = 1;

struct HypothesisSpec {
  std::string type = "point";
  /// label -> value, for point hypotheses.
  std::vector<std::pair<std::string, double>> fix;
  /// Coordinate labels for equal_means.
  std::vector<std::string> coordinates;
  ConstrainedRoute route = ConstrainedRoute::automatic;
};

struct StudySpec {
  std::vector<std::int64_t> n_grid;
  std::size_t replicates = 200;
  double alpha = 0.05;
  std::vector<double> theta0;
};

struct TestSpec {
  Hyperparameters prior;
  /// Observed data; studies simulate their own and may omit it.
  std::optional<DataSet> data;
  ReferenceKind reference = ReferenceKind::uniform;
  HypothesisSpec hypothesis;
  EvaluationSettings settings;
  std::optional<StudySpec> study;
  std::optional<std::string> invariance_map;
  std::optional<std::filesystem::path> report_path;
  std::optional<std::filesystem::path> w_curve_path;
};

/// Parses and validates a spec document. Throws ValidationError naming the
/// offending field.
TestSpec parse_test_spec(const nlohmann::json& document);
TestSpec load_test_spec(const std::filesystem::path& path);

/// Resolves the hypothesis block against a parameter space. `search_box`
/// bounds optimizer starts on unbounded coordinates.
Hypothesis build_hypothesis(const HypothesisSpec& spec, const ParameterSpace& space,
                            const std::optional<Box>& search_box = std::nullopt);

struct SamplerSummary {
  std::string kind;
  std::optional<double> effective_size;
  std::optional<double> acceptance_rate;
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> thin;
  std::vector<std::string> warnings;

  bool operator==(const SamplerSummary&) const = default;
};

/// Everything a run produces. Only `wall_clock_seconds` varies between
/// identical runs; it is kept outside the hashable section of the JSON.
struct EvalReport {
  std::string version;
  std::string family;
  std::string reference;
  std::string hypothesis;
  std::vector<std::string> labels;
  std::vector<double> theta_star;
  double s_star = 0.0;
  std::optional<double> log_s_star;
  std::vector<double> theta_hat;
  double s_hat = 0.0;
  std::optional<double> log_s_hat;
  double ev = 0.0;
  double ev_bar = 1.0;
  double standard_error = 0.0;
  std::size_t draws = 0;
  std::string method;
  std::size_t t = 0;
  std::size_t h = 0;
  std::optional<double> sev;
  std::optional<std::string> decision;
  double c1 = 0.05;
  double c2 = 0.95;
  bool mode_attained = false;
  std::string route;
  std::string optimizer_status;
  double constraint_residual = 0.0;
  SamplerSummary sampler;
  std::optional<std::string> w_curve;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;

  bool operator==(const EvalReport&) const = default;
};

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& document);
/// The deterministic part of a report.
nlohmann::json hashable_section(const EvalReport& report);

struct RunOutput {
  EvalReport report;
  /// W-curve CSV when a truth function was built.
  std::optional<std::string> w_curve_csv;
};

RunOutput run_test(const TestSpec& spec);

CalibrationTable run_calibration(const TestSpec& spec);
ConsistencyTable run_consistency_study(const TestSpec& spec);

struct InvarianceResult {
  EvalReport original;
  EvalReport transformed;
  std::string map;
  double delta_ev = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Runs the test in theta and omega = phi(theta) coordinates. Passes when
/// |delta ev| is below 1e-5 on the quadrature route, or 3 combined standard
/// errors on Monte Carlo routes.
InvarianceResult run_invariance_check(const TestSpec& spec, const std::string& map_name);
nlohmann::json to_json(const InvarianceResult& result);

/// CSV of QQ(t, h, c) on an evenly spaced c grid.
std::string qq_table_csv(std::size_t t, const std::vector<std::size_t>& hs, std::size_t points);

/// Writes through a temporary file and a rename.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace fbst
