// Command-line front end: computes the limit constants of the fOU
// least-squares drift estimator, verifies the decay claims behind its normal
// approximation on horizon ladders, runs the Monte Carlo distance
// experiments and samples fBm increment batches.
//
// Exit codes: 0 success, 2 usage, 3 assertion failure, 4 numeric failure.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "fouest/constants.hpp"
#include "fouest/errors.hpp"
#include "fouest/kernels.hpp"
#include "fouest/limits.hpp"
#include "fouest/mc.hpp"
#include "fouest/report.hpp"
#include "fouest/sampler.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitAssertion = 3;
constexpr int kExitNumeric = 4;

json json_reports(const std::vector<fouest::LimitReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back({{"name", r.constant_name},
                   {"computed", r.computed_value},
                   {"reference", r.reference_value},
                   {"tolerance", r.tolerance},
                   {"observed_rate", r.observed_rate},
                   {"extrapolated", r.extrapolated_value},
                   {"pass", r.pass},
                   {"note", r.note}});
  }
  return arr;
}

void series_from_rows(const std::vector<fouest::SeriesRow>& rows, fouest::CsvTable& csv,
                      json& jseries) {
  jseries = json::array();
  for (const auto& row : rows) {
    if (csv.header.empty()) {
      csv.header.push_back("horizon");
      for (const auto& [name, _] : row.cols) csv.header.push_back(name);
    }
    std::vector<double> line{row.horizon};
    json jrow{{"horizon", row.horizon}};
    for (const auto& [name, value] : row.cols) {
      line.push_back(value);
      jrow[name] = value;
    }
    csv.rows.push_back(std::move(line));
    jseries.push_back(std::move(jrow));
  }
}

struct CommonOpts {
  double hurst = 0.25;
  double theta = 1.0;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
};

int run_limits(const CommonOpts& opt, double horizon) {
  const double s2 = fouest::sigma2(opt.hurst);
  const double a = fouest::a_limit(opt.hurst, opt.theta);
  const double dh = fouest::delta_h(opt.hurst);
  fouest::ReportBundle bundle;
  bundle.command = "limits";
  json values{{"sigma2", s2},
              {"a_limit", a},
              {"delta_h", dh},
              {"beta_rate", fouest::beta_rate(opt.hurst)}};
  std::vector<double> row{s2, a, dh, fouest::beta_rate(opt.hurst)};
  bundle.series.header = {"sigma2", "a_limit", "delta_h", "beta_rate"};
  if (horizon > 0.0) {
    const fouest::HurstModel model(opt.hurst, opt.theta, horizon);
    const fouest::BtDetail bt = fouest::bt_quadrature_detail(model, 1e-10);
    values["b_t"] = bt.value;
    values["b_t_transient"] = bt.b1;
    values["b_t_main"] = bt.b2;
    bundle.series.header.insert(bundle.series.header.end(),
                                {"b_t", "b_t_transient", "b_t_main"});
    row.insert(row.end(), {bt.value, bt.b1, bt.b2});
  }
  bundle.series.rows.push_back(row);
  bundle.report = {{"schema_version", fouest::kSchemaVersion},
                   {"command", "limits"},
                   {"inputs",
                    {{"hurst", opt.hurst}, {"theta", opt.theta}, {"horizon", horizon}}},
                   {"values", values},
                   {"pass", true},
                   {"metadata", {{"tool_version", fouest::kToolVersion}, {"seed", opt.seed}}}};
  bundle.write(opt.out_dir);
  return kExitOk;
}

int run_lemmas(const CommonOpts& opt, const std::string& id_str,
               const std::vector<double>& ladder, double cells_per_time) {
  const fouest::LemmaId id = fouest::lemma_from_string(id_str);
  const fouest::LemmaVerification v =
      fouest::verify_lemma(id, opt.hurst, opt.theta, ladder, cells_per_time);
  fouest::ReportBundle bundle;
  bundle.command = "lemmas";
  json jseries;
  series_from_rows(v.series, bundle.series, jseries);
  bundle.report = {{"schema_version", fouest::kSchemaVersion},
                   {"command", "lemmas"},
                   {"inputs",
                    {{"id", id_str},
                     {"hurst", opt.hurst},
                     {"theta", opt.theta},
                     {"t_ladder", ladder},
                     {"cells_per_time", cells_per_time}}},
                   {"values", {{"reports", json_reports(v.reports)}}},
                   {"series", jseries},
                   {"pass", v.pass},
                   {"metadata", {{"tool_version", fouest::kToolVersion}, {"seed", opt.seed}}}};
  bundle.write(opt.out_dir);
  return v.pass ? kExitOk : kExitAssertion;
}

int run_psi(const CommonOpts& opt, const std::vector<double>& ladder,
            double cells_per_time) {
  std::vector<fouest::PsiReport> reports;
  for (const double T : ladder) {
    const fouest::HurstModel model(opt.hurst, opt.theta, T);
    const int n = std::max(64, static_cast<int>(std::lround(cells_per_time * T)));
    reports.push_back(fouest::psi_stats(model, n));
  }
  bool pass = true;
  for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
    const auto& a = reports[i];
    const auto& b = reports[i + 1];
    pass = pass && (b.psi1 < a.psi1 + a.error1 + b.error1) &&
           (b.psi2 < a.psi2 + a.error2 + b.error2) &&
           (b.psi3 < a.psi3 + a.error3 + b.error3);
  }
  fouest::ReportBundle bundle;
  bundle.command = "psi";
  bundle.series.header = {"horizon", "b_t",    "psi1",   "psi2",
                          "psi3",    "error1", "error2", "error3"};
  json jseries = json::array();
  for (const auto& r : reports) {
    bundle.series.rows.push_back(
        {r.horizon, r.bt, r.psi1, r.psi2, r.psi3, r.error1, r.error2, r.error3});
    jseries.push_back({{"horizon", r.horizon},
                       {"b_t", r.bt},
                       {"psi1", r.psi1},
                       {"psi2", r.psi2},
                       {"psi3", r.psi3},
                       {"error1", r.error1},
                       {"error2", r.error2},
                       {"error3", r.error3}});
  }
  bundle.report = {{"schema_version", fouest::kSchemaVersion},
                   {"command", "psi"},
                   {"inputs",
                    {{"hurst", opt.hurst},
                     {"theta", opt.theta},
                     {"t_ladder", ladder},
                     {"cells_per_time", cells_per_time}}},
                   {"series", jseries},
                   {"pass", pass},
                   {"metadata", {{"tool_version", fouest::kToolVersion}, {"seed", opt.seed}}}};
  bundle.write(opt.out_dir);
  return pass ? kExitOk : kExitAssertion;
}

int run_berry_esseen(const CommonOpts& opt, const std::vector<double>& ladder, int m,
                     double cells_per_time, double alpha, const std::string& estimator,
                     const std::string& batch_dir) {
  fouest::ReplicationPlan plan;
  plan.hurst = opt.hurst;
  plan.theta = opt.theta;
  plan.t_ladder = ladder;
  plan.m = m;
  plan.cells_per_time = cells_per_time;
  plan.seed = opt.seed;
  plan.alpha = alpha;
  plan.estimator = estimator == "lse" ? fouest::EstimatorKind::discrete_lse
                                      : fouest::EstimatorKind::chaos_ratio;
  plan.batch_dir = batch_dir;
  const fouest::BerryEsseenReport rep = fouest::mc_run(plan);

  fouest::ReportBundle bundle;
  bundle.command = "berry-esseen";
  bundle.series.header = {"horizon",  "grid_n",   "m_effective",
                          "distance", "dkw",      "excluded",
                          "negative_denominators", "stat_mean",
                          "stat_variance",         "bias_probe_mean_absdiff",
                          "b_t"};
  json jseries = json::array();
  for (const auto& td : rep.per_t) {
    bundle.series.rows.push_back({td.horizon, double(td.grid_n), double(td.m_effective),
                                  td.distance, td.dkw, double(td.excluded),
                                  double(td.negative_denominators), td.stat_mean,
                                  td.stat_variance, td.bias_probe_mean_absdiff, td.bt});
    jseries.push_back({{"horizon", td.horizon},
                       {"grid_n", td.grid_n},
                       {"m_effective", td.m_effective},
                       {"distance", td.distance},
                       {"dkw", td.dkw},
                       {"excluded", td.excluded},
                       {"negative_denominators", td.negative_denominators},
                       {"stat_mean", td.stat_mean},
                       {"stat_variance", td.stat_variance},
                       {"bias_probe_mean_absdiff", td.bias_probe_mean_absdiff},
                       {"b_t", td.bt}});
  }
  bundle.report = {{"schema_version", fouest::kSchemaVersion},
                   {"command", "berry-esseen"},
                   {"inputs",
                    {{"hurst", opt.hurst},
                     {"theta", opt.theta},
                     {"t_ladder", ladder},
                     {"m", m},
                     {"cells_per_time", cells_per_time},
                     {"alpha", alpha},
                     {"estimator", estimator},
                     {"batch_dir", batch_dir}}},
                   {"values",
                    {{"fitted_exponent", rep.fitted_exponent},
                     {"predicted_beta", rep.predicted_beta},
                     {"mc_floor", rep.mc_floor},
                     {"decay_pass", rep.decay_pass},
                     {"note", rep.note}}},
                   {"series", jseries},
                   {"pass", rep.decay_pass},
                   {"metadata", {{"tool_version", fouest::kToolVersion}, {"seed", opt.seed}}}};
  bundle.write(opt.out_dir);
  return rep.decay_pass ? kExitOk : kExitAssertion;
}

int run_sample(const CommonOpts& opt, double horizon, int n, int m,
               const std::string& method, const std::string& out_file) {
  const fouest::HurstModel model(opt.hurst, opt.theta, horizon);
  const fouest::SamplerMethod sm = method == "cholesky" ? fouest::SamplerMethod::cholesky
                                                        : fouest::SamplerMethod::circulant;
  const fouest::SamplerConfig cfg{sm, opt.seed, n, model};
  double clamped_mass = 0.0;
  if (sm == fouest::SamplerMethod::circulant)
    clamped_mass =
        fouest::circulant_plan(model, fouest::UniformGrid(n, horizon)).clamped_mass_fraction;
  const fouest::PathBatch batch = sm == fouest::SamplerMethod::cholesky
                                      ? fouest::sample_cholesky(cfg, m)
                                      : fouest::sample_circulant(cfg, m);
  fouest::write_batch(batch, out_file);
  const Eigen::VectorXd terminal = batch.increments.rowwise().sum();
  const double mean = terminal.mean();
  const double var = (terminal.array() - mean).square().sum() / (m - 1);
  fouest::ReportBundle bundle;
  bundle.command = "sample";
  bundle.series.header = {"n", "m", "terminal_mean", "terminal_variance",
                          "target_terminal_variance"};
  const double target = std::pow(horizon, 2.0 * opt.hurst);
  bundle.series.rows.push_back({double(n), double(m), mean, var, target});
  bundle.report = {{"schema_version", fouest::kSchemaVersion},
                   {"command", "sample"},
                   {"inputs",
                    {{"hurst", opt.hurst},
                     {"theta", opt.theta},
                     {"horizon", horizon},
                     {"n", n},
                     {"m", m},
                     {"method", method},
                     {"out", out_file}}},
                   {"values",
                    {{"n", n},
                     {"m", m},
                     {"terminal_mean", mean},
                     {"terminal_variance", var},
                     {"target_terminal_variance", target},
                     {"clamped_eigenvalue_mass", clamped_mass}}},
                   {"pass", true},
                   {"metadata", {{"tool_version", fouest::kToolVersion}, {"seed", opt.seed}}}};
  bundle.write(opt.out_dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerics for the fOU least-squares drift estimator, H in (0, 1/2)"};
  app.require_subcommand(1);

  CommonOpts opt;
  std::vector<double> ladder{5, 10, 20, 40};
  double horizon = 0.0;
  double cells_per_time = 8.0;
  int m = 5000;
  double alpha = 0.01;
  int n_cells = 256;
  std::string lemma_id = "L32";
  std::string estimator = "chaos";
  std::string method = "circulant";
  std::string batch_dir;
  std::string out_file = "batch.bin";

  auto add_common = [&](CLI::App* cmd, bool hurst_open_half) {
    cmd->add_option("--hurst", opt.hurst, "Hurst parameter")
        ->check(hurst_open_half ? CLI::Range(1e-6, 0.5 - 1e-12)
                                : CLI::Range(1e-6, 1.0 - 1e-12))
        ->capture_default_str();
    cmd->add_option("--theta", opt.theta, "drift parameter")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out-dir", opt.out_dir, "report directory")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
  };

  CLI::App* limits = app.add_subcommand("limits", "limit constants sigma2, a, delta_H");
  add_common(limits, true);
  limits->add_option("--horizon", horizon, "also evaluate b_T at this horizon")
      ->check(CLI::NonNegativeNumber);

  CLI::App* lemmas = app.add_subcommand("lemmas", "horizon-ladder decay verification");
  add_common(lemmas, true);
  lemmas->add_option("--id", lemma_id, "L31|L32|L33|C34|L35")->capture_default_str();
  lemmas->add_option("--tladder", ladder, "horizons (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  lemmas->add_option("--grid-density", cells_per_time, "grid cells per unit time")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* psi = app.add_subcommand("psi", "Kim-Park statistics over a horizon ladder");
  add_common(psi, true);
  psi->add_option("--tladder", ladder, "horizons")->delimiter(',')->capture_default_str();
  psi->add_option("--grid-density", cells_per_time, "grid cells per unit time")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* be = app.add_subcommand("berry-esseen",
                                    "Monte Carlo Kolmogorov distances of the statistic");
  add_common(be, true);
  be->add_option("--tladder", ladder, "horizons")->delimiter(',')->capture_default_str();
  be->add_option("--paths", m, "replicates per horizon")
      ->check(CLI::Range(100, 100000000))
      ->capture_default_str();
  be->add_option("--cells-per-time", cells_per_time, "grid cells per unit time")
      ->check(CLI::PositiveNumber);
  be->add_option("--alpha", alpha, "DKW confidence level")
      ->check(CLI::Range(1e-6, 0.5))
      ->capture_default_str();
  be->add_option("--estimator", estimator, "chaos|lse")
      ->check(CLI::IsMember({"chaos", "lse"}))
      ->capture_default_str();
  be->add_option("--batch-dir", batch_dir, "directory of pre-sampled paths_T<T>.bin");

  CLI::App* sample = app.add_subcommand("sample", "write an fBm increment batch");
  add_common(sample, false);
  sample->add_option("--horizon", horizon, "time horizon")
      ->check(CLI::PositiveNumber)
      ->required();
  sample->add_option("--cells", n_cells, "grid cells")
      ->check(CLI::Range(1, 1 << 22))
      ->capture_default_str();
  sample->add_option("--paths", m, "replicates")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sample->add_option("--method", method, "circulant|cholesky")
      ->check(CLI::IsMember({"circulant", "cholesky"}))
      ->capture_default_str();
  sample->add_option("--out", out_file, "output file")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  // berry-esseen keeps the finer default grid of 50 cells per unit time
  if (be->parsed() && be->count("--cells-per-time") == 0) cells_per_time = 50.0;

  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    if (limits->parsed()) code = run_limits(opt, horizon);
    else if (lemmas->parsed()) code = run_lemmas(opt, lemma_id, ladder, cells_per_time);
    else if (psi->parsed()) code = run_psi(opt, ladder, cells_per_time);
    else if (be->parsed())
      code = run_berry_esseen(opt, ladder, m, cells_per_time, alpha, estimator, batch_dir);
    else if (sample->parsed())
      code = run_sample(opt, horizon, n_cells, m, method, out_file);
  } catch (const fouest::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const fouest::assertion_error& e) {
    std::cerr << "assertion failure: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // stdout only; the report files must be byte-identical across reruns
  std::printf("%s finished in %.2fs (exit %d)\n",
              app.get_subcommands().front()->get_name().c_str(), wall, code);
  return code;
}
