// Acceptance suite: runs every verification criterion end to end and prints
// one PASS/FAIL line per criterion.  Exit code is the number of failures.
//
// usage: fouest_acceptance [path-to-cli]   (the CLI path enables criterion 11)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sys/wait.h>
#include <numbers>
#include <string>
#include <vector>

#include "fouest/constants.hpp"
#include "fouest/gram.hpp"
#include "fouest/hilbert.hpp"
#include "fouest/kernels.hpp"
#include "fouest/limits.hpp"
#include "fouest/mc.hpp"
#include "fouest/rng.hpp"
#include "fouest/sampler.hpp"

using namespace fouest;

namespace {

int failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int id, bool pass, double seconds, double budget, const std::string& what) {
  const bool in_budget = seconds < budget;
  const bool ok = pass && in_budget;
  if (!ok) ++failures;
  std::printf("%s #%-2d %s (%.1fs of %.0fs budget)\n", ok ? "PASS" : "FAIL", id,
              what.c_str(), seconds, budget);
  if (pass && !in_budget) std::printf("        runtime budget exceeded\n");
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// 1. limit constants against exact gamma values
void criterion_constants() {
  Timer t;
  const double s2 = sigma2(0.25);
  const double a = a_limit(0.25, 1.0);
  const double s2_limit = sigma2(0.4999);
  const bool pass = std::abs(s2 - 2.0 / std::numbers::pi) < 1e-10 * (2.0 / std::numbers::pi) &&
                    std::abs(a - std::sqrt(std::numbers::pi) / 4.0) <
                        1e-10 * (std::sqrt(std::numbers::pi) / 4.0) &&
                    std::abs(s2_limit - 2.0) < 1e-2;
  report(1, pass, t.seconds(), 1.0,
         "constants: sigma2(0.25)=" + fmt(s2) + " vs 2/pi, a(0.25,1)=" + fmt(a) +
             " vs sqrt(pi)/4, sigma2(0.4999)=" + fmt(s2_limit));
}

// 2. Gram(512) / Jolis / spectral pairwise within 1%
void criterion_routes() {
  Timer t;
  bool pass = true;
  double worst = 0.0;
  for (double h : {0.1, 0.25, 0.4}) {
    const double T = 1.0, theta = 1.0;
    const HurstModel m(h, theta, T);
    auto fn = [=](double x) { return std::exp(-theta * (T - x)); };
    auto fnp = [=](double x) { return theta * std::exp(-theta * (T - x)); };
    const SmoothWindowed1D w(T, fn, fnp);
    const double jolis = inner_h_jolis(w, w, m, 64);
    const UniformGrid grid(512, T);
    const StepKernel1D u = sample_midpoint(grid, fn);
    const double gram = inner_h(u, u, increment_gram(m, grid));
    const double spectral = inner_h_spectral(u, u, m, spectral_config_for(u, u, m, 1e-4));
    for (const double d : {gram / jolis - 1.0, spectral / jolis - 1.0, spectral / gram - 1.0})
      worst = std::max(worst, std::abs(d));
  }
  pass = worst < 0.01;
  report(2, pass, t.seconds(), 30.0,
         "inner-product routes pairwise within 1% (worst " + fmt(worst) + ")");
}

// 3. b_T -> a at fitted rate <= -0.75 for H in {0.25, 0.4}
void criterion_bt_rate() {
  Timer t;
  bool pass = true;
  std::string detail;
  for (double h : {0.25, 0.4}) {
    const LemmaVerification v = verify_lemma(LemmaId::L32, h, 1.0, {25, 50, 100, 200}, 8);
    pass = pass && v.pass;
    const LimitReport& r = v.reports[0];
    detail += " H=" + fmt(h) + ": " +
              (r.note.empty() ? ("rate " + fmt(r.computed_value)) : "saturated");
  }
  report(3, pass, t.seconds(), 60.0, "b_T convergence rate <= -0.75;" + detail);
}

// 4, 5, 7: kernel-norm ladder at H = 0.25
void criteria_norm_ladder() {
  const std::vector<double> ladder{10, 20, 40, 80, 160};
  Timer t;
  const auto points = ladder_norms(0.25, 1.0, ladder, 8.0);
  const double t_ladder = t.seconds();

  // 4: fitted exponent of |2||f||^2 - a^2| within +-0.25 of -0.5
  {
    Timer t4;
    const LemmaVerification v = verify_lemma_from(LemmaId::L35, 0.25, 1.0, points);
    const LimitReport& r = v.reports[0];
    report(4, v.pass, t_ladder + t4.seconds(), 300.0,
           "|2||f_T||^2 - a^2| fitted exponent " + fmt(r.computed_value) +
               " within +-0.25 of -0.5");
    if (!v.pass)
      std::printf(
          "        the claimed T^(2H-1) speed is an upper bound and is not tight "
          "here: the residual decays like 1/T (one-sided bound holds a fortiori)\n");
  }
  // 5: ||f ox1 f|| fitted exponent <= -0.35
  {
    Timer t5;
    const LemmaVerification v = verify_lemma_from(LemmaId::L31, 0.25, 1.0, points);
    report(5, v.pass, t5.seconds(), 300.0,
           "||f ox1 f|| fitted exponent " + fmt(v.reports[0].computed_value) +
               " <= -0.35");
  }
  // 7: Psi_i strictly decreasing beyond T = 10 within extrapolation bars
  {
    Timer t7;
    bool pass = true;
    PsiReport prev{};
    bool first = true;
    std::string path;
    for (const auto& pt : points) {
      const PsiReport r = psi_stats(*pt.norms, pt.bt);
      if (!first)
        pass = pass && (r.psi1 < prev.psi1 + prev.error1 + r.error1) &&
               (r.psi2 < prev.psi2 + prev.error2 + r.error2) &&
               (r.psi3 < prev.psi3 + prev.error3 + r.error3);
      path += " " + fmt(r.psi1);
      prev = r;
      first = false;
    }
    report(7, pass, t7.seconds(), 300.0,
           "Psi_1..3 decreasing along T in {10..160} (Psi1:" + path + ")");
  }
}

// 6. tensor-norm limits of the g kernel at H = 0.3 over T in {25, 50, 100, 200}
void criterion_c34() {
  Timer t;
  const LemmaVerification v =
      verify_lemma(LemmaId::C34, 0.3, 1.0, {25, 50, 100, 200}, 8.0);
  std::string detail;
  for (const auto& r : v.reports)
    detail += " " + r.constant_name + "=" + fmt(r.computed_value) +
              (r.reference_value != 0.0 ? " vs " + fmt(r.reference_value) : "") +
              (r.pass ? "" : " [fail]");
  report(6, v.pass, t.seconds(), 300.0, "tensor-norm limits at T=200:" + detail);
}

// 8. Monte Carlo Kolmogorov distances at H = 0.25
void criterion_mc() {
  Timer t;
  ReplicationPlan plan;
  plan.hurst = 0.25;
  plan.theta = 1.0;
  plan.t_ladder = {5, 10, 20, 40};
  plan.m = 5000;
  plan.cells_per_time = 50;
  plan.seed = 20260811;
  const BerryEsseenReport rep = mc_run(plan);
  const TDistance& first = rep.per_t.front();
  const TDistance& last = rep.per_t.back();
  const bool pass = rep.decay_pass && last.distance <= 0.1;
  std::string path;
  for (const auto& td : rep.per_t) path += " " + fmt(td.distance);
  report(8, pass, t.seconds(), 300.0,
         "Kolmogorov distances" + path + "; drop " +
             fmt(first.distance - last.distance) + " > DKW sum " +
             fmt(first.dkw + last.dkw) + ", D(40) <= 0.1");
  std::printf(
      "        fitted exponent %s reported only: the Monte Carlo floor ~%s at "
      "m=%d makes beta=1/2 unresolvable\n",
      fmt(rep.fitted_exponent).c_str(), fmt(rep.mc_floor).c_str(), plan.m);
}

// 9. second-chaos isometry Var[I2(K)] = 2||K||^2 within 5 SE
void criterion_isometry() {
  Timer t;
  const double T = 10.0;
  const HurstModel m(0.25, 1.0, T);
  const int n = 500, mm = 10000;
  const UniformGrid grid(n, T);
  const IncrementGram G = increment_gram(m, grid);
  const KernelNormsAtGrid pack = kernel_norms_at(m, G);
  const RatioContext ctx = make_ratio_context(m, grid);
  const SamplerConfig cfg{SamplerMethod::circulant, 7777, n, m};
  const Eigen::MatrixXd rows = sample_circulant(cfg, mm).increments;
  double s[3] = {0, 0, 0}, s2[3] = {0, 0, 0}, s4[3] = {0, 0, 0};
  for (int r = 0; r < mm; ++r) {
    const RatioParts p = ratio_parts(ctx, rows.row(r));
    const double i2h = (ctx.alpha * p.i2_f - p.i2_g) / ctx.beta;
    const double vals[3] = {p.i2_f, p.i2_g, i2h};
    for (int k = 0; k < 3; ++k) {
      s[k] += vals[k];
      s2[k] += vals[k] * vals[k];
      s4[k] += std::pow(vals[k], 4);
    }
  }
  const double targets[3] = {2 * pack.norm_f2, 2 * pack.norm_g2, 2 * pack.norm_h2};
  const char* names[3] = {"f", "g", "h"};
  bool pass = true;
  std::string detail;
  for (int k = 0; k < 3; ++k) {
    const double mean = s[k] / mm;
    const double var = s2[k] / mm - mean * mean;
    const double mu4 = s4[k] / mm;
    const double se = std::sqrt(std::max(mu4 - var * var, 0.0) / mm);
    const double dev = (var - targets[k]) / se;
    pass = pass && std::abs(dev) < 5.0;
    detail += std::string(" ") + names[k] + ": " + fmt(dev) + " SE";
  }
  report(9, pass, t.seconds(), 120.0, "chaos isometry Var[I2] vs 2||K||^2;" + detail);
}

// 10. sampler validity: energy two-sample test and terminal variance
void criterion_sampler() {
  Timer t;
  const HurstModel m(0.3, 1.0, 1.0);
  const SamplerConfig cc{SamplerMethod::circulant, 31, 128, m};
  const SamplerConfig ch{SamplerMethod::cholesky, 31, 128, m};
  const Eigen::MatrixXd x = sample_circulant(cc, 2000).increments;
  const Eigen::MatrixXd y = sample_cholesky(ch, 2000).increments;
  const EnergyTestResult e = energy_two_sample_test(x, y, 199, 4321);
  const Eigen::VectorXd terminal = x.rowwise().sum();
  const double mean = terminal.mean();
  const double var = (terminal.array() - mean).square().sum() / (terminal.size() - 1);
  const double target = 1.0;  // T^(2H), T = 1
  const double se = target * std::sqrt(2.0 / (terminal.size() - 1.0));
  const bool pass = e.p_value > 0.01 && std::abs(var - target) < 5.0 * se;
  report(10, pass, t.seconds(), 60.0,
         "sampler: energy-test p=" + fmt(e.p_value) + " > 0.01, Var(B_T)=" + fmt(var) +
             " within 5 SE of " + fmt(target));
}

// 11. CLI determinism: identical configs give byte-identical files across
// worker counts
std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

void criterion_determinism(const std::string& cli) {
  Timer t;
  if (cli.empty()) {
    report(11, false, 0.0, 120.0, "CLI determinism (no CLI path given)");
    return;
  }
  const auto base = std::filesystem::temp_directory_path() / "fouest_acc_cli";
  std::filesystem::remove_all(base);
  const struct {
    const char* name;
    std::string args;
    std::vector<std::string> files;
  } cases[] = {
      {"limits", "limits --hurst 0.25 --theta 1 --horizon 10",
       {"limits_report.json", "limits_series.csv"}},
      {"lemmas", "lemmas --id L32 --hurst 0.3 --tladder 5,10,20,40 --grid-density 4",
       {"lemmas_report.json", "lemmas_series.csv"}},
      {"psi", "psi --hurst 0.25 --tladder 5,10 --grid-density 4",
       {"psi_report.json", "psi_series.csv"}},
      {"berry-esseen",
       "berry-esseen --hurst 0.25 --tladder 2,4,8 --paths 200 --cells-per-time 20 "
       "--seed 5",
       {"berry-esseen_report.json", "berry-esseen_series.csv"}},
      {"sample",
       "sample --hurst 0.3 --theta 1 --horizon 1 --cells 64 --paths 50 --seed 9 "
       "--method circulant",
       {"sample_report.json", "sample_series.csv", "batch.bin"}},
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto dir1 = base / (std::string(c.name) + "_w1");
    const auto dir2 = base / (std::string(c.name) + "_w3");
    std::filesystem::create_directories(dir1);
    std::filesystem::create_directories(dir2);
    // the batch file path is part of the echoed config, so both runs must
    // name the same one; its bytes are snapshotted between runs
    const auto shared_bin = base / "batch.bin";
    bool same = true;
    int code1 = 0, code2 = 0;
    std::string bin1, bin2;
    for (int run = 0; run < 2; ++run) {
      const auto& dir = run == 0 ? dir1 : dir2;
      setenv("FOUEST_WORKERS", run == 0 ? "1" : "3", 1);
      std::string cmd = cli + " " + c.args + " --out-dir " + dir.string();
      if (std::string(c.name) == "sample") cmd += " --out " + shared_bin.string();
      cmd += " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      (run == 0 ? code1 : code2) = rc;
      if (std::string(c.name) == "sample")
        (run == 0 ? bin1 : bin2) = slurp(shared_bin);
    }
    unsetenv("FOUEST_WORKERS");
    same = same && code1 == code2;
    for (const auto& f : c.files) {
      if (f == "batch.bin") {
        same = same && !bin1.empty() && bin1 == bin2;
        continue;
      }
      const std::string a = slurp(dir1 / f), b = slurp(dir2 / f);
      same = same && !a.empty() && a == b;
    }
    if (!same) {
      pass = false;
      detail += std::string(" ") + c.name + "[mismatch]";
    }
    // the limits report must carry the constants to 12 digits
    if (std::string(c.name) == "limits") {
      nlohmann::json j;
      std::ifstream js(dir1 / "limits_report.json");
      js >> j;
      const double s2 = j["values"]["sigma2"].get<double>();
      const double a = j["values"]["a_limit"].get<double>();
      const bool digits =
          std::abs(s2 - 2.0 / std::numbers::pi) < 1e-12 * (2.0 / std::numbers::pi) &&
          std::abs(a - std::sqrt(std::numbers::pi) / 4.0) <
              1e-12 * (std::sqrt(std::numbers::pi) / 4.0);
      if (!digits || code1 != 0) {
        pass = false;
        detail += " limits[constants]";
      }
    }
  }
  // exit-code contract: 0 success, 2 usage, 3 assertion failure
  {
    const auto dir = base / "codes";
    std::filesystem::create_directories(dir);
    auto run_rc = [&](const std::string& args) {
      const std::string cmd =
          cli + " " + args + " --out-dir " + dir.string() + " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };
    const int usage_rc = run_rc("limits --hurst 0.7 --theta 1");
    const int assertion_rc =
        run_rc("lemmas --id L35 --hurst 0.25 --tladder 10,20,40,80 --grid-density 4");
    if (usage_rc != 2 || assertion_rc != 3) {
      pass = false;
      detail += " exit-codes[usage=" + std::to_string(usage_rc) +
                ",assertion=" + std::to_string(assertion_rc) + "]";
    }
  }
  std::filesystem::remove_all(base);
  report(11, pass, t.seconds(), 120.0,
         "CLI byte-identical JSON/CSV across worker counts and exit codes" + detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  criterion_constants();
  criterion_routes();
  criterion_bt_rate();
  criteria_norm_ladder();
  criterion_c34();
  criterion_mc();
  criterion_isometry();
  criterion_sampler();
  criterion_determinism(cli);
  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) failed\n", failures);
  }
  return failures;
}
