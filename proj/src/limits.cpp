#include "fouest/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fouest/constants.hpp"
#include "fouest/errors.hpp"
#include "fouest/kernels.hpp"

namespace fouest {

GridValue extrapolate_grid(const std::array<int, 3>& sizes, double coarse, double mid,
                           double fine, double default_rate) {
  GridValue gv;
  gv.grid_sizes = sizes;
  gv.coarse = coarse;
  gv.mid = mid;
  gv.fine = fine;
  const double d1 = coarse - mid;
  const double d2 = mid - fine;
  const double scale = std::max({std::abs(coarse), std::abs(mid), std::abs(fine), 1e-300});
  if (std::abs(d2) <= 1e-14 * scale) {
    gv.extrapolated = fine;
    gv.observed_rate = default_rate;
    gv.error_estimate = std::abs(d2);
    return gv;
  }
  const double ratio = d1 / d2;
  double rate = default_rate;
  double observed = default_rate;
  if (ratio > 1.0) {
    observed = std::log2(ratio);
    if (std::abs(ratio / std::pow(2.0, default_rate) - 1.0) > 0.30)
      rate = std::clamp(observed, 0.05, 4.0);
  }
  gv.observed_rate = observed;
  if (ratio <= 1.0) {
    // refinement not yet in the asymptotic regime; keep the fine value and a
    // conservative error bar
    gv.extrapolated = fine;
    gv.error_estimate = std::abs(d2);
    return gv;
  }
  gv.extrapolated = fine - d2 / (std::pow(2.0, rate) - 1.0);
  gv.error_estimate = std::abs(gv.extrapolated - fine);
  return gv;
}

KernelNormsAtGrid kernel_norms_at(const HurstModel& model, const IncrementGram& gram) {
  if (gram.grid.horizon != model.horizon)
    throw std::invalid_argument("kernel_norms_at: grid and model horizons differ");
  const KernelFamily fam = kernel_family(model);
  const int n = gram.n();
  const double al = fam.alpha();
  const double be = fam.beta();
  const Eigen::MatrixXd& G = gram.entries;

  const Eigen::MatrixXd f = fam.sample_f(gram.grid).values;
  const Eigen::VectorXd v = fam.sample_h_factor(gram.grid).values;

  // Everything reduces to three matrix products plus matrix-vector work:
  //   R = G f, M = f G f, Q = G M,
  //   w = G v, y = f w, z = G y.
  double tr_rr;
  Eigen::MatrixXd M(n, n);
  {
    Eigen::MatrixXd R = G * f;
    tr_rr = R.cwiseProduct(R.transpose()).sum();  // ||f||^2
    M.noalias() = f * R;
  }
  double tr_qq;
  {
    Eigen::MatrixXd Q = G * M;
    tr_qq = Q.cwiseProduct(Q.transpose()).sum();  // ||f ox1 f||^2
  }
  const Eigen::VectorXd w = G * v;
  const Eigen::VectorXd y = f * w;
  const Eigen::VectorXd z = G * y;
  const Eigen::VectorXd mw = M * w;
  const double s0 = v.dot(w);    // ||h-factor||^2 in H
  const double t_fh = w.dot(y);  // <f, h>
  const double y_gy = y.dot(z);
  const double y_w = y.dot(w);
  const double w_mw = w.dot(mw);
  const double z_mw = z.dot(mw);

  KernelNormsAtGrid out;
  out.norm_f2 = tr_rr;
  out.norm_h2 = s0 * s0;
  out.cross_fg = al * tr_rr - be * t_fh;
  out.norm_g2 = al * al * tr_rr - 2.0 * al * be * t_fh + be * be * s0 * s0;
  out.contract_ff2 = tr_qq;
  // f ox1 g = alpha M - beta y v'
  out.contract_fg2 = al * al * tr_qq - 2.0 * al * be * z_mw + be * be * y_gy * s0;
  // g ox1 g = alpha^2 M - alpha beta (y v' + v y') + beta^2 s0 v v'
  out.contract_gg2 = std::pow(al, 4) * tr_qq - 4.0 * std::pow(al, 3) * be * z_mw +
                     2.0 * al * al * be * be * (s0 * w_mw + y_gy * s0 + y_w * y_w) -
                     4.0 * al * std::pow(be, 3) * s0 * s0 * y_w +
                     std::pow(be, 4) * std::pow(s0, 4);
  return out;
}

namespace {

int even_at_least(int n, int floor_n) {
  n = std::max(n, floor_n);
  return n + (n % 2);
}

}  // namespace

KernelNorms kernel_norms(const HurstModel& model, int n) {
  n = even_at_least(n, 32);
  const std::array<int, 3> sizes{n / 2, n, 2 * n};
  KernelNormsAtGrid packs[3];
  for (int k = 0; k < 3; ++k) {
    const UniformGrid grid(sizes[k], model.horizon);
    packs[k] = kernel_norms_at(model, increment_gram(model, grid));
  }
  const double rate = 2.0 * model.hurst;
  auto ex = [&](double KernelNormsAtGrid::* field) {
    return extrapolate_grid(sizes, packs[0].*field, packs[1].*field, packs[2].*field,
                            rate);
  };
  KernelNorms out{model,
                  ex(&KernelNormsAtGrid::norm_f2),
                  ex(&KernelNormsAtGrid::norm_g2),
                  ex(&KernelNormsAtGrid::norm_h2),
                  ex(&KernelNormsAtGrid::cross_fg),
                  ex(&KernelNormsAtGrid::contract_ff2),
                  ex(&KernelNormsAtGrid::contract_fg2),
                  ex(&KernelNormsAtGrid::contract_gg2)};
  return out;
}

GridValue norm_fT2(const HurstModel& m, int n) { return kernel_norms(m, n).norm_f2; }
GridValue norm_gT2(const HurstModel& m, int n) { return kernel_norms(m, n).norm_g2; }
GridValue norm_hT2(const HurstModel& m, int n) { return kernel_norms(m, n).norm_h2; }
GridValue cross_fg(const HurstModel& m, int n) { return kernel_norms(m, n).cross_fg; }

namespace {

GridValue sqrt_grid_value(GridValue gv) {
  GridValue out = gv;
  out.coarse = std::sqrt(std::max(gv.coarse, 0.0));
  out.mid = std::sqrt(std::max(gv.mid, 0.0));
  out.fine = std::sqrt(std::max(gv.fine, 0.0));
  out.extrapolated = std::sqrt(std::max(gv.extrapolated, 0.0));
  out.error_estimate = std::abs(out.extrapolated - out.fine);
  return out;
}

}  // namespace

GridValue contract_norm_ff(const HurstModel& m, int n) {
  return sqrt_grid_value(kernel_norms(m, n).contract_ff2);
}
GridValue contract_norm_fg(const HurstModel& m, int n) {
  return sqrt_grid_value(kernel_norms(m, n).contract_fg2);
}
GridValue contract_norm_gg(const HurstModel& m, int n) {
  return sqrt_grid_value(kernel_norms(m, n).contract_gg2);
}

namespace {

double psi1_of(double bt, double f2, double ff2) {
  const double b2 = bt * bt;
  return std::sqrt(std::pow(b2 - 2.0 * f2, 2) + 8.0 * ff2) / b2;
}
double psi2_of(double bt, double fg, double fg2) {
  const double b2 = bt * bt;
  return 2.0 * std::sqrt(2.0 * fg2 + fg * fg) / b2;
}
double psi3_of(double bt, double g2, double gg2) {
  const double b2 = bt * bt;
  return 2.0 * std::sqrt(g2 * g2 + 2.0 * gg2) / b2;
}

}  // namespace

PsiReport psi_stats(const KernelNorms& norms, double bt) {
  PsiReport r;
  r.horizon = norms.model.horizon;
  r.bt = bt;
  r.psi1 = psi1_of(bt, norms.norm_f2.extrapolated, norms.contract_ff2.extrapolated);
  r.psi2 = psi2_of(bt, norms.cross_fg.extrapolated, norms.contract_fg2.extrapolated);
  r.psi3 = psi3_of(bt, norms.norm_g2.extrapolated, norms.contract_gg2.extrapolated);
  r.error1 = std::abs(r.psi1 - psi1_of(bt, norms.norm_f2.fine, norms.contract_ff2.fine));
  r.error2 = std::abs(r.psi2 - psi2_of(bt, norms.cross_fg.fine, norms.contract_fg2.fine));
  r.error3 = std::abs(r.psi3 - psi3_of(bt, norms.norm_g2.fine, norms.contract_gg2.fine));
  return r;
}

PsiReport psi_stats(const HurstModel& model, int n) {
  return psi_stats(kernel_norms(model, n), bt_quadrature(model, 1e-10));
}

double rate_fit(const std::vector<std::pair<double, double>>& series, double reference) {
  if (series.size() < 3)
    throw std::invalid_argument("rate_fit: need at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [t, value] : series) {
    const double res = std::abs(value - reference);
    if (res <= 1e-13 * std::max(1.0, std::abs(reference)))
      throw numeric_error("rate_fit: residual at machine-noise level, fit degenerate");
    const double x = std::log(t);
    const double y = std::log(res);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(series.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0)
    throw std::invalid_argument("rate_fit: horizons must be distinct");
  return (n * sxy - sx * sy) / denom;
}

const char* lemma_name(LemmaId id) {
  switch (id) {
    case LemmaId::L31: return "L31";
    case LemmaId::L32: return "L32";
    case LemmaId::L33: return "L33";
    case LemmaId::C34: return "C34";
    case LemmaId::L35: return "L35";
  }
  return "?";
}

LemmaId lemma_from_string(const std::string& s) {
  if (s == "L31") return LemmaId::L31;
  if (s == "L32") return LemmaId::L32;
  if (s == "L33") return LemmaId::L33;
  if (s == "C34") return LemmaId::C34;
  if (s == "L35") return LemmaId::L35;
  throw std::invalid_argument("unknown lemma id '" + s + "' (expected L31|L32|L33|C34|L35)");
}

std::vector<LadderNorms> ladder_norms(double hurst, double theta,
                                      const std::vector<double>& t_ladder,
                                      double cells_per_time, bool with_norms) {
  std::vector<LadderNorms> out;
  out.reserve(t_ladder.size());
  for (const double T : t_ladder) {
    const HurstModel m(hurst, theta, T);
    const int n = even_at_least(static_cast<int>(std::lround(cells_per_time * T)), 64);
    LadderNorms pt;
    pt.horizon = T;
    pt.grid_n = n;
    pt.bt = bt_quadrature(m, 1e-10);
    if (with_norms) pt.norms = kernel_norms(m, n);
    out.push_back(std::move(pt));
  }
  return out;
}

LemmaVerification verify_lemma_from(LemmaId id, double hurst, double theta,
                                    const std::vector<LadderNorms>& ladder) {
  if (ladder.size() < 4)
    throw std::invalid_argument("verify_lemma: ladder needs at least 4 horizons");
  LemmaVerification v;
  v.id = id;
  const double a = a_limit(hurst, theta);

  auto make_series = [&](auto&& value_of, const char* col) {
    std::vector<std::pair<double, double>> s;
    for (const auto& pt : ladder) {
      const double val = value_of(pt);
      s.emplace_back(pt.horizon, val);
      SeriesRow row{pt.horizon, {{"grid_n", double(pt.grid_n)}, {col, val}}};
      v.series.push_back(std::move(row));
    }
    return s;
  };
  auto rate_report = [&](const char* name, std::vector<std::pair<double, double>> s,
                         double reference, double claimed, double bound,
                         bool two_sided, double tol) {
    LimitReport r;
    r.constant_name = name;
    r.reference_value = claimed;
    r.computed_value = rate_fit(s, reference);
    r.observed_rate = r.computed_value;
    r.extrapolated_value = s.back().second;
    r.tolerance = tol;
    r.pass = two_sided ? std::abs(r.computed_value - claimed) <= tol
                       : r.computed_value <= bound;
    v.reports.push_back(r);
  };

  switch (id) {
    case LemmaId::L32: {
      auto s = make_series([](const LadderNorms& p) { return p.bt; }, "b_T");
      // Near H = 1/4 (theta = 1) the 1/T coefficient of b_T - a vanishes and
      // the residual drops to the quadrature noise floor; such points carry
      // no rate information.  When the tail of the ladder has saturated the
      // decay bound holds outright and no fit is attempted.
      const double floor = 1e-8 * std::max(1.0, std::abs(a));
      std::vector<std::pair<double, double>> live;
      for (const auto& [t, value] : s)
        if (std::abs(value - a) > floor) live.emplace_back(t, value);
      LimitReport r;
      r.constant_name = "bt_minus_a_rate";
      r.reference_value = -1.0;
      r.tolerance = 0.25;
      const bool tail_saturated =
          live.empty() || live.back().first < s.back().first;
      if (live.size() >= 3) {
        r.computed_value = rate_fit(live, a);
        r.observed_rate = r.computed_value;
        r.extrapolated_value = s.back().second;
        r.pass = r.computed_value <= -0.75;
        if (live.size() < s.size())
          r.note = "fit restricted to the " + std::to_string(live.size()) +
                   " horizons with residuals above the quadrature noise floor";
      } else if (tail_saturated) {
        r.extrapolated_value = s.back().second;
        r.pass = true;
        r.note =
            "|b_T - a| at the quadrature noise floor for the large horizons; "
            "decay faster than resolvable, bound satisfied outright";
      } else {
        r.extrapolated_value = s.back().second;
        r.pass = false;
        r.note = "too few informative horizons to fit and the largest horizon "
                 "has not converged";
      }
      v.reports.push_back(r);
      break;
    }
    case LemmaId::L31: {
      auto s = make_series(
          [](const LadderNorms& p) {
            return std::sqrt(std::max(p.norms->contract_ff2.extrapolated, 0.0));
          },
          "contract_ff_norm");
      rate_report("contract_ff_rate", std::move(s), 0.0, -0.5, -0.35, false, 0.15);
      break;
    }
    case LemmaId::L33: {
      auto s = make_series(
          [](const LadderNorms& p) { return p.norms->norm_h2.extrapolated / p.horizon; },
          "norm_h2_over_T");
      rate_report("ht_norm_over_T_rate", std::move(s), 0.0, -1.0, -0.5, false, 0.5);
      break;
    }
    case LemmaId::L35: {
      auto s = make_series(
          [](const LadderNorms& p) { return 2.0 * p.norms->norm_f2.extrapolated; },
          "two_norm_f2");
      rate_report("f_norm2_rate", std::move(s), a * a, 2.0 * hurst - 1.0, 0.0, true,
                  0.25);
      break;
    }
    case LemmaId::C34: {
      const double sig2 = sigma2(hurst);
      const double dh = delta_h(hurst);
      const double lim_g2 = dh / (2.0 * std::pow(theta, 1.0 + 4.0 * hurst));
      const double lim_fg2 = dh * dh / (4.0 * std::pow(theta, 1.0 + 8.0 * hurst) * sig2);
      for (const auto& pt : ladder) {
        SeriesRow row{pt.horizon,
                      {{"grid_n", double(pt.grid_n)},
                       {"T_norm_g2", pt.horizon * pt.norms->norm_g2.extrapolated},
                       {"T_cross_fg_sq", pt.horizon * std::pow(pt.norms->cross_fg.extrapolated, 2)},
                       {"T_contract_fg2", pt.horizon * pt.norms->contract_fg2.extrapolated},
                       {"T_contract_gg2", pt.horizon * pt.norms->contract_gg2.extrapolated}}};
        v.series.push_back(std::move(row));
      }
      const auto& last = ladder.back();
      const auto& first = ladder.front();
      const double Tl = last.horizon;
      auto limit_report = [&](const char* name, double computed, double ref, double tol) {
        LimitReport r;
        r.constant_name = name;
        r.computed_value = computed;
        r.reference_value = ref;
        r.extrapolated_value = computed;
        r.tolerance = tol;
        r.pass = std::abs(computed - ref) <= tol * std::abs(ref);
        v.reports.push_back(r);
      };
      limit_report("T_norm_g2", Tl * last.norms->norm_g2.extrapolated, lim_g2, 0.10);
      limit_report("T_cross_fg_sq", Tl * std::pow(last.norms->cross_fg.extrapolated, 2),
                   lim_fg2, 0.15);
      auto decay_report = [&](const char* name, double first_v, double last_v) {
        LimitReport r;
        r.constant_name = name;
        r.computed_value = last_v / first_v;
        r.reference_value = 0.0;
        r.extrapolated_value = last_v;
        r.tolerance = 0.20;
        r.pass = first_v > 0.0 && r.computed_value <= 0.20;
        v.reports.push_back(r);
      };
      decay_report("T_contract_fg2_decay",
                   first.horizon * first.norms->contract_fg2.extrapolated,
                   Tl * last.norms->contract_fg2.extrapolated);
      decay_report("T_contract_gg2_decay",
                   first.horizon * first.norms->contract_gg2.extrapolated,
                   Tl * last.norms->contract_gg2.extrapolated);
      break;
    }
  }
  v.pass = std::all_of(v.reports.begin(), v.reports.end(),
                       [](const LimitReport& r) { return r.pass; });
  // fill grid sizes on the reports from the finest ladder point
  for (auto& r : v.reports)
    if (id != LemmaId::L32)
      r.grid_sizes = ladder.back().norms->norm_f2.grid_sizes;
  return v;
}

LemmaVerification verify_lemma(LemmaId id, double hurst, double theta,
                               const std::vector<double>& t_ladder,
                               double cells_per_time) {
  const auto ladder =
      ladder_norms(hurst, theta, t_ladder, cells_per_time, id != LemmaId::L32);
  return verify_lemma_from(id, hurst, theta, ladder);
}

}  // namespace fouest
