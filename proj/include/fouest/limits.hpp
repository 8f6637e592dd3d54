#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fouest/core.hpp"
#include "fouest/gram.hpp"

namespace fouest {

// Gram-route value of a kernel quantity on three nested grids with a
// Richardson extrapolation.  The extrapolation exponent defaults to 2H and is
// replaced by the measured one when the grid differences disagree with
// 2^(-2H) by more than 30%.
struct GridValue {
  std::array<int, 3> grid_sizes;  // {n/2, n, 2n}
  double coarse = 0.0;
  double mid = 0.0;
  double fine = 0.0;
  double extrapolated = 0.0;
  double observed_rate = 0.0;   // exponent r in error ~ n^(-r)
  double error_estimate = 0.0;  // |extrapolated - fine|
};

GridValue extrapolate_grid(const std::array<int, 3>& sizes, double coarse, double mid,
                           double fine, double default_rate);

// All tensor-space quantities of the kernel family at one horizon, evaluated
// through the Gram representation on grids {n/2, n, 2n}:
//   norm_f2  = ||f||^2,  norm_g2 = ||g||^2,  norm_h2 = ||h||^2,
//   cross_fg = <f, g>,
//   contract_ff2 = ||f ox1 f||^2,  contract_fg2 = ||f ox1 g||^2,
//   contract_gg2 = ||g ox1 g||^2.
struct KernelNorms {
  HurstModel model;
  GridValue norm_f2, norm_g2, norm_h2, cross_fg;
  GridValue contract_ff2, contract_fg2, contract_gg2;
};

KernelNorms kernel_norms(const HurstModel& model, int n);

// Single-grid evaluation used by kernel_norms and by the cross-checks against
// the generic tensor operations.
struct KernelNormsAtGrid {
  double norm_f2, norm_g2, norm_h2, cross_fg;
  double contract_ff2, contract_fg2, contract_gg2;
};
KernelNormsAtGrid kernel_norms_at(const HurstModel& model, const IncrementGram& gram);

// Spec-named accessors (norm values; contract_norm_* are unsquared norms).
GridValue norm_fT2(const HurstModel& model, int n);
GridValue norm_gT2(const HurstModel& model, int n);
GridValue norm_hT2(const HurstModel& model, int n);
GridValue cross_fg(const HurstModel& model, int n);
GridValue contract_norm_ff(const HurstModel& model, int n);
GridValue contract_norm_fg(const HurstModel& model, int n);
GridValue contract_norm_gg(const HurstModel& model, int n);

// Kim-Park statistics for phi = f, psi = g:
//   Psi1 = sqrt((b^2 - 2||f||^2)^2 + 8||f ox1 f||^2) / b^2,
//   Psi2 = 2 sqrt(2||f ox1 g||^2 + <f,g>^2) / b^2,
//   Psi3 = 2 sqrt(||g||^4 + 2||g ox1 g||^2) / b^2.
// error_* propagate the grid extrapolation error through the same formulas.
struct PsiReport {
  double horizon;
  double psi1, psi2, psi3;
  double bt;
  double error1, error2, error3;
};

PsiReport psi_stats(const HurstModel& model, int n);
PsiReport psi_stats(const KernelNorms& norms, double bt);

// Least-squares slope of log|value - reference| against log T.
// Throws on fewer than 3 points or residuals at machine-noise level.
double rate_fit(const std::vector<std::pair<double, double>>& series, double reference);

struct LimitReport {
  std::string constant_name;
  double computed_value = 0.0;
  double reference_value = 0.0;
  std::array<int, 3> grid_sizes{0, 0, 0};
  double extrapolated_value = 0.0;
  double observed_rate = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;  // set when a fit saturates or needs qualification
};

enum class LemmaId { L31, L32, L33, C34, L35 };

const char* lemma_name(LemmaId id);
LemmaId lemma_from_string(const std::string& s);

// One horizon of the verification ladder.
struct LadderNorms {
  double horizon = 0.0;
  int grid_n = 0;
  std::optional<KernelNorms> norms;  // absent for the b_T-only lemma
  double bt = 0.0;
};

struct SeriesRow {
  double horizon;
  std::vector<std::pair<std::string, double>> cols;
};

struct LemmaVerification {
  LemmaId id;
  bool pass = false;
  std::vector<LimitReport> reports;
  std::vector<SeriesRow> series;
};

std::vector<LadderNorms> ladder_norms(double hurst, double theta,
                                      const std::vector<double>& t_ladder,
                                      double cells_per_time, bool with_norms = true);

// Evaluates the lemma's quantity over a horizon ladder (>= 4 points for the
// rate fits), fits the decay exponent and compares it with the claimed one at
// a pinned tolerance.
LemmaVerification verify_lemma(LemmaId id, double hurst, double theta,
                               const std::vector<double>& t_ladder,
                               double cells_per_time);
LemmaVerification verify_lemma_from(LemmaId id, double hurst, double theta,
                                    const std::vector<LadderNorms>& ladder);

}  // namespace fouest
