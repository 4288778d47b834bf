#pragma once

#include <cstdint>
#include <optional>

#include "optim.hpp"
#include "table.hpp"

namespace stablab {

enum class Setting { sc, pl };

const char* setting_name(Setting s);
Setting setting_from_name(const std::string& name);

// Inputs for the closed-form rate and iteration-count calculators.  Which
// fields matter depends on the algorithm: the rate constant is lambda under
// sc and mu under pl; gamma feeds sgd and svrg; d feeds rcd; m feeds svrg.
// Every O-expression is evaluated with constant one; reports carry the
// "constants suppressed" note.
struct RateInputs {
  double lambda = 0.0;
  double mu = 0.0;
  double L = 0.0;
  double gamma = 0.0;
  long d = 0;
  long m = 0;
  long n = 0;
};

// Per-epoch contraction of the variance-reduced loop; finite only when
// 1 - 2 L gamma > 0.
double svrg_rho(double rate_const, double L, double gamma, long m);

// Expected suboptimality after T steps (epochs for svrg):
//   sgd: (1 - 2 gamma c)^T + gamma L^2 / (2 c)
//   gd: (1 - c/L)^T    rcd: (1 - c/(dL))^T    svrg: rho^T
// with c the rate constant of the setting.
double theoretical_suboptimality(Algorithm alg, Setting setting, const RateInputs& in,
                                 long T);

// Steps needed to push the contraction part under the stability target
// L^2 / (c n):
//   sgd: ceil(L n / c)  [gamma = 1/n recorded in reports]
//   gd, rcd, svrg: ceil(log(L/(c n)) / log(contraction))
// Ill-posed inputs (c n <= L, contraction outside (0,1), rho >= 1) raise
// IllPosedError naming the violated condition.
long iterations_for_stability(Algorithm alg, Setting setting, const RateInputs& in);

double stability_target(Setting setting, const RateInputs& in);  // L^2 / (c n)

// One row per algorithm for the given constants; columns algorithm, setting,
// value.  Entries whose inputs are absent (gamma or m or d zero) are skipped.
Table suboptimality_table(const RateInputs& in, long T);
Table iteration_table(const RateInputs& in);

struct RateFit {
  double rho_hat = 1.0;      // exp(slope) of the log-gap regression
  double rho_lo = 0.0;       // 2-sigma band
  double rho_hi = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double floor = 0.0;        // smallest mean gap seen (noise floor estimate)
  double initial_gap = 0.0;
  long points_used = 0;
  long replicas = 0;
  std::uint64_t seed_base = 0;
  bool inconclusive = false;  // fewer than 5 points in the linear regime
};

// Mean-over-replicas suboptimality track, regressed on the linear regime
// (gaps between 10x the floor estimate and half the initial gap).  Replica r
// runs with seed mix(cfg.seed, r); any jobs value gives identical output.
RateFit fit_rate(const Problem& p, const Dataset& S, const RunConfig& cfg, const Vec& w0,
                 long replicas, std::optional<double> f_star = std::nullopt,
                 int jobs = 1);

Table rate_fit_table(const RateFit& fit);

}  // namespace stablab
