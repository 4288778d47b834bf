#pragma once

#include <cstdint>
#include <vector>

#include "problems.hpp"
#include "table.hpp"

namespace stablab {

// One-parameter quartic family around the two base points (-1, 1) and
// (-1/2, 1).  The mean of their losses has two separated minima w1 < w2 with
// a concave hump at what between them; the perturbing points z_minus and
// z_plus tilt the hump's slope in opposite directions.
struct QuarticLandscape {
  double what = 0.0;  // stationary point of the hump
  double w1 = 0.0;    // left minimum of the base mean loss
  double w2 = 0.0;    // right minimum
  double eps = 0.0;
  double eta = 0.0;    // half-width where the base slopes clear -0.4 / +0.4
  double delta = 0.0;  // half-width of opposed paired-risk slopes (set per n)
  Example z_plus, z_minus, z_star;
  double gap_at_minima = 0.0;  // |loss(w1; z_star) - loss(w2; z_star)|
};

// Slope and curvature of the base mean loss g(w) = (l(w;(-1,1)) + l(w;(-1/2,1)))/2.
double center_slope(double w);
double center_curvature(double w);

// Bisection root of center_slope on [0.5, 1.0], to absolute tolerance 1e-12.
double locate_center();

// Landscape pieces that do not depend on n: what, the two minima, eta, the
// perturbing points for the given eps, and the probe-point loss gap between
// the minima.  Throws when a scan finds an empty window.
QuarticLandscape make_landscape(double eps = 0.01);

struct CounterexampleData {
  Dataset S;   // (n-1)/2 copies of each base point plus z_minus
  Dataset Sp;  // same with z_plus in the last slot
  QuarticLandscape landscape;
  ProblemPtr problem;  // the scalar quartic family
  long n = 0;
};

// n odd and at least 3; eps in (0, 0.1).  delta comes from a 1e5-point
// symmetric scan for opposed risk slopes; an empty window is a construction
// error naming the scan.
CounterexampleData build_datasets(long n, double eps = 0.01);

struct GdInstabilityRow {
  double w0 = 0.0;
  double final_S = 0.0;
  double final_Sp = 0.0;
  double gap = 0.0;        // |loss gap| at z_star between the two finals
  long steps_S = 0;
  long steps_Sp = 0;
  bool converged = false;  // both runs reached gradient norm 1e-8
  bool diverged = false;   // either run left the norm guard
};

struct GdInstabilityReport {
  std::vector<GdInstabilityRow> rows;
  double min_gap = 0.0;            // over converged rows; 0 when none converged
  double fraction_separated = 0.0; // rows converged with gap >= 1/2
  long converged_rows = 0;
  long diverged_rows = 0;
  long n = 0;
  double eps = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

// Paired full-gradient descent from shared inits drawn uniformly inside the
// opposed-slope window, run to stationarity (gradient norm 1e-8, step cap
// 1e5).  extra_steps appends that many further steps after stationarity so
// callers can confirm the gap statistic has stopped moving.
GdInstabilityReport gd_instability_experiment(long n, double eps, double gamma,
                                              long inits, std::uint64_t seed,
                                              int jobs = 1, long extra_steps = 0);

Table gd_instability_table(const GdInstabilityReport& rep);

struct SgdStabilityReport {
  double max_mean_gap = 0.0;  // max over probes of |mean over replicas loss gap|
  Example witness;
  double first_draw_freq = 0.0;  // first sampled index hit the differing slot
  long replicas = 0;
  long nonconverged_runs = 0;  // runs that hit the step cap before the 1/n ball
  long n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
};

// Coupled one-dimensional sgd with a shared index sequence per replica:
// first step at gamma 1, then gamma_t = 1/(t+9) (the same 1/t order with the
// first decrease matching the documented schedule), each run freezing once it
// lands within 1/n of a minimum of its own risk.
SgdStabilityReport sgd_stability_experiment(long n, double eps, long replicas,
                                            std::uint64_t seed, int jobs = 1,
                                            long step_cap = 200000);

Table sgd_sweep_table(const std::vector<long>& ns, double eps, long replicas,
                      std::uint64_t seed, int jobs = 1);

}  // namespace stablab
