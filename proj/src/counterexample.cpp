#include "counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "rng.hpp"
#include "stability.hpp"

namespace stablab {

namespace {

double atom_loss(double w, double x, double y) {
  const double u = w * x;
  const double r = u * u + u - y;
  return r * r;
}

double atom_slope(double w, double x, double y) {
  const double u = w * x;
  const double r = u * u + u - y;
  return 2.0 * r * (2.0 * u + 1.0) * x;
}

struct WeightedAtom {
  double x = 0.0;
  double y = 0.0;
  double weight = 0.0;
};

struct ScalarRisk {
  std::vector<WeightedAtom> atoms;

  double value(double w) const {
    double acc = 0.0;
    for (const auto& a : atoms) acc += a.weight * atom_loss(w, a.x, a.y);
    return acc;
  }

  double slope(double w) const {
    double acc = 0.0;
    for (const auto& a : atoms) acc += a.weight * atom_slope(w, a.x, a.y);
    return acc;
  }
};

constexpr double kNormGuard = 1e8;

struct DescentResult {
  double w = 0.0;
  long steps = 0;
  bool converged = false;
  bool diverged = false;
};

DescentResult descend(const ScalarRisk& risk, double w0, double gamma,
                      double tol, long cap, long extra = 0) {
  DescentResult res;
  res.w = w0;
  for (long t = 0; t < cap; ++t) {
    const double g = risk.slope(res.w);
    if (std::abs(g) <= tol) {
      res.converged = true;
      break;
    }
    res.w -= gamma * g;
    ++res.steps;
    if (!std::isfinite(res.w) || std::abs(res.w) > kNormGuard) {
      res.diverged = true;
      break;
    }
  }
  for (long t = 0; t < extra && res.converged; ++t) {
    res.w -= gamma * risk.slope(res.w);
  }
  return res;
}

ScalarRisk base_mean() {
  return ScalarRisk{{{-1.0, 1.0, 0.5}, {-0.5, 1.0, 0.5}}};
}

// Paired empirical risks: (n-1)/2 copies of each base point plus one copy of
// the perturbing point in the last slot.
ScalarRisk paired_risk(long n, double perturb_x) {
  const double base_w = static_cast<double>(n - 1) / (2.0 * n);
  return ScalarRisk{{{-1.0, 1.0, base_w},
                     {-0.5, 1.0, base_w},
                     {perturb_x, 0.0, 1.0 / static_cast<double>(n)}}};
}

Example scalar_example(double x, double y) {
  Example e;
  e.x = Vec::Constant(1, x);
  e.y = y;
  return e;
}

void validate_eps(double eps) {
  if (!(eps > 0.0) || !(eps < 0.1)) {
    throw std::invalid_argument(
        "counterexample: eps must lie in (0, 0.1), got " + std::to_string(eps));
  }
}

}  // namespace

double center_slope(double w) {
  return (w * w - w - 1.0) * (2.0 * w - 1.0) +
         (w * w / 4.0 - w / 2.0 - 1.0) * (w / 2.0 - 0.5);
}

double center_curvature(double w) {
  return (2.0 * w - 1.0) * (2.0 * w - 1.0) + 2.0 * (w * w - w - 1.0) +
         (w / 2.0 - 0.5) * (w / 2.0 - 0.5) +
         0.5 * (w * w / 4.0 - w / 2.0 - 1.0);
}

double locate_center() {
  double lo = 0.5;
  double hi = 1.0;
  double flo = center_slope(lo);
  const double fhi = center_slope(hi);
  if (!(flo > 0.0) || !(fhi < 0.0)) {
    throw std::runtime_error("locate_center: slope does not bracket a root on [0.5, 1]");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = center_slope(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

QuarticLandscape make_landscape(double eps) {
  validate_eps(eps);
  QuarticLandscape L;
  L.eps = eps;
  L.what = locate_center();
  if (std::abs(center_slope(L.what)) > 1e-12) {
    throw std::runtime_error("make_landscape: center slope not zero to 1e-12");
  }
  if (!(center_curvature(L.what) < 0.0)) {
    throw std::runtime_error("make_landscape: center is not a local maximum");
  }

  const ScalarRisk g = base_mean();
  const DescentResult left = descend(g, -1.0, 0.05, 1e-12, 1000000);
  const DescentResult right = descend(g, 1.5, 0.05, 1e-12, 1000000);
  if (!left.converged || !right.converged) {
    throw std::runtime_error("make_landscape: descent to a base minimum did not converge");
  }
  L.w1 = left.w;
  L.w2 = right.w;
  if (!(L.w1 < L.what && L.what < L.w2)) {
    throw std::runtime_error("make_landscape: minima do not straddle the center");
  }

  const long half = 50000;
  const double span = 0.1;
  const double h = span / static_cast<double>(half);
  long good = 0;
  for (long k = 0; k <= half; ++k) {
    const double wr = L.what + k * h;
    const double wl = L.what - k * h;
    const bool ok = atom_slope(wr, -1.0, 1.0) < -0.4 &&
                    atom_slope(wl, -1.0, 1.0) < -0.4 &&
                    atom_slope(wr, -0.5, 1.0) > 0.4 &&
                    atom_slope(wl, -0.5, 1.0) > 0.4;
    if (!ok) break;
    good = k;
  }
  if (good == 0) {
    throw std::runtime_error(
        "make_landscape: scan for the 0.4 slope margin window found no width");
  }
  L.eta = good * h;

  L.z_plus = scalar_example(-1.0 / (2.0 * (L.what + eps)), 0.0);
  L.z_minus = scalar_example(-1.0 / (2.0 * (L.what - eps)), 0.0);
  L.z_star = scalar_example(-0.5, 1.0);

  L.gap_at_minima = std::abs(atom_loss(L.w1, -0.5, 1.0) - atom_loss(L.w2, -0.5, 1.0));
  if (!(L.gap_at_minima > 1.0)) {
    throw std::runtime_error(
        "make_landscape: probe loss gap between the minima is not above 1");
  }
  return L;
}

CounterexampleData build_datasets(long n, double eps) {
  if (n < 3 || n % 2 == 0) {
    throw std::invalid_argument(
        "counterexample: n must be odd and at least 3, got " + std::to_string(n));
  }
  validate_eps(eps);

  CounterexampleData data;
  data.landscape = make_landscape(eps);
  data.n = n;
  data.problem = make_quartic(1);

  const long half = (n - 1) / 2;
  for (long i = 0; i < half; ++i) data.S.add(scalar_example(-1.0, 1.0));
  for (long i = 0; i < half; ++i) data.S.add(scalar_example(-0.5, 1.0));
  data.S.add(data.landscape.z_minus);
  data.Sp = data.S.neighbor(n - 1, data.landscape.z_plus);

  const ScalarRisk fS = paired_risk(n, data.landscape.z_minus.x(0));
  const ScalarRisk fSp = paired_risk(n, data.landscape.z_plus.x(0));
  if (!(fS.slope(data.landscape.what) < 0.0 && fSp.slope(data.landscape.what) > 0.0)) {
    throw std::invalid_argument(
        "counterexample: risk slopes at the center are not opposed; eps too large for n");
  }

  const long grid_half = 50000;
  const double h = eps / static_cast<double>(grid_half);
  long good = 0;
  for (long k = 0; k <= grid_half; ++k) {
    const double wr = data.landscape.what + k * h;
    const double wl = data.landscape.what - k * h;
    const bool ok = fS.slope(wr) < 0.0 && fS.slope(wl) < 0.0 &&
                    fSp.slope(wr) > 0.0 && fSp.slope(wl) > 0.0;
    if (!ok) break;
    good = k;
  }
  if (good == 0) {
    throw std::invalid_argument(
        "counterexample: scan for an opposed risk slope window found no width; "
        "eps too large for n");
  }
  data.landscape.delta = good * h;
  return data;
}

GdInstabilityReport gd_instability_experiment(long n, double eps, double gamma,
                                              long inits, std::uint64_t seed,
                                              int jobs, long extra_steps) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("counterexample: gamma must be positive");
  }
  if (inits < 1) {
    throw std::invalid_argument("counterexample: need at least one init");
  }
  const CounterexampleData data = build_datasets(n, eps);
  const QuarticLandscape& L = data.landscape;
  const ScalarRisk fS = paired_risk(n, L.z_minus.x(0));
  const ScalarRisk fSp = paired_risk(n, L.z_plus.x(0));

  GdInstabilityReport rep;
  rep.n = n;
  rep.eps = eps;
  rep.gamma = gamma;
  rep.delta = L.delta;
  rep.seed = seed;
  rep.rows.resize(inits);

  const double zx = L.z_star.x(0);
  const double zy = L.z_star.y;
  parallel_for(inits, jobs, [&](long i) {
    Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(i)));
    GdInstabilityRow row;
    row.w0 = rng.uniform(L.what - L.delta, L.what + L.delta);
    const DescentResult a = descend(fS, row.w0, gamma, 1e-8, 100000, extra_steps);
    const DescentResult b = descend(fSp, row.w0, gamma, 1e-8, 100000, extra_steps);
    row.final_S = a.w;
    row.final_Sp = b.w;
    row.steps_S = a.steps;
    row.steps_Sp = b.steps;
    row.converged = a.converged && b.converged;
    row.diverged = a.diverged || b.diverged;
    row.gap = std::abs(atom_loss(a.w, zx, zy) - atom_loss(b.w, zx, zy));
    rep.rows[i] = row;
  });

  double min_gap = 0.0;
  bool have = false;
  long separated = 0;
  for (const auto& row : rep.rows) {
    if (row.diverged) ++rep.diverged_rows;
    if (!row.converged || row.diverged) continue;
    ++rep.converged_rows;
    if (!have || row.gap < min_gap) min_gap = row.gap;
    have = true;
    if (row.gap >= 0.5) ++separated;
  }
  rep.min_gap = have ? min_gap : 0.0;
  rep.fraction_separated =
      static_cast<double>(separated) / static_cast<double>(inits);
  return rep;
}

Table gd_instability_table(const GdInstabilityReport& rep) {
  Table t({"w0", "final_S", "final_Sp", "gap", "steps_S", "steps_Sp",
           "converged", "diverged"});
  for (const auto& row : rep.rows) {
    t.add_row({row.w0, row.final_S, row.final_Sp, row.gap,
               static_cast<double>(row.steps_S),
               static_cast<double>(row.steps_Sp),
               row.converged ? 1.0 : 0.0, row.diverged ? 1.0 : 0.0});
  }
  t.meta("n", static_cast<double>(rep.n));
  t.meta("eps", rep.eps);
  t.meta("gamma", rep.gamma);
  t.meta("delta", rep.delta);
  t.meta("seed", std::to_string(rep.seed));
  t.meta("min_gap", rep.min_gap);
  t.meta("fraction_separated", rep.fraction_separated);
  t.meta("converged_rows", static_cast<double>(rep.converged_rows));
  t.meta("diverged_rows", static_cast<double>(rep.diverged_rows));
  return t;
}

SgdStabilityReport sgd_stability_experiment(long n, double eps, long replicas,
                                            std::uint64_t seed, int jobs,
                                            long step_cap) {
  if (replicas < 1) {
    throw std::invalid_argument("counterexample: need at least one replica");
  }
  if (step_cap < 1) {
    throw std::invalid_argument("counterexample: step cap must be positive");
  }
  const CounterexampleData data = build_datasets(n, eps);
  const QuarticLandscape& L = data.landscape;
  const ScalarRisk fS = paired_risk(n, L.z_minus.x(0));
  const ScalarRisk fSp = paired_risk(n, L.z_plus.x(0));

  const DescentResult mS1 = descend(fS, -1.0, 0.05, 1e-12, 1000000);
  const DescentResult mS2 = descend(fS, 1.5, 0.05, 1e-12, 1000000);
  const DescentResult mSp1 = descend(fSp, -1.0, 0.05, 1e-12, 1000000);
  const DescentResult mSp2 = descend(fSp, 1.5, 0.05, 1e-12, 1000000);
  if (!mS1.converged || !mS2.converged || !mSp1.converged || !mSp2.converged) {
    throw std::runtime_error(
        "counterexample: descent to a paired risk minimum did not converge");
  }
  const double ball = 1.0 / static_cast<double>(n);

  struct AtomRef {
    double x = 0.0;
    double y = 0.0;
  };
  std::vector<AtomRef> exS(n), exSp(n);
  for (long i = 0; i < n; ++i) {
    exS[i] = {data.S[i].x(0), data.S[i].y};
    exSp[i] = {data.Sp[i].x(0), data.Sp[i].y};
  }

  std::vector<double> wA(replicas), wB(replicas);
  std::vector<char> first_hit(replicas, 0);
  std::vector<char> capped_a(replicas, 0), capped_b(replicas, 0);

  parallel_for(replicas, jobs, [&](long r) {
    Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(r)));
    const double w0 = rng.uniform(L.what - L.eta, L.what + L.eta);
    double a = w0;
    double b = w0;
    bool fa = false;
    bool fb = false;
    for (long t = 1; t <= step_cap && !(fa && fb); ++t) {
      const long i = static_cast<long>(rng.index(static_cast<std::uint64_t>(n)));
      if (t == 1 && i == n - 1) first_hit[r] = 1;
      const double g = (t == 1) ? 1.0 : 1.0 / static_cast<double>(t + 9);
      if (!fa) {
        a -= g * atom_slope(a, exS[i].x, exS[i].y);
        if (!std::isfinite(a) || std::abs(a) > kNormGuard) {
          fa = true;
          capped_a[r] = 1;
        } else if (std::abs(a - mS1.w) <= ball || std::abs(a - mS2.w) <= ball) {
          fa = true;
        }
      }
      if (!fb) {
        b -= g * atom_slope(b, exSp[i].x, exSp[i].y);
        if (!std::isfinite(b) || std::abs(b) > kNormGuard) {
          fb = true;
          capped_b[r] = 1;
        } else if (std::abs(b - mSp1.w) <= ball || std::abs(b - mSp2.w) <= ball) {
          fb = true;
        }
      }
    }
    if (!fa) capped_a[r] = 1;
    if (!fb) capped_b[r] = 1;
    wA[r] = a;
    wB[r] = b;
  });

  SgdStabilityReport rep;
  rep.n = n;
  rep.eps = eps;
  rep.replicas = replicas;
  rep.seed = seed;
  for (long r = 0; r < replicas; ++r) {
    rep.first_draw_freq += first_hit[r] ? 1.0 : 0.0;
    rep.nonconverged_runs += (capped_a[r] ? 1 : 0) + (capped_b[r] ? 1 : 0);
  }
  rep.first_draw_freq /= static_cast<double>(replicas);

  const std::vector<Example> probes =
      make_probes(*data.problem, Rng::mix(seed, 0xC0FFEE));
  double best = -1.0;
  for (const auto& z : probes) {
    const double zx = z.x(0);
    const double zy = z.y;
    double acc = 0.0;
    for (long r = 0; r < replicas; ++r) {
      acc += atom_loss(wA[r], zx, zy) - atom_loss(wB[r], zx, zy);
    }
    const double m = std::abs(acc / static_cast<double>(replicas));
    if (m > best) {
      best = m;
      rep.witness = z;
    }
  }
  rep.max_mean_gap = best;
  return rep;
}

Table sgd_sweep_table(const std::vector<long>& ns, double eps, long replicas,
                      std::uint64_t seed, int jobs) {
  if (ns.empty()) {
    throw std::invalid_argument("counterexample: need at least one n value");
  }
  Table t({"n", "max_mean_gap", "first_draw_freq", "nonconverged_runs",
           "witness_x", "witness_y"});
  std::vector<double> xs, ys;
  for (const long n : ns) {
    const SgdStabilityReport rep =
        sgd_stability_experiment(n, eps, replicas, Rng::mix(seed, n), jobs);
    t.add_row({static_cast<double>(n), rep.max_mean_gap, rep.first_draw_freq,
               static_cast<double>(rep.nonconverged_runs), rep.witness.x(0),
               rep.witness.y});
    xs.push_back(static_cast<double>(n));
    ys.push_back(rep.max_mean_gap);
  }
  if (xs.size() >= 2) t.meta("loglog_slope", loglog_slope(xs, ys));
  t.meta("eps", eps);
  t.meta("replicas", static_cast<double>(replicas));
  t.meta("seed", std::to_string(seed));
  t.meta("step_schedule", "gamma_1 = 1, gamma_t = 1/(t+9) afterwards");
  return t;
}

}  // namespace stablab
