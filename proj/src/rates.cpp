#include "rates.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace stablab {

const char* setting_name(Setting s) { return s == Setting::sc ? "sc" : "pl"; }

Setting setting_from_name(const std::string& name) {
  if (name == "sc") return Setting::sc;
  if (name == "pl") return Setting::pl;
  throw std::invalid_argument("unknown setting: " + name);
}

namespace {

double rate_const(Setting setting, const RateInputs& in) {
  const double c = setting == Setting::sc ? in.lambda : in.mu;
  if (!(c > 0.0))
    throw std::invalid_argument(std::string("rates: the ") +
                                (setting == Setting::sc ? "sc" : "pl") +
                                " setting needs a positive rate constant");
  return c;
}

void need_L(const RateInputs& in) {
  if (!(in.L > 0.0)) throw std::invalid_argument("rates: L must be positive");
}

double ipow(double base, long T) { return std::pow(base, static_cast<double>(T)); }

}  // namespace

double svrg_rho(double rate_const, double L, double gamma, long m) {
  if (!(rate_const > 0.0) || !(L > 0.0) || !(gamma > 0.0) || m < 1)
    throw std::invalid_argument("svrg_rho: constants must be positive and m >= 1");
  const double denom = 1.0 - 2.0 * L * gamma;
  if (!(denom > 0.0))
    throw IllPosedError("svrg_rho: needs 1 - 2 L gamma > 0");
  return 1.0 / (rate_const * gamma * denom * static_cast<double>(m)) +
         2.0 * L * gamma / denom;
}

double theoretical_suboptimality(Algorithm alg, Setting setting, const RateInputs& in,
                                 long T) {
  need_L(in);
  if (T < 0) throw std::invalid_argument("rates: T must be nonnegative");
  const double c = rate_const(setting, in);
  switch (alg) {
    case Algorithm::sgd: {
      if (!(in.gamma > 0.0)) throw std::invalid_argument("rates: sgd needs gamma > 0");
      return ipow(1.0 - 2.0 * in.gamma * c, T) +
             in.gamma * in.L * in.L / (2.0 * c);
    }
    case Algorithm::gd:
      return ipow(1.0 - c / in.L, T);
    case Algorithm::rcd: {
      if (in.d < 1) throw std::invalid_argument("rates: rcd needs d >= 1");
      return ipow(1.0 - c / (static_cast<double>(in.d) * in.L), T);
    }
    case Algorithm::svrg:
      return ipow(svrg_rho(c, in.L, in.gamma, in.m), T);
  }
  throw std::invalid_argument("rates: unknown algorithm");
}

double stability_target(Setting setting, const RateInputs& in) {
  need_L(in);
  if (in.n < 1) throw std::invalid_argument("rates: n must be positive");
  const double c = rate_const(setting, in);
  return in.L * in.L / (c * static_cast<double>(in.n));
}

namespace {

long ceil_log_ratio(double arg, double contraction, const char* what) {
  if (!(arg > 0.0) || arg >= 1.0)
    throw IllPosedError(std::string(what) +
                        ": needs rate-constant * n > L so the log target is negative");
  if (!(contraction > 0.0) || contraction >= 1.0)
    throw IllPosedError(std::string(what) + ": contraction factor must lie in (0,1)");
  return static_cast<long>(std::ceil(std::log(arg) / std::log(contraction)));
}

}  // namespace

long iterations_for_stability(Algorithm alg, Setting setting, const RateInputs& in) {
  need_L(in);
  if (in.n < 1) throw std::invalid_argument("rates: n must be positive");
  const double c = rate_const(setting, in);
  const double arg = in.L / (c * static_cast<double>(in.n));
  switch (alg) {
    case Algorithm::sgd:
      return static_cast<long>(std::ceil(in.L * static_cast<double>(in.n) / c));
    case Algorithm::gd:
      return ceil_log_ratio(arg, 1.0 - c / in.L, "iterations_for_stability[gd]");
    case Algorithm::rcd: {
      if (in.d < 1) throw std::invalid_argument("rates: rcd needs d >= 1");
      return ceil_log_ratio(arg, 1.0 - c / (static_cast<double>(in.d) * in.L),
                            "iterations_for_stability[rcd]");
    }
    case Algorithm::svrg:
      return ceil_log_ratio(arg, svrg_rho(c, in.L, in.gamma, in.m),
                            "iterations_for_stability[svrg]");
  }
  throw std::invalid_argument("rates: unknown algorithm");
}

namespace {

// The geometric component alone; for sgd the recorded step choice gamma = 1/n
// makes the floor half the target and the contraction part comparable.
double contraction_component(Algorithm alg, Setting setting, const RateInputs& in,
                             long T) {
  const double c = rate_const(setting, in);
  switch (alg) {
    case Algorithm::sgd: {
      const double gamma = 1.0 / static_cast<double>(in.n);
      return ipow(1.0 - 2.0 * gamma * c, T);
    }
    case Algorithm::gd:
      return ipow(1.0 - c / in.L, T);
    case Algorithm::rcd:
      return ipow(1.0 - c / (static_cast<double>(in.d) * in.L), T);
    case Algorithm::svrg:
      return ipow(svrg_rho(c, in.L, in.gamma, in.m), T);
  }
  return 0.0;
}

bool setting_available(Setting s, const RateInputs& in) {
  return (s == Setting::sc ? in.lambda : in.mu) > 0.0;
}

bool alg_available(Algorithm a, const RateInputs& in) {
  switch (a) {
    case Algorithm::sgd: return in.gamma > 0.0;
    case Algorithm::gd: return true;
    case Algorithm::rcd: return in.d >= 1;
    case Algorithm::svrg: return in.gamma > 0.0 && in.m >= 1;
  }
  return false;
}

constexpr Algorithm kAllAlgs[] = {Algorithm::sgd, Algorithm::gd, Algorithm::rcd,
                                  Algorithm::svrg};
constexpr Setting kAllSettings[] = {Setting::sc, Setting::pl};

}  // namespace

Table suboptimality_table(const RateInputs& in, long T) {
  Table t({"algorithm", "setting", "T", "value"}, {true, true, false, false});
  for (Setting s : kAllSettings) {
    if (!setting_available(s, in)) continue;
    for (Algorithm a : kAllAlgs) {
      if (!alg_available(a, in)) continue;
      t.add_row({algorithm_name(a), setting_name(s), Table::fmt(double(T)),
                 Table::fmt(theoretical_suboptimality(a, s, in, T))});
    }
  }
  t.meta("constants_policy", "O(.) evaluated with constant 1");
  return t;
}

Table iteration_table(const RateInputs& in) {
  Table t({"algorithm", "setting", "T", "target", "plug_back"},
          {true, true, false, false, false});
  for (Setting s : kAllSettings) {
    if (!setting_available(s, in)) continue;
    for (Algorithm a : kAllAlgs) {
      if (!alg_available(a, in)) continue;
      const long T = iterations_for_stability(a, s, in);
      t.add_row({algorithm_name(a), setting_name(s), Table::fmt(double(T)),
                 Table::fmt(stability_target(s, in)),
                 Table::fmt(contraction_component(a, s, in, T))});
    }
  }
  t.meta("constants_policy", "O(.) evaluated with constant 1");
  t.meta("sgd_step_choice", "gamma = 1/n");
  return t;
}

RateFit fit_rate(const Problem& p, const Dataset& S, const RunConfig& cfg, const Vec& w0,
                 long replicas, std::optional<double> f_star, int jobs) {
  if (replicas < 1) throw std::invalid_argument("fit_rate: replicas must be positive");
  double fs;
  if (f_star) {
    fs = *f_star;
  } else {
    auto v = p.optimal_value(S);
    if (!v)
      throw std::invalid_argument(
          "fit_rate: problem has no optimal-value oracle; pass f_star");
    fs = *v;
  }

  std::vector<std::vector<double>> gaps(static_cast<std::size_t>(replicas));
  std::vector<char> ok(static_cast<std::size_t>(replicas), 0);
  parallel_for(replicas, jobs, [&](long r) {
    RunConfig rc = cfg;
    rc.seed = Rng::mix(cfg.seed, static_cast<std::uint64_t>(r));
    rc.iterate_budget = 0;
    Trajectory traj = run(p, S, rc, w0);
    if (traj.diverged()) return;
    auto& g = gaps[static_cast<std::size_t>(r)];
    g.resize(traj.risks.size());
    for (std::size_t t = 0; t < traj.risks.size(); ++t) g[t] = traj.risks[t] - fs;
    ok[static_cast<std::size_t>(r)] = 1;
  });

  std::size_t track_len = 0;
  for (std::size_t r = 0; r < gaps.size(); ++r)
    if (ok[r]) track_len = std::max(track_len, gaps[r].size());
  long used_replicas = 0;
  for (std::size_t r = 0; r < gaps.size(); ++r) {
    if (ok[r] && gaps[r].size() != track_len) ok[r] = 0;
    if (ok[r]) ++used_replicas;
  }
  if (used_replicas == 0) throw std::runtime_error("fit_rate: every replica diverged");

  std::vector<double> mean_gap(track_len, 0.0);
  for (std::size_t r = 0; r < gaps.size(); ++r) {
    if (!ok[r]) continue;
    for (std::size_t t = 0; t < track_len; ++t) mean_gap[t] += gaps[r][t];
  }
  for (double& g : mean_gap) g /= static_cast<double>(used_replicas);

  RateFit fit;
  fit.replicas = used_replicas;
  fit.seed_base = cfg.seed;
  fit.initial_gap = mean_gap.front();
  double lo = mean_gap.front();
  for (double g : mean_gap) lo = std::min(lo, g);
  fit.floor = std::max(lo, 0.0);

  const double upper = 0.5 * fit.initial_gap;
  const double lower = 10.0 * fit.floor;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t t = 0; t < track_len; ++t) {
    const double g = mean_gap[t];
    if (!(g > 0.0) || g > upper || g < lower) continue;
    const double x = static_cast<double>(t);
    const double y = std::log(g);
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(pts.size());
  fit.points_used = static_cast<long>(pts.size());
  fit.inconclusive = pts.size() < 5;
  if (pts.size() >= 2) {
    const double denom = k * sxx - sx * sx;
    fit.slope = (k * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.slope * sx) / k;
    if (pts.size() >= 3) {
      double ssr = 0.0;
      for (auto& [x, y] : pts) {
        const double e = y - (intercept + fit.slope * x);
        ssr += e * e;
      }
      const double var = ssr / (k - 2.0);
      fit.slope_stderr = std::sqrt(var * k / denom);
    }
    fit.rho_hat = std::exp(fit.slope);
    fit.rho_lo = std::exp(fit.slope - 2.0 * fit.slope_stderr);
    fit.rho_hi = std::exp(fit.slope + 2.0 * fit.slope_stderr);
  }
  return fit;
}

Table rate_fit_table(const RateFit& fit) {
  Table t({"rho_hat", "rho_lo", "rho_hi", "slope", "slope_stderr", "floor",
           "initial_gap", "points_used", "replicas", "inconclusive"});
  t.add_row({fit.rho_hat, fit.rho_lo, fit.rho_hi, fit.slope, fit.slope_stderr, fit.floor,
             fit.initial_gap, double(fit.points_used), double(fit.replicas),
             fit.inconclusive ? 1.0 : 0.0});
  t.meta("seed_base", double(fit.seed_base));
  return t;
}

}  // namespace stablab
