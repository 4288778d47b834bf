#include "stablab.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "counterexample.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "linnet.hpp"
#include "optim.hpp"
#include "parallel.hpp"
#include "problems.hpp"
#include "rates.hpp"
#include "rng.hpp"
#include "stability.hpp"
#include "table.hpp"
#include "types.hpp"

#ifndef STABLAB_VERSION_STRING
#define STABLAB_VERSION_STRING "0.0.0"
#endif

struct stablab_problem {
  stablab::ProblemPtr p;
  std::string kind;
};

struct stablab_dataset {
  stablab::Dataset d;
};

struct stablab_table {
  stablab::Table t;
};

namespace {

thread_local std::string g_error;

int fail(int code, const std::string& msg) {
  g_error = msg;
  return code;
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    g_error.clear();
    return STABLAB_OK;
  } catch (const stablab::UnsupportedError& e) {
    return fail(STABLAB_ERR_UNSUPPORTED, e.what());
  } catch (const stablab::IllPosedError& e) {
    return fail(STABLAB_ERR_ILL_POSED, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(STABLAB_ERR_INVALID, e.what());
  } catch (const std::out_of_range& e) {
    return fail(STABLAB_ERR_INVALID, e.what());
  } catch (const std::logic_error& e) {
    return fail(STABLAB_ERR_INVALID, e.what());
  } catch (const std::runtime_error& e) {
    return fail(STABLAB_ERR_RUNTIME, e.what());
  } catch (const std::exception& e) {
    return fail(STABLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(STABLAB_ERR_INTERNAL, "unknown failure");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

stablab::Vec to_vec(const double* data, long len, const char* what) {
  require(data != nullptr || len == 0, what);
  require(len >= 0, what);
  stablab::Vec v(len);
  for (long i = 0; i < len; ++i) v[i] = data[i];
  return v;
}

stablab::Mat to_mat(const double* data, long rows, long cols, const char* what) {
  require(data != nullptr, what);
  require(rows > 0 && cols > 0, what);
  stablab::Mat m(rows, cols);
  for (long j = 0; j < cols; ++j)
    for (long i = 0; i < rows; ++i) m(i, j) = data[j * rows + i];
  return m;
}

stablab::Algorithm to_alg(int a) {
  switch (a) {
    case STABLAB_ALG_GD: return stablab::Algorithm::gd;
    case STABLAB_ALG_SGD: return stablab::Algorithm::sgd;
    case STABLAB_ALG_RCD: return stablab::Algorithm::rcd;
    case STABLAB_ALG_SVRG: return stablab::Algorithm::svrg;
    default: throw std::invalid_argument("unknown algorithm id");
  }
}

stablab::Setting to_setting(int s) {
  switch (s) {
    case STABLAB_SETTING_SC: return stablab::Setting::sc;
    case STABLAB_SETTING_PL: return stablab::Setting::pl;
    default: throw std::invalid_argument("unknown setting id");
  }
}

stablab::StepSchedule to_schedule(int kind, double value) {
  switch (kind) {
    case STABLAB_STEP_CONSTANT: return stablab::StepSchedule::constant(value);
    case STABLAB_STEP_INVERSE_T: return stablab::StepSchedule::inverse_t(value);
    default: throw std::invalid_argument("unknown step schedule id");
  }
}

stablab::Region to_region(int kind, double a, double b) {
  switch (kind) {
    case STABLAB_REGION_BALL: return stablab::Region::ball(a);
    case STABLAB_REGION_INTERVAL: return stablab::Region::interval(a, b);
    default: throw std::invalid_argument("unknown region id");
  }
}

double or_zero(double v) { return std::isnan(v) ? 0.0 : v; }

long whole(double v, const char* what) {
  if (std::isnan(v)) return 0;
  require(v >= 0 && v == std::floor(v), what);
  return static_cast<long>(v);
}

stablab::RateInputs to_inputs(double lambda, double mu, double L, double gamma,
                              double d, double m, double n) {
  stablab::RateInputs in;
  in.lambda = or_zero(lambda);
  in.mu = or_zero(mu);
  in.L = or_zero(L);
  in.gamma = or_zero(gamma);
  in.d = whole(d, "d must be a whole number");
  in.m = whole(m, "m must be a whole number");
  in.n = whole(n, "n must be a whole number");
  return in;
}

std::string join_vec(const stablab::Vec& v) {
  std::string s;
  for (long i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += stablab::Table::fmt(v[i]);
  }
  return s;
}

void emit(stablab::Table t, stablab_table** out) {
  require(out != nullptr, "null output pointer");
  *out = new stablab_table{std::move(t)};
}

std::vector<long> to_ns(const long* ns, long count) {
  require(ns != nullptr && count > 0, "need at least one n value");
  return std::vector<long>(ns, ns + count);
}

}  // namespace

extern "C" {

const char* stablab_version(void) { return STABLAB_VERSION_STRING; }

const char* stablab_last_error(void) { return g_error.c_str(); }

/* ---- problems ------------------------------------------------------- */

int stablab_problem_quadratic(const double* curvatures, long d, stablab_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    auto p = stablab::make_quadratic(to_vec(curvatures, d, "null curvature array"));
    *out = new stablab_problem{p, p->kind()};
  });
}

int stablab_problem_quartic(int m, stablab_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    auto p = stablab::make_quartic(m);
    *out = new stablab_problem{p, p->kind()};
  });
}

int stablab_problem_leaky_relu(const double* x, long rows, long cols, const double* y,
                               double c1, double c2, double lambda_g,
                               stablab_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    auto p = stablab::make_leaky_relu(to_mat(x, rows, cols, "null or empty design matrix"),
                                      to_vec(y, rows, "null label array"), c1, c2,
                                      lambda_g);
    *out = new stablab_problem{p, p->kind()};
  });
}

int stablab_problem_linnet(const double* x, long d, long cols, const double* y,
                           int depth, stablab_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    stablab::DataMatrices data(to_mat(x, d, cols, "null or empty input matrix"),
                               to_mat(y, d, cols, "null or empty target matrix"));
    auto p = stablab::make_linnet(std::move(data), depth);
    *out = new stablab_problem{p, p->kind()};
  });
}

void stablab_problem_free(stablab_problem* p) { delete p; }

int stablab_problem_kind(const stablab_problem* p, const char** out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null pointer");
    *out = p->kind.c_str();
  });
}

int stablab_problem_dim(const stablab_problem* p, long* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null pointer");
    *out = p->p->dim();
  });
}

int stablab_problem_example_dim(const stablab_problem* p, long* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null pointer");
    *out = p->p->example_dim();
  });
}

int stablab_problem_loss(const stablab_problem* p, const double* w, long wd,
                         const double* x, long xd, double y, double* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null pointer");
    stablab::Example z;
    z.x = to_vec(x, xd, "null example");
    z.y = y;
    *out = p->p->loss(to_vec(w, wd, "null parameter vector"), z);
  });
}

int stablab_problem_grad(const stablab_problem* p, const double* w, long wd,
                         const double* x, long xd, double y, double* out_grad) {
  return guarded([&] {
    require(p != nullptr && out_grad != nullptr, "null pointer");
    stablab::Example z;
    z.x = to_vec(x, xd, "null example");
    z.y = y;
    const stablab::Vec g = p->p->grad_loss(to_vec(w, wd, "null parameter vector"), z);
    for (long i = 0; i < g.size(); ++i) out_grad[i] = g[i];
  });
}

int stablab_problem_risk(const stablab_problem* p, const double* w, long wd,
                         const stablab_dataset* s, double* out) {
  return guarded([&] {
    require(p != nullptr && s != nullptr && out != nullptr, "null pointer");
    *out = p->p->empirical_risk(to_vec(w, wd, "null parameter vector"), s->d);
  });
}

/* ---- datasets ------------------------------------------------------- */

int stablab_dataset_new(stablab_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = new stablab_dataset{};
  });
}

int stablab_dataset_add(stablab_dataset* s, const double* x, long xd, double y) {
  return guarded([&] {
    require(s != nullptr, "null dataset");
    s->d.add(to_vec(x, xd, "null example"), y);
  });
}

int stablab_dataset_size(const stablab_dataset* s, long* out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null pointer");
    *out = s->d.size();
  });
}

int stablab_dataset_example(const stablab_dataset* s, long i, double* x_out, long xd,
                            double* y_out) {
  return guarded([&] {
    require(s != nullptr && x_out != nullptr && y_out != nullptr, "null pointer");
    require(i >= 0 && i < static_cast<long>(s->d.size()), "example index out of range");
    const stablab::Example& e = s->d[i];
    require(xd == e.x.size(), "example buffer length mismatch");
    for (long k = 0; k < e.x.size(); ++k) x_out[k] = e.x[k];
    *y_out = e.y;
  });
}

int stablab_dataset_neighbor(const stablab_dataset* s, long i, const double* x,
                             long xd, double y, stablab_dataset** out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null pointer");
    stablab::Example z;
    z.x = to_vec(x, xd, "null example");
    z.y = y;
    *out = new stablab_dataset{s->d.neighbor(i, z)};
  });
}

int stablab_dataset_drop(const stablab_dataset* s, long i, stablab_dataset** out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null pointer");
    *out = new stablab_dataset{s->d.drop(i)};
  });
}

int stablab_dataset_random(const stablab_problem* p, long n, unsigned long long seed,
                           stablab_dataset** out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null pointer");
    require(n > 0, "dataset size must be positive");
    const std::string& kind = p->kind;
    const bool labeled = p->p->example_uses_label();
    if (kind != "quadratic" && kind != "quartic") {
      throw stablab::UnsupportedError(
          "random datasets exist for the quadratic and quartic kinds; use "
          "stablab_dataset_canonical for " + kind);
    }
    stablab::Rng rng(seed);
    auto ds = std::make_unique<stablab_dataset>();
    const int xd = p->p->example_dim();
    for (long i = 0; i < n; ++i) {
      stablab::Vec x(xd);
      for (int k = 0; k < xd; ++k) x[k] = rng.normal();
      const double y = labeled ? rng.normal() : 0.0;
      ds->d.add(std::move(x), y);
    }
    *out = ds.release();
  });
}

int stablab_dataset_canonical(const stablab_problem* p, stablab_dataset** out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null pointer");
    auto ds = p->p->canonical_dataset();
    if (!ds) {
      throw stablab::UnsupportedError("the " + p->kind +
                                      " kind carries no canonical dataset");
    }
    *out = new stablab_dataset{std::move(*ds)};
  });
}

void stablab_dataset_free(stablab_dataset* s) { delete s; }

/* ---- optimizer runs ------------------------------------------------- */

int stablab_run(const stablab_problem* p, const stablab_dataset* s, int algorithm,
                long iters, int step_kind, double step_value, unsigned long long seed,
                long svrg_inner, const double* w0, long w0_len, stablab_table** out) {
  return guarded([&] {
    require(p != nullptr && s != nullptr, "null pointer");
    stablab::RunConfig cfg;
    cfg.alg = to_alg(algorithm);
    cfg.iters = iters;
    cfg.schedule = to_schedule(step_kind, step_value);
    cfg.seed = seed;
    cfg.svrg_inner = svrg_inner;
    stablab::Vec start;
    if (w0 == nullptr) {
      start = stablab::Vec::Zero(p->p->dim());
    } else {
      start = to_vec(w0, w0_len, "null start vector");
    }
    const stablab::Trajectory traj = stablab::run(*p->p, s->d, cfg, start);
    stablab::Table t({"t", "risk", "grad_norm", "drift"});
    for (std::size_t i = 0; i < traj.risks.size(); ++i) {
      t.add_row({static_cast<double>(i), traj.risks[i], traj.grad_norms[i],
                 traj.drift[i]});
    }
    t.meta("algorithm", stablab::algorithm_name(cfg.alg));
    t.meta("steps", static_cast<double>(traj.steps()));
    t.meta("final_risk", traj.risks.back());
    t.meta("final_grad_norm", traj.grad_norms.back());
    t.meta("max_stoch_grad_norm", traj.max_stoch_grad_norm);
    t.meta("diverged_at", static_cast<double>(traj.diverged_at));
    t.meta("seed", std::to_string(seed));
    emit(std::move(t), out);
  });
}

int stablab_fit_rate(const stablab_problem* p, const stablab_dataset* s, int algorithm,
                     long iters, int step_kind, double step_value,
                     unsigned long long seed, long svrg_inner, const double* w0,
                     long w0_len, long replicas, double f_star, int jobs,
                     stablab_table** out) {
  return guarded([&] {
    require(p != nullptr && s != nullptr, "null pointer");
    stablab::RunConfig cfg;
    cfg.alg = to_alg(algorithm);
    cfg.iters = iters;
    cfg.schedule = to_schedule(step_kind, step_value);
    cfg.seed = seed;
    cfg.svrg_inner = svrg_inner;
    stablab::Vec start;
    if (w0 == nullptr) {
      start = stablab::Vec::Zero(p->p->dim());
    } else {
      start = to_vec(w0, w0_len, "null start vector");
    }
    std::optional<double> fs;
    if (!std::isnan(f_star)) fs = f_star;
    const stablab::RateFit fit =
        stablab::fit_rate(*p->p, s->d, cfg, start, replicas, fs, jobs);
    emit(stablab::rate_fit_table(fit), out);
  });
}

/* ---- closed-form rate arithmetic ------------------------------------ */

int stablab_suboptimality(int algorithm, int setting, double lambda, double mu,
                          double L, double gamma, double d, double m, double n,
                          long T, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = stablab::theoretical_suboptimality(
        to_alg(algorithm), to_setting(setting),
        to_inputs(lambda, mu, L, gamma, d, m, n), T);
  });
}

int stablab_suboptimality_table(double lambda, double mu, double L, double gamma,
                                double d, double m, double n, long T,
                                stablab_table** out) {
  return guarded([&] {
    emit(stablab::suboptimality_table(to_inputs(lambda, mu, L, gamma, d, m, n), T),
         out);
  });
}

int stablab_iterations(int algorithm, int setting, double lambda, double mu, double L,
                       double gamma, double d, double m, double n, long* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = stablab::iterations_for_stability(
        to_alg(algorithm), to_setting(setting),
        to_inputs(lambda, mu, L, gamma, d, m, n));
  });
}

int stablab_iteration_table(double lambda, double mu, double L, double gamma, double d,
                            double m, double n, stablab_table** out) {
  return guarded([&] {
    emit(stablab::iteration_table(to_inputs(lambda, mu, L, gamma, d, m, n)), out);
  });
}

int stablab_svrg_rho(double rate_constant, double L, double gamma, double m,
                     double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = stablab::svrg_rho(rate_constant, L, gamma,
                             whole(m, "m must be a whole number"));
  });
}

/* ---- landscape geometry --------------------------------------------- */

int stablab_geometry_check(const stablab_problem* p, const stablab_dataset* s,
                           int region_kind, double region_a, double region_b,
                           long samples, int use_grid, unsigned long long seed,
                           const char* quantities, double f_star,
                           stablab_table** out) {
  return guarded([&] {
    require(p != nullptr && s != nullptr && quantities != nullptr, "null pointer");
    const stablab::Region region = to_region(region_kind, region_a, region_b);
    const stablab::RegionSampler sampler(region, samples, seed, use_grid != 0);
    std::optional<double> fs;
    if (!std::isnan(f_star)) fs = f_star;

    std::vector<std::string> names;
    std::stringstream ss(quantities);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto b = tok.find_first_not_of(" \t");
      const auto e = tok.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      names.push_back(tok.substr(b, e - b + 1));
    }
    require(!names.empty(), "empty quantity list");

    stablab::Table t({"quantity", "value", "samples_used", "samples_excluded",
                      "f_star", "f_star_mode", "witness"},
                     {true, false, false, false, true, true, true});
    for (const auto& name : names) {
      stablab::GeometryEstimate est;
      if (name == "lipschitz") {
        est = stablab::estimate_lipschitz(*p->p, s->d, sampler);
      } else if (name == "smoothness") {
        est = stablab::estimate_smoothness(*p->p, s->d, sampler);
      } else if (name == "pl") {
        est = stablab::estimate_pl(*p->p, s->d, sampler, fs);
      } else if (name == "qg") {
        est = stablab::estimate_qg(*p->p, s->d, sampler, fs);
      } else if (name == "error-bound") {
        est = stablab::estimate_error_bound(*p->p, s->d, sampler);
      } else {
        throw std::invalid_argument("unknown quantity: " + name);
      }
      t.add_row({est.quantity, stablab::Table::fmt(est.value),
                 stablab::Table::fmt(static_cast<double>(est.samples_used)),
                 stablab::Table::fmt(static_cast<double>(est.samples_excluded)),
                 est.f_star_used ? stablab::Table::fmt(est.f_star) : std::string(),
                 est.f_star_used
                     ? std::string(est.f_star_empirical ? "empirical-multistart"
                                                        : "oracle")
                     : std::string(),
                 join_vec(est.witness)});
    }
    t.meta("region", region.describe());
    t.meta("samples", static_cast<double>(samples));
    t.meta("seed", std::to_string(seed));
    emit(std::move(t), out);
  });
}

int stablab_grad_check(const stablab_problem* p, const stablab_dataset* s,
                       int region_kind, double region_a, double region_b,
                       long samples, int use_grid, unsigned long long seed,
                       double tol, stablab_table** out) {
  return guarded([&] {
    require(p != nullptr && s != nullptr, "null pointer");
    const stablab::Region region = to_region(region_kind, region_a, region_b);
    const stablab::RegionSampler sampler(region, samples, seed, use_grid != 0);
    stablab::Table t = stablab::grad_check_table(
        stablab::grad_check(*p->p, s->d, sampler, tol));
    t.meta("region", region.describe());
    t.meta("seed", std::to_string(seed));
    emit(std::move(t), out);
  });
}

/* ---- stability ------------------------------------------------------ */

int stablab_stability_sweep(int mode, const long* ns, long ns_count, int d,
                            double curv_min, double curv_max, long replicas,
                            unsigned long long seed, int jobs, stablab_table** out) {
  return guarded([&] {
    stablab::SweepOptions opt;
    opt.ns = to_ns(ns, ns_count);
    switch (mode) {
      case STABLAB_STABILITY_UNIFORM: opt.mode = stablab::StabilityMode::uniform; break;
      case STABLAB_STABILITY_POINTWISE:
        opt.mode = stablab::StabilityMode::pointwise;
        break;
      default: throw std::invalid_argument("unknown stability mode id");
    }
    opt.d = d;
    opt.curv_min = curv_min;
    opt.curv_max = curv_max;
    opt.replicas = replicas;
    opt.seed = seed;
    opt.jobs = jobs;
    emit(stablab::stability_sweep(opt), out);
  });
}

int stablab_blackbox_bound(int theorem, int case_id, double L, double mu, double c,
                           long n, double eps_dist, double eps_val, double eps_grad,
                           double out_terms[3]) {
  return guarded([&] {
    require(out_terms != nullptr, "null output pointer");
    stablab::BlackboxTheorem thm;
    switch (theorem) {
      case STABLAB_THM_PL_PTWISE: thm = stablab::BlackboxTheorem::pl_ptwise; break;
      case STABLAB_THM_QG_PTWISE: thm = stablab::BlackboxTheorem::qg_ptwise; break;
      case STABLAB_THM_PL_UNIFORM: thm = stablab::BlackboxTheorem::pl_uniform; break;
      case STABLAB_THM_QG_UNIFORM: thm = stablab::BlackboxTheorem::qg_uniform; break;
      default: throw std::invalid_argument("unknown theorem id");
    }
    stablab::BlackboxInputs in;
    in.L = L;
    in.mu = mu;
    in.c = or_zero(c);
    in.n = n;
    if (!std::isnan(eps_dist)) in.eps_dist = eps_dist;
    if (!std::isnan(eps_val)) in.eps_val = eps_val;
    if (!std::isnan(eps_grad)) in.eps_grad = eps_grad;
    const stablab::BoundReport rep = stablab::blackbox_bound(thm, case_id, in);
    out_terms[0] = rep.bound;
    out_terms[1] = rep.term_convergence;
    out_terms[2] = rep.term_intrinsic;
  });
}

int stablab_generalization_bound_uniform(double eps, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = stablab::generalization_bound_uniform(eps);
  });
}

int stablab_generalization_bound_pointwise(double M, long n, double beta, double delta,
                                           double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = stablab::generalization_bound_pointwise(M, n, beta, delta);
  });
}

int stablab_gen_gap_sweep(const long* ns, long ns_count, int d, double curv_min,
                          double curv_max, long trials, long mc_samples,
                          unsigned long long seed, int jobs, stablab_table** out) {
  return guarded([&] {
    const std::vector<long> sizes = to_ns(ns, ns_count);
    require(d >= 1, "d must be positive");
    require(curv_min > 0 && curv_max >= curv_min, "need 0 < curv_min <= curv_max");
    stablab::Vec curv(d);
    for (int k = 0; k < d; ++k) {
      curv[k] = d == 1 ? curv_min
                       : curv_min + (curv_max - curv_min) * k / double(d - 1);
    }
    const stablab::ProblemPtr p = stablab::make_quadratic(curv);
    const stablab::ExampleGenerator gen = stablab::gaussian_example_generator(d);
    const stablab::Trainer trainer = stablab::Trainer::erm_oracle();

    stablab::Table t({"n", "mean_gap", "mean_empirical_risk", "mean_population_risk",
                      "trials"});
    for (const long n : sizes) {
      const stablab::GeneralizationGapReport rep = stablab::measure_generalization_gap(
          *p, gen, trainer, n, trials, stablab::Rng::mix(seed, n), jobs, mc_samples);
      t.add_row({static_cast<double>(n), rep.mean_gap, rep.mean_empirical_risk,
                 rep.mean_population_risk, static_cast<double>(rep.trials)});
    }
    t.meta("d", static_cast<double>(d));
    t.meta("curv_min", curv_min);
    t.meta("curv_max", curv_max);
    t.meta("mc_samples", static_cast<double>(mc_samples));
    t.meta("trainer", trainer.name());
    t.meta("seed", std::to_string(seed));
    emit(std::move(t), out);
  });
}

/* ---- scalar quartic counterexample ---------------------------------- */

int stablab_counterexample_center(double* what, double* slope_first,
                                  double* slope_second) {
  return guarded([&] {
    const stablab::QuarticLandscape L = stablab::make_landscape();
    const double w = L.what;
    if (what != nullptr) *what = w;
    auto slope = [&](double x, double y) {
      const double u = w * x;
      return 2.0 * (u * u + u - y) * (2.0 * u + 1.0) * x;
    };
    if (slope_first != nullptr) *slope_first = slope(-1.0, 1.0);
    if (slope_second != nullptr) *slope_second = slope(-0.5, 1.0);
  });
}

int stablab_counterexample_gd(long n, double eps, double gamma, long inits,
                              unsigned long long seed, int jobs, stablab_table** out) {
  return guarded([&] {
    emit(stablab::gd_instability_table(
             stablab::gd_instability_experiment(n, eps, gamma, inits, seed, jobs)),
         out);
  });
}

int stablab_counterexample_sgd(const long* ns, long ns_count, double eps,
                               long replicas, unsigned long long seed, int jobs,
                               stablab_table** out) {
  return guarded([&] {
    emit(stablab::sgd_sweep_table(to_ns(ns, ns_count), eps, replicas, seed, jobs),
         out);
  });
}

/* ---- deep linear networks ------------------------------------------- */

int stablab_linnet_check(int d, long cols, int depth, long instances,
                         unsigned long long seed, int jobs, stablab_table** out) {
  return guarded([&] {
    require(instances > 0, "need at least one instance");
    struct Row {
      double tau = 0.0;
      double proj_slack = 0.0;
      double grad_slack = 0.0;
      double split_mismatch = 0.0;
      double pl_mu = 0.0;
      std::string cls;
    };
    std::vector<Row> rows(instances);
    stablab::parallel_for(instances, jobs, [&](long i) {
      stablab::Rng rng(stablab::Rng::mix(seed, static_cast<std::uint64_t>(i)));
      const stablab::DataMatrices data = stablab::DataMatrices::random(d, cols, rng);
      const stablab::LayerStack stack = stablab::LayerStack::random(depth, d, rng);
      const stablab::SlackReport proj = stablab::check_projection_lemma(stack, data);
      const stablab::SlackReport grad = stablab::check_grad_lower_bound(stack, data);
      const stablab::SplitReport split = stablab::check_residual_split(stack, data);
      const stablab::CriticalReport crit =
          stablab::classify_critical_point(stack, data);
      rows[i] = Row{grad.tau, proj.slack, grad.slack, split.mismatch,
                    stablab::linnet_pl_constant(depth, grad.tau, data),
                    stablab::critical_class_name(crit.cls)};
    });
    stablab::Table t({"instance", "tau", "proj_slack", "grad_slack", "split_mismatch",
                      "pl_mu", "class"},
                     {false, false, false, false, false, false, true});
    for (long i = 0; i < instances; ++i) {
      const Row& r = rows[i];
      t.add_row({stablab::Table::fmt(static_cast<double>(i)),
                 stablab::Table::fmt(r.tau), stablab::Table::fmt(r.proj_slack),
                 stablab::Table::fmt(r.grad_slack),
                 stablab::Table::fmt(r.split_mismatch), stablab::Table::fmt(r.pl_mu),
                 r.cls});
    }
    t.meta("d", static_cast<double>(d));
    t.meta("cols", static_cast<double>(cols));
    t.meta("depth", static_cast<double>(depth));
    t.meta("instances", static_cast<double>(instances));
    t.meta("seed", std::to_string(seed));
    emit(std::move(t), out);
  });
}

/* ---- tables --------------------------------------------------------- */

int stablab_table_rows(const stablab_table* t, long* out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null pointer");
    *out = static_cast<long>(t->t.rows());
  });
}

int stablab_table_cols(const stablab_table* t, long* out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null pointer");
    *out = static_cast<long>(t->t.cols());
  });
}

int stablab_table_column_name(const stablab_table* t, long j, const char** out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null pointer");
    require(j >= 0 && j < static_cast<long>(t->t.cols()), "column index out of range");
    *out = t->t.columns()[j].c_str();
  });
}

int stablab_table_column_is_text(const stablab_table* t, long j, int* out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null pointer");
    require(j >= 0 && j < static_cast<long>(t->t.cols()), "column index out of range");
    *out = t->t.text_col(j) ? 1 : 0;
  });
}

int stablab_table_cell(const stablab_table* t, long i, long j, const char** out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null pointer");
    *out = t->t.cell(i, j).c_str();
  });
}

int stablab_table_cell_num(const stablab_table* t, long i, long j, double* out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null pointer");
    *out = t->t.cell_num(i, j);
  });
}

int stablab_table_meta_count(const stablab_table* t, long* out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null pointer");
    *out = static_cast<long>(t->t.meta_entries().size());
  });
}

int stablab_table_meta(const stablab_table* t, long k, const char** key,
                       const char** value, int* is_text) {
  return guarded([&] {
    require(t != nullptr && key != nullptr && value != nullptr && is_text != nullptr,
            "null pointer");
    require(k >= 0 && k < static_cast<long>(t->t.meta_entries().size()),
            "meta index out of range");
    const auto& e = t->t.meta_entries()[k];
    *key = e.key.c_str();
    *value = e.value.c_str();
    *is_text = e.is_text ? 1 : 0;
  });
}

void stablab_table_free(stablab_table* t) { delete t; }

}  // extern "C"
