#include "stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "parallel.hpp"

namespace stablab {

Trainer Trainer::erm_oracle() {
  Trainer t;
  t.kind_ = Kind::erm;
  return t;
}

Trainer Trainer::optimizer(RunConfig cfg, Vec w0) {
  Trainer t;
  t.kind_ = Kind::optimizer;
  t.cfg_ = cfg;
  t.w0_ = std::move(w0);
  return t;
}

Trainer Trainer::optimizer_to_tol(RunConfig cfg, Vec w0, double grad_tol) {
  if (!(grad_tol > 0.0))
    throw std::invalid_argument("Trainer: gradient tolerance must be positive");
  Trainer t = optimizer(cfg, std::move(w0));
  t.grad_tol_ = grad_tol;
  return t;
}

bool Trainer::deterministic() const {
  return kind_ == Kind::erm || cfg_.alg == Algorithm::gd;
}

std::string Trainer::name() const {
  return kind_ == Kind::erm ? "erm" : algorithm_name(cfg_.alg);
}

Vec Trainer::train(const Problem& p, const Dataset& S, std::uint64_t replica_seed,
                   double* max_stoch) const {
  if (max_stoch) *max_stoch = 0.0;
  if (kind_ == Kind::erm) {
    auto w = p.erm_minimizer(S);
    if (!w)
      throw UnsupportedError("Trainer: " + p.kind() +
                             " has no closed-form minimizer for this dataset");
    return *w;
  }
  RunConfig cfg = cfg_;
  cfg.seed = replica_seed;
  cfg.iterate_budget = 0;
  for (;;) {
    Trajectory traj = run(p, S, cfg, w0_);
    if (traj.diverged())
      throw std::runtime_error("Trainer: run diverged at step " +
                               std::to_string(traj.diverged_at));
    if (!grad_tol_ || traj.grad_norms.back() <= *grad_tol_) {
      if (max_stoch) *max_stoch = traj.max_stoch_grad_norm;
      return traj.final_w;
    }
    if (cfg.iters >= (1L << 22))
      throw std::runtime_error("Trainer: stationarity tolerance not reached within " +
                               std::to_string(cfg.iters) + " steps");
    cfg.iters *= 2;
  }
}

std::vector<Example> make_probes(const Problem& p, std::uint64_t seed) {
  const int xd = p.example_dim();
  const bool label = p.example_uses_label();
  const int zd = xd + (label ? 1 : 0);
  std::vector<Example> out;

  auto push = [&](const Vec& z) {
    Example e;
    if (label) {
      e.x = z.head(xd);
      e.y = z[xd];
    } else {
      e.x = z;
    }
    out.push_back(std::move(e));
  };

  if (zd <= 2) {
    const long pts = 401;
    if (zd == 1) {
      Vec z(1);
      for (long i = 0; i < pts; ++i) {
        z[0] = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(pts - 1);
        push(z);
      }
    } else {
      Vec z(2);
      for (long i = 0; i < pts; ++i) {
        z[0] = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(pts - 1);
        for (long j = 0; j < pts; ++j) {
          z[1] = -2.0 + 4.0 * static_cast<double>(j) / static_cast<double>(pts - 1);
          if (z.norm() <= 2.0) push(z);
        }
      }
    }
  }

  Rng rng(seed);
  Vec z(zd);
  for (long i = 0; i < 1000; ++i) {
    for (int k = 0; k < zd; ++k) z[k] = rng.normal();
    const double norm = z.norm();
    const double r = 2.0 * std::pow(rng.uniform(), 1.0 / static_cast<double>(zd));
    if (norm > 0.0)
      z *= r / norm;
    else
      z.setZero();
    push(z);
  }
  return out;
}

namespace {

double max_example_grad(const Problem& p, const Vec& w, const Dataset& S) {
  double m = 0.0;
  for (const Example& z : S.examples()) m = std::max(m, p.grad_loss(w, z).norm());
  return m;
}

}  // namespace

UniformStabilityReport measure_uniform_stability(const Problem& p, const Dataset& S,
                                                 const Dataset& Sp, const Trainer& trainer,
                                                 const ReplicaConfig& rc,
                                                 const std::vector<Example>* probes) {
  if (!S.neighbors(Sp))
    throw std::invalid_argument("measure_uniform_stability: datasets are not neighbors");
  if (rc.replicas < 1)
    throw std::invalid_argument("measure_uniform_stability: replicas must be positive");

  const long reps = trainer.deterministic() ? 1 : rc.replicas;
  std::vector<Vec> wS(static_cast<std::size_t>(reps)), wSp(static_cast<std::size_t>(reps));
  parallel_for(reps, rc.jobs, [&](long r) {
    const std::uint64_t base = Rng::mix(rc.seed, static_cast<std::uint64_t>(r));
    const std::uint64_t s1 = rc.coupled ? base : Rng::mix(base, 1);
    const std::uint64_t s2 = rc.coupled ? base : Rng::mix(base, 2);
    wS[static_cast<std::size_t>(r)] = trainer.train(p, S, s1);
    wSp[static_cast<std::size_t>(r)] = trainer.train(p, Sp, s2);
  });

  std::vector<Example> local;
  if (!probes) {
    local = make_probes(p, Rng::mix(rc.seed, 0x9A0BE5));
    probes = &local;
  }

  UniformStabilityReport rep;
  rep.replicas = reps;
  rep.probes = static_cast<long>(probes->size());
  for (const Example& z : *probes) {
    double acc = 0.0;
    for (long r = 0; r < reps; ++r)
      acc += p.loss(wS[static_cast<std::size_t>(r)], z) -
             p.loss(wSp[static_cast<std::size_t>(r)], z);
    const double mean = acc / static_cast<double>(reps);
    if (std::abs(mean) > rep.value) {
      rep.value = std::abs(mean);
      rep.signed_value = mean;
      rep.witness = z;
    }
  }
  for (long r = 0; r < reps; ++r) {
    rep.lhat = std::max(rep.lhat, max_example_grad(p, wS[static_cast<std::size_t>(r)], S));
    rep.lhat = std::max(rep.lhat, max_example_grad(p, wS[static_cast<std::size_t>(r)], Sp));
    rep.lhat = std::max(rep.lhat, max_example_grad(p, wSp[static_cast<std::size_t>(r)], S));
    rep.lhat = std::max(rep.lhat, max_example_grad(p, wSp[static_cast<std::size_t>(r)], Sp));
  }
  return rep;
}

PointwiseStabilityReport measure_pointwise_stability(const Problem& p, const Dataset& S,
                                                     const Trainer& trainer,
                                                     const ReplicaConfig& rc) {
  if (S.size() < 2)
    throw std::invalid_argument("measure_pointwise_stability: need at least two examples");
  if (rc.replicas < 1)
    throw std::invalid_argument("measure_pointwise_stability: replicas must be positive");

  std::vector<std::size_t> idx;
  const std::size_t n = S.size();
  if (n <= 256) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
  } else {
    const std::size_t stride = n / 128;
    for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  }

  const long reps = trainer.deterministic() ? 1 : rc.replicas;
  std::vector<double> mean_r(static_cast<std::size_t>(reps), 0.0);
  std::vector<double> lhat_r(static_cast<std::size_t>(reps), 0.0);
  parallel_for(reps, rc.jobs, [&](long r) {
    const std::uint64_t base = Rng::mix(rc.seed, static_cast<std::uint64_t>(r));
    const Vec wS = trainer.train(p, S, base);
    double acc = 0.0;
    double lh = max_example_grad(p, wS, S);
    for (std::size_t i : idx) {
      const std::uint64_t si =
          rc.coupled ? base : Rng::mix(base, static_cast<std::uint64_t>(i) + 1);
      const Vec wi = trainer.train(p, S.drop(i), si);
      acc += std::abs(p.loss(wS, S[i]) - p.loss(wi, S[i]));
      lh = std::max(lh, p.grad_loss(wi, S[i]).norm());
    }
    mean_r[static_cast<std::size_t>(r)] = acc / static_cast<double>(idx.size());
    lhat_r[static_cast<std::size_t>(r)] = lh;
  });

  PointwiseStabilityReport rep;
  rep.replicas = reps;
  rep.indices_used = static_cast<long>(idx.size());
  for (long r = 0; r < reps; ++r) {
    rep.value += mean_r[static_cast<std::size_t>(r)];
    rep.lhat = std::max(rep.lhat, lhat_r[static_cast<std::size_t>(r)]);
  }
  rep.value /= static_cast<double>(reps);
  return rep;
}

const char* blackbox_theorem_name(BlackboxTheorem t) {
  switch (t) {
    case BlackboxTheorem::pl_ptwise: return "pl-ptwise";
    case BlackboxTheorem::qg_ptwise: return "qg-ptwise";
    case BlackboxTheorem::pl_uniform: return "pl-uniform";
    case BlackboxTheorem::qg_uniform: return "qg-uniform";
  }
  return "?";
}

BlackboxTheorem blackbox_theorem_from_name(const std::string& name) {
  if (name == "pl-ptwise") return BlackboxTheorem::pl_ptwise;
  if (name == "qg-ptwise") return BlackboxTheorem::qg_ptwise;
  if (name == "pl-uniform") return BlackboxTheorem::pl_uniform;
  if (name == "qg-uniform") return BlackboxTheorem::qg_uniform;
  throw std::invalid_argument("unknown black-box theorem: " + name);
}

BoundReport blackbox_bound(BlackboxTheorem theorem, int case_id, const BlackboxInputs& in) {
  if (!(in.L > 0.0)) throw std::invalid_argument("blackbox_bound: L must be positive");
  if (!(in.mu > 0.0)) throw std::invalid_argument("blackbox_bound: mu must be positive");
  const bool ptwise =
      theorem == BlackboxTheorem::pl_ptwise || theorem == BlackboxTheorem::qg_ptwise;
  const bool qg =
      theorem == BlackboxTheorem::qg_ptwise || theorem == BlackboxTheorem::qg_uniform;
  if (in.n < (ptwise ? 2 : 1))
    throw std::invalid_argument("blackbox_bound: n too small for this theorem");
  if (qg && case_id == 3)
    throw std::invalid_argument("blackbox_bound: the qg theorems admit cases 1 and 2 only");
  if (case_id < 1 || case_id > 3)
    throw std::invalid_argument("blackbox_bound: case must be 1, 2, or 3");
  if (qg && !(in.c > 0.0))
    throw std::invalid_argument("blackbox_bound: the qg theorems need the loss bound c");

  BoundReport rep;
  rep.theorem = theorem;
  rep.case_id = case_id;

  switch (case_id) {
    case 1:
      if (!in.eps_dist)
        throw std::invalid_argument("blackbox_bound: case 1 needs the distance measure");
      if (*in.eps_dist < 0.0)
        throw std::invalid_argument("blackbox_bound: convergence measures are nonnegative");
      rep.term_convergence = in.L * *in.eps_dist;
      break;
    case 2:
      if (!in.eps_val)
        throw std::invalid_argument("blackbox_bound: case 2 needs the value-gap measure");
      if (*in.eps_val < 0.0)
        throw std::invalid_argument("blackbox_bound: convergence measures are nonnegative");
      rep.term_convergence = in.L * std::sqrt(*in.eps_val / in.mu);
      break;
    case 3:
      if (!in.eps_grad)
        throw std::invalid_argument("blackbox_bound: case 3 needs the gradient-norm measure");
      if (*in.eps_grad < 0.0)
        throw std::invalid_argument("blackbox_bound: convergence measures are nonnegative");
      rep.term_convergence = in.L * *in.eps_grad / in.mu;
      break;
  }

  if (qg) {
    rep.term_intrinsic =
        2.0 * in.L * std::sqrt(in.c / (in.mu * static_cast<double>(in.n)));
  } else {
    const double denom = ptwise ? static_cast<double>(in.n - 1) : static_cast<double>(in.n);
    rep.term_intrinsic = 2.0 * in.L * in.L / (in.mu * denom);
  }
  rep.bound = rep.term_convergence + rep.term_intrinsic;
  return rep;
}

double generalization_bound_uniform(double eps) {
  if (eps < 0.0)
    throw std::invalid_argument("generalization_bound_uniform: eps must be nonnegative");
  return eps;
}

double generalization_bound_pointwise(double M, long n, double beta, double delta) {
  if (!(M > 0.0))
    throw std::invalid_argument("generalization_bound_pointwise: M must be positive");
  if (n < 1) throw std::invalid_argument("generalization_bound_pointwise: n must be positive");
  if (beta < 0.0)
    throw std::invalid_argument("generalization_bound_pointwise: beta must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("generalization_bound_pointwise: delta must lie in (0,1)");
  return std::sqrt((M * M + 12.0 * M * static_cast<double>(n) * beta) /
                   (2.0 * static_cast<double>(n) * delta));
}

ExampleGenerator gaussian_example_generator(int dim, double scale) {
  if (dim < 1) throw std::invalid_argument("gaussian_example_generator: dim must be positive");
  return [dim, scale](Rng& rng) {
    Example e;
    e.x.resize(dim);
    for (int k = 0; k < dim; ++k) e.x[k] = scale * rng.normal();
    return e;
  };
}

ExampleGenerator two_atom_generator(Example a, Example b, double prob_a) {
  if (!(prob_a >= 0.0 && prob_a <= 1.0))
    throw std::invalid_argument("two_atom_generator: probability must lie in [0,1]");
  return [a = std::move(a), b = std::move(b), prob_a](Rng& rng) {
    return rng.uniform() < prob_a ? a : b;
  };
}

GeneralizationGapReport measure_generalization_gap(const Problem& p,
                                                   const ExampleGenerator& gen,
                                                   const Trainer& trainer, long n,
                                                   long trials, std::uint64_t seed,
                                                   int jobs, long mc_samples) {
  if (n < 1) throw std::invalid_argument("measure_generalization_gap: n must be positive");
  if (trials < 1)
    throw std::invalid_argument("measure_generalization_gap: trials must be positive");
  if (mc_samples < 1)
    throw std::invalid_argument("measure_generalization_gap: mc_samples must be positive");

  std::vector<double> gap(static_cast<std::size_t>(trials));
  std::vector<double> emp(static_cast<std::size_t>(trials));
  std::vector<double> pop(static_cast<std::size_t>(trials));
  parallel_for(trials, jobs, [&](long t) {
    const std::uint64_t base = Rng::mix(seed, static_cast<std::uint64_t>(t));
    Rng draw(base, 1);
    Dataset S;
    for (long i = 0; i < n; ++i) S.add(gen(draw));
    const Vec w = trainer.train(p, S, Rng::mix(base, 2));
    const double rs = p.empirical_risk(w, S);
    Rng mc(base, 3);
    double acc = 0.0;
    for (long i = 0; i < mc_samples; ++i) acc += p.loss(w, gen(mc));
    const double rhat = acc / static_cast<double>(mc_samples);
    gap[static_cast<std::size_t>(t)] = std::abs(rs - rhat);
    emp[static_cast<std::size_t>(t)] = rs;
    pop[static_cast<std::size_t>(t)] = rhat;
  });

  GeneralizationGapReport rep;
  rep.trials = trials;
  rep.mc_samples = mc_samples;
  for (long t = 0; t < trials; ++t) {
    rep.mean_gap += gap[static_cast<std::size_t>(t)];
    rep.mean_empirical_risk += emp[static_cast<std::size_t>(t)];
    rep.mean_population_risk += pop[static_cast<std::size_t>(t)];
  }
  rep.mean_gap /= static_cast<double>(trials);
  rep.mean_empirical_risk /= static_cast<double>(trials);
  rep.mean_population_risk /= static_cast<double>(trials);
  return rep;
}

Assumption1Report check_assumption_1(const Problem& p, const Dataset& S, const Dataset& Sp) {
  auto wS = p.erm_minimizer(S);
  auto wSp = p.erm_minimizer(Sp);
  if (!wS || !wSp)
    throw UnsupportedError("check_assumption_1: " + p.kind() +
                           " has no minimizer oracle for these datasets");
  Assumption1Report rep;
  auto proj = p.project_to_minimizers(*wSp, S);
  if (!proj) {
    rep.projection_failed = true;
    return rep;
  }
  rep.distance = (*proj - *wS).norm();
  rep.pass = rep.distance <= 1e-8;
  return rep;
}

CoupledGdReport coupled_gd_check(const Problem& p, const Dataset& S, const Dataset& Sp,
                                 const StepSchedule& sched, long T, const Vec& w0) {
  if (!S.neighbors(Sp))
    throw std::invalid_argument("coupled_gd_check: datasets are not neighbors");
  if (T < 1) throw std::invalid_argument("coupled_gd_check: T must be positive");

  RunConfig cfg;
  cfg.alg = Algorithm::gd;
  cfg.iters = T;
  cfg.schedule = sched;
  cfg.iterate_budget = p.dim() * (T + 1) + 16;
  const Trajectory A = run(p, S, cfg, w0);
  const Trajectory B = run(p, Sp, cfg, w0);
  if (A.diverged() || B.diverged())
    throw std::runtime_error("coupled_gd_check: a run diverged");

  CoupledGdReport rep;
  rep.steps = T;
  auto c = p.constants(S);
  rep.lambda = c.strong_convexity.value_or(0.0);

  for (const Vec& w : A.iterates) {
    rep.lhat = std::max(rep.lhat, max_example_grad(p, w, S));
    rep.lhat = std::max(rep.lhat, max_example_grad(p, w, Sp));
  }
  for (const Vec& w : B.iterates) {
    rep.lhat = std::max(rep.lhat, max_example_grad(p, w, S));
    rep.lhat = std::max(rep.lhat, max_example_grad(p, w, Sp));
  }

  const double n = static_cast<double>(S.size());
  const double bound_const =
      rep.lambda > 0.0 ? 2.0 * rep.lhat / (rep.lambda * n) : 0.0;
  rep.max_excess_path = -std::numeric_limits<double>::infinity();
  rep.max_excess_const = -std::numeric_limits<double>::infinity();
  double sum_gamma = 0.0;
  for (long t = 0; t <= T; ++t) {
    const double e =
        (A.iterates[static_cast<std::size_t>(t)] - B.iterates[static_cast<std::size_t>(t)])
            .norm();
    rep.max_excess_path = std::max(rep.max_excess_path, e - (2.0 * rep.lhat / n) * sum_gamma);
    if (rep.lambda > 0.0 && sched.kind == StepSchedule::Kind::constant)
      rep.max_excess_const = std::max(rep.max_excess_const, e - bound_const);
    if (t < T) sum_gamma += sched.at(t + 1);
    if (t == T) rep.final_divergence = e;
  }
  return rep;
}

CoupledSgdReport coupled_sgd_check(const Problem& p, const Dataset& S, const Dataset& Sp,
                                   double gamma, long T, const Vec& w0, long seeds,
                                   std::uint64_t seed_base, int jobs) {
  if (!S.neighbors(Sp))
    throw std::invalid_argument("coupled_sgd_check: datasets are not neighbors");
  if (!(gamma > 0.0)) throw std::invalid_argument("coupled_sgd_check: gamma must be positive");
  if (T < 1 || seeds < 1)
    throw std::invalid_argument("coupled_sgd_check: T and seeds must be positive");

  std::vector<std::vector<double>> tracks(static_cast<std::size_t>(seeds));
  std::vector<double> lhats(static_cast<std::size_t>(seeds), 0.0);
  parallel_for(seeds, jobs, [&](long s) {
    RunConfig cfg;
    cfg.alg = Algorithm::sgd;
    cfg.iters = T;
    cfg.schedule = StepSchedule::constant(gamma);
    cfg.seed = Rng::mix(seed_base, static_cast<std::uint64_t>(s));
    cfg.iterate_budget = p.dim() * (T + 1) + 16;
    const Trajectory A = run(p, S, cfg, w0);
    const Trajectory B = run(p, Sp, cfg, w0);
    if (A.diverged() || B.diverged())
      throw std::runtime_error("coupled_sgd_check: a run diverged");
    auto& track = tracks[static_cast<std::size_t>(s)];
    track.resize(static_cast<std::size_t>(T) + 1);
    for (long t = 0; t <= T; ++t)
      track[static_cast<std::size_t>(t)] =
          (A.iterates[static_cast<std::size_t>(t)] - B.iterates[static_cast<std::size_t>(t)])
              .norm();
    lhats[static_cast<std::size_t>(s)] =
        std::max(A.max_stoch_grad_norm, B.max_stoch_grad_norm);
  });

  CoupledSgdReport rep;
  rep.seeds = seeds;
  rep.steps = T;
  for (double lh : lhats) rep.lhat = std::max(rep.lhat, lh);

  const double n = static_cast<double>(S.size());
  rep.max_excess_mean = -std::numeric_limits<double>::infinity();
  for (long t = 0; t <= T; ++t) {
    double mean = 0.0;
    for (long s = 0; s < seeds; ++s)
      mean += tracks[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
    mean /= static_cast<double>(seeds);
    const double bound = 2.0 * gamma * rep.lhat * static_cast<double>(t) / n;
    rep.max_excess_mean = std::max(rep.max_excess_mean, mean - bound);
    if (t == T) rep.final_mean_divergence = mean;
  }
  return rep;
}

const char* stability_mode_name(StabilityMode m) {
  return m == StabilityMode::uniform ? "uniform" : "pointwise";
}

StabilityMode stability_mode_from_name(const std::string& name) {
  if (name == "uniform") return StabilityMode::uniform;
  if (name == "pointwise") return StabilityMode::pointwise;
  throw std::invalid_argument("unknown stability mode: " + name);
}

Table stability_sweep(const SweepOptions& opt) {
  if (opt.ns.empty()) throw std::invalid_argument("stability_sweep: empty n list");
  if (opt.d < 1) throw std::invalid_argument("stability_sweep: d must be positive");
  if (!(opt.curv_min > 0.0) || opt.curv_max < opt.curv_min)
    throw std::invalid_argument("stability_sweep: need 0 < curv_min <= curv_max");

  Vec curv(opt.d);
  for (int j = 0; j < opt.d; ++j) {
    const double t = opt.d == 1 ? 0.0 : static_cast<double>(j) / (opt.d - 1);
    curv[j] = opt.curv_min + (opt.curv_max - opt.curv_min) * t;
  }
  ProblemPtr p = make_quadratic(curv);

  Table table({"n", "mode", "measured", "bound", "ratio", "algorithm", "seed_base"},
              {false, true, false, false, false, true, false});
  for (long n : opt.ns) {
    if (n < 2) throw std::invalid_argument("stability_sweep: every n must be at least 2");
    const std::uint64_t seed_n = Rng::mix(opt.seed, static_cast<std::uint64_t>(n));
    Rng data_rng(seed_n, 5);
    auto draw = [&]() {
      Vec x(opt.d);
      for (int k = 0; k < opt.d; ++k) x[k] = data_rng.normal();
      const double norm = x.norm();
      const double r = std::pow(data_rng.uniform(), 1.0 / opt.d);
      if (norm > 0.0) x *= r / norm;
      return x;
    };
    Dataset S;
    for (long i = 0; i < n; ++i) S.add(draw(), 0.0);

    ReplicaConfig rc;
    rc.replicas = opt.replicas;
    rc.seed = seed_n;
    rc.jobs = opt.jobs;

    double measured = 0.0, bound = 0.0;
    if (opt.mode == StabilityMode::pointwise) {
      auto rep = measure_pointwise_stability(*p, S, opt.trainer, rc);
      measured = rep.value;
      bound = 2.0 * rep.lhat * rep.lhat / (opt.curv_min * static_cast<double>(n - 1));
    } else {
      Dataset Sp = S.neighbor(static_cast<std::size_t>(n - 1), {draw(), 0.0});
      auto rep = measure_uniform_stability(*p, S, Sp, opt.trainer, rc);
      measured = rep.value;
      bound = 2.0 * rep.lhat * rep.lhat / (opt.curv_min * static_cast<double>(n));
    }
    table.add_row({Table::fmt(double(n)), stability_mode_name(opt.mode),
                   Table::fmt(measured), Table::fmt(bound),
                   Table::fmt(bound > 0.0 ? measured / bound : 0.0),
                   opt.trainer.name(), Table::fmt(double(seed_n))});
  }
  table.meta("constants_policy", "O(.) evaluated with constant 1");
  table.meta("d", double(opt.d));
  table.meta("curv_min", opt.curv_min);
  table.meta("curv_max", opt.curv_max);
  table.meta("replicas", double(opt.replicas));
  return table;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need matching lists with at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("loglog_slope: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace stablab
