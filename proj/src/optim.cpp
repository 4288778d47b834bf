#include "optim.hpp"

#include <cmath>

#include "rng.hpp"

namespace stablab {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::gd: return "gd";
    case Algorithm::sgd: return "sgd";
    case Algorithm::rcd: return "rcd";
    case Algorithm::svrg: return "svrg";
  }
  return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "gd") return Algorithm::gd;
  if (name == "sgd") return Algorithm::sgd;
  if (name == "rcd") return Algorithm::rcd;
  if (name == "svrg") return Algorithm::svrg;
  throw std::invalid_argument("unknown algorithm: " + name);
}

namespace {

bool out_of_bounds(const Vec& w) {
  return !w.allFinite() || w.norm() > kDivergenceGuard;
}

struct Recorder {
  const Problem& p;
  const Dataset& S;
  const Vec& w0;
  Trajectory& out;

  void operator()(const Vec& w) {
    if (!out.thin) out.iterates.push_back(w);
    out.risks.push_back(p.empirical_risk(w, S));
    out.grad_norms.push_back(p.empirical_grad(w, S).norm());
    out.drift.push_back((w - w0).norm());
  }
};

}  // namespace

Trajectory run(const Problem& p, const Dataset& S, const RunConfig& cfg, const Vec& w0) {
  if (w0.size() != p.dim())
    throw std::invalid_argument("run: initial point has length " +
                                std::to_string(w0.size()) + ", expected " +
                                std::to_string(p.dim()));
  if (S.empty()) throw std::invalid_argument("run: dataset is empty");
  if (cfg.iters < 0) throw std::invalid_argument("run: negative iteration count");

  const long d = p.dim();
  const long n = static_cast<long>(S.size());

  Trajectory out;
  out.thin = d * (cfg.iters + 1) > cfg.iterate_budget;
  Recorder record{p, S, w0, out};

  Vec w = w0;
  record(w);
  Rng rng(cfg.seed);

  const long m = cfg.alg == Algorithm::svrg
                     ? (cfg.svrg_inner > 0 ? cfg.svrg_inner : 2 * n)
                     : 0;

  for (long t = 1; t <= cfg.iters; ++t) {
    const double gamma = cfg.schedule.at(t);
    switch (cfg.alg) {
      case Algorithm::gd:
        w -= gamma * p.empirical_grad(w, S);
        break;
      case Algorithm::sgd: {
        const Vec g = p.stochastic_grad(w, S[rng.index(S.size())]);
        out.max_stoch_grad_norm = std::max(out.max_stoch_grad_norm, g.norm());
        w -= gamma * g;
        break;
      }
      case Algorithm::rcd: {
        const long j = static_cast<long>(rng.index(static_cast<std::size_t>(d)));
        w[j] -= gamma * p.coordinate_grad(w, S, static_cast<int>(j));
        break;
      }
      case Algorithm::svrg: {
        // one outer epoch: snapshot gradient, m corrected inner steps,
        // epoch output is the last inner iterate
        const Vec snapshot = w;
        const Vec full = p.empirical_grad(snapshot, S);
        for (long k = 0; k < m; ++k) {
          const Example& z = S[rng.index(S.size())];
          const Vec g = p.stochastic_grad(w, z) - p.stochastic_grad(snapshot, z) + full;
          out.max_stoch_grad_norm = std::max(out.max_stoch_grad_norm, g.norm());
          w -= gamma * g;
          if (out_of_bounds(w)) break;
        }
        break;
      }
    }
    if (out_of_bounds(w)) {
      out.diverged_at = t;
      break;
    }
    record(w);
  }

  out.final_w = w;
  return out;
}

}  // namespace stablab
