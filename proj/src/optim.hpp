#pragma once

#include <cstdint>
#include <vector>

#include "problems.hpp"

namespace stablab {

enum class Algorithm { gd, sgd, rcd, svrg };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct StepSchedule {
  enum class Kind { constant, inverse_t };
  Kind kind = Kind::constant;
  double value = 0.1;  // gamma when constant, c when inverse-t

  // step for iteration t, counted from 1
  double at(long t) const {
    return kind == Kind::constant ? value : value / static_cast<double>(t);
  }

  static StepSchedule constant(double gamma) { return {Kind::constant, gamma}; }
  static StepSchedule inverse_t(double c) { return {Kind::inverse_t, c}; }
};

struct RunConfig {
  Algorithm alg = Algorithm::gd;
  long iters = 100;  // steps for gd/sgd/rcd, outer epochs for svrg
  StepSchedule schedule = StepSchedule::constant(0.1);
  std::uint64_t seed = 0;
  long svrg_inner = 0;          // inner steps per epoch; 0 means 2n
  long iterate_budget = 400000;  // d*(T+1) above this switches to thin mode
};

// Full iterate history by default; in thin mode only the scalar tracks and
// the final point are kept.  Scalar tracks always have one entry per recorded
// step (epoch for svrg), including the initial point.
struct Trajectory {
  std::vector<Vec> iterates;
  Vec final_w;
  std::vector<double> risks;       // empirical risk
  std::vector<double> grad_norms;  // norm of the empirical gradient
  std::vector<double> drift;       // distance from the initial point
  double max_stoch_grad_norm = 0.0;  // largest sampled-gradient norm (sgd/svrg)
  long diverged_at = -1;             // step index that tripped the guard, -1 if none
  bool thin = false;

  bool diverged() const { return diverged_at >= 0; }
  long steps() const { return static_cast<long>(risks.size()) - 1; }
};

// Deterministic given (problem, S, cfg, w0): same seed, same trajectory,
// bit for bit.  Runs abort when an iterate leaves the norm guard.
Trajectory run(const Problem& p, const Dataset& S, const RunConfig& cfg, const Vec& w0);

constexpr double kDivergenceGuard = 1e8;

}  // namespace stablab
