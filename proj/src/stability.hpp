#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "optim.hpp"
#include "rng.hpp"
#include "table.hpp"

namespace stablab {

// Maps (problem, dataset, replica seed) to trained parameters: either the
// closed-form empirical-risk minimizer or an optimizer run.  A gradient
// tolerance turns the run into run-until-stationary with doubling step
// budgets.
class Trainer {
public:
  enum class Kind { erm, optimizer };

  static Trainer erm_oracle();
  static Trainer optimizer(RunConfig cfg, Vec w0);
  static Trainer optimizer_to_tol(RunConfig cfg, Vec w0, double grad_tol);

  Kind kind() const { return kind_; }
  const RunConfig& config() const { return cfg_; }
  bool deterministic() const;  // erm oracle or plain gd
  std::string name() const;

  // max_stoch, when given, receives the largest sampled-gradient norm of the
  // run (0 for the erm oracle and plain gd).
  Vec train(const Problem& p, const Dataset& S, std::uint64_t replica_seed,
            double* max_stoch = nullptr) const;

private:
  Kind kind_ = Kind::erm;
  RunConfig cfg_;
  Vec w0_;
  std::optional<double> grad_tol_;
};

struct ReplicaConfig {
  long replicas = 100;   // forced to 1 for deterministic trainers
  std::uint64_t seed = 0;
  bool coupled = true;   // shared seed for the paired runs
  int jobs = 1;
};

// Probe points for the sup over z: for packed example dimension at most 2, a
// 401-per-dimension lattice over the radius-2 ball plus 1000 random draws;
// above that, 1000 random draws only.
std::vector<Example> make_probes(const Problem& p, std::uint64_t seed);

struct UniformStabilityReport {
  double value = 0.0;         // max over z of |mean over replicas loss gap|
  double signed_value = 0.0;  // the mean at the maximizing z, sign kept
  Example witness;
  double lhat = 0.0;  // largest per-example gradient norm over finals x probes
  long replicas = 0;
  long probes = 0;
};

UniformStabilityReport measure_uniform_stability(const Problem& p, const Dataset& S,
                                                 const Dataset& Sp, const Trainer& trainer,
                                                 const ReplicaConfig& rc,
                                                 const std::vector<Example>* probes = nullptr);

struct PointwiseStabilityReport {
  double value = 0.0;  // mean over indices and replicas of |loss change at z_i|
  double lhat = 0.0;
  long replicas = 0;
  long indices_used = 0;
};

PointwiseStabilityReport measure_pointwise_stability(const Problem& p, const Dataset& S,
                                                     const Trainer& trainer,
                                                     const ReplicaConfig& rc);

enum class BlackboxTheorem { pl_ptwise, qg_ptwise, pl_uniform, qg_uniform };

const char* blackbox_theorem_name(BlackboxTheorem t);
BlackboxTheorem blackbox_theorem_from_name(const std::string& name);

struct BlackboxInputs {
  double L = 0.0;
  double mu = 0.0;
  double c = 0.0;  // loss bound, qg theorems only
  long n = 0;
  std::optional<double> eps_dist;  // case 1: parameter-distance convergence
  std::optional<double> eps_val;   // case 2: value-gap convergence
  std::optional<double> eps_grad;  // case 3: gradient-norm convergence
};

struct BoundReport {
  BlackboxTheorem theorem = BlackboxTheorem::pl_uniform;
  int case_id = 1;
  double bound = 0.0;
  double term_convergence = 0.0;
  double term_intrinsic = 0.0;
  bool constants_suppressed = true;
};

// Constant-one policy throughout.  The pl variants add the convergence term
// (L eps, L sqrt(eps'/mu), or L eps''/mu by case) to 2L^2/(mu (n-1)) for the
// pointwise form or 2L^2/(mu n) for the uniform form; the qg variants admit
// cases 1-2 only and use 2L sqrt(c/(mu n)) as the intrinsic term.
BoundReport blackbox_bound(BlackboxTheorem theorem, int case_id, const BlackboxInputs& in);

double generalization_bound_uniform(double eps);
double generalization_bound_pointwise(double M, long n, double beta, double delta);

using ExampleGenerator = std::function<Example(Rng&)>;

ExampleGenerator gaussian_example_generator(int dim, double scale = 1.0);
ExampleGenerator two_atom_generator(Example a, Example b, double prob_a = 0.5);

struct GeneralizationGapReport {
  double mean_gap = 0.0;
  double mean_empirical_risk = 0.0;
  double mean_population_risk = 0.0;
  long trials = 0;
  long mc_samples = 0;
};

// Per trial: draw an i.i.d. sample of size n, train, and compare empirical
// risk to a Monte-Carlo estimate of the population risk.
GeneralizationGapReport measure_generalization_gap(const Problem& p,
                                                   const ExampleGenerator& gen,
                                                   const Trainer& trainer, long n,
                                                   long trials, std::uint64_t seed,
                                                   int jobs = 1, long mc_samples = 100000);

struct Assumption1Report {
  bool pass = false;
  bool projection_failed = false;  // the search-based oracle gave up
  double distance = 0.0;           // |pi_S(w*_Sp) - w*_S|
};

// Projects the neighbor's minimizer onto the minimizer set of f_S and
// compares with the minimizer of f_S.
Assumption1Report check_assumption_1(const Problem& p, const Dataset& S, const Dataset& Sp);

// Paired full-gradient descent on neighboring datasets from a shared start;
// checks the per-step divergence against (2 lhat / n) sum of steps, and for
// strongly convex constant-step runs also against 2 lhat / (lambda n).
// Excess values are max over t of measured minus bound, so nonpositive means
// the bound held at every step.
struct CoupledGdReport {
  double lhat = 0.0;
  double lambda = 0.0;  // 0 when the instance is not strongly convex
  double max_excess_path = 0.0;
  double max_excess_const = 0.0;  // meaningful only with lambda > 0, constant steps
  double final_divergence = 0.0;
  long steps = 0;
};

CoupledGdReport coupled_gd_check(const Problem& p, const Dataset& S, const Dataset& Sp,
                                 const StepSchedule& sched, long T, const Vec& w0);

// Coupled constant-step sgd with shared index draws; compares the mean
// divergence track against 2 gamma lhat t / n.
struct CoupledSgdReport {
  double lhat = 0.0;
  double max_excess_mean = 0.0;  // max over t of mean divergence minus bound
  double final_mean_divergence = 0.0;
  long seeds = 0;
  long steps = 0;
};

CoupledSgdReport coupled_sgd_check(const Problem& p, const Dataset& S, const Dataset& Sp,
                                   double gamma, long T, const Vec& w0, long seeds,
                                   std::uint64_t seed_base, int jobs = 1);

enum class StabilityMode { uniform, pointwise };

const char* stability_mode_name(StabilityMode m);
StabilityMode stability_mode_from_name(const std::string& name);

struct SweepOptions {
  std::vector<long> ns = {25, 50, 100, 200};
  StabilityMode mode = StabilityMode::pointwise;
  int d = 2;
  double curv_min = 1.0;  // smallest quadratic curvature (lambda)
  double curv_max = 2.0;  // largest (beta)
  Trainer trainer = Trainer::erm_oracle();
  long replicas = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Strongly convex quadratic instances with random centers; one row per n
// with columns n, mode, measured, bound, ratio, algorithm, seed_base.
Table stability_sweep(const SweepOptions& opt);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace stablab
