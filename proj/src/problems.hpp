#pragma once

#include <memory>
#include <optional>
#include <string>

#include "types.hpp"

namespace stablab {

// Constants a loss family can declare analytically.  Anything not declared
// here is estimated empirically by the geometry module.
struct ProblemConstants {
  std::optional<double> smoothness;        // beta, per-example
  std::optional<double> strong_convexity;  // lambda of the empirical risk
  std::optional<double> pl_constant;       // mu of the empirical risk
  std::optional<double> lipschitz;         // gradient-norm bound on the declared region
};

// A family of per-example losses l(w; z).  The empirical risk over a dataset
// is always the exact mean (1/n) * sum l(w; z_i).
class Problem {
public:
  virtual ~Problem() = default;

  virtual std::string kind() const = 0;
  virtual int dim() const = 0;          // parameter count
  virtual int example_dim() const = 0;  // length of Example::x

  // Whether Example::y enters the loss; probe samplers treat (x, y) as one
  // point in R^(example_dim+1) when it does.
  virtual bool example_uses_label() const { return false; }

  virtual double loss(const Vec& w, const Example& z) const = 0;
  virtual Vec grad_loss(const Vec& w, const Example& z) const = 0;

  virtual ProblemConstants constants(const Dataset& S) const { return {}; }

  // Exact minimizer of the empirical risk, for kinds that admit one.
  virtual std::optional<Vec> erm_minimizer(const Dataset& S) const { return std::nullopt; }

  // Minimum of the empirical risk; default goes through the exact minimizer.
  virtual std::optional<double> optimal_value(const Dataset& S) const;

  // Euclidean projection of w onto the minimizer set of the empirical risk.
  virtual std::optional<Vec> project_to_minimizers(const Vec& w, const Dataset& S) const {
    return std::nullopt;
  }

  // Kink exclusion for samplers on piecewise-smooth kinds.  The second form
  // asks about one specific example; the first about the canonical data.
  virtual bool near_kink(const Vec& w) const { return false; }
  virtual bool loss_kink_at(const Vec& w, const Example& z) const { return false; }

  // The dataset a composite kind was built from, when there is one.
  virtual std::optional<Dataset> canonical_dataset() const { return std::nullopt; }

  double empirical_risk(const Vec& w, const Dataset& S) const;
  Vec empirical_grad(const Vec& w, const Dataset& S) const;
  Vec stochastic_grad(const Vec& w, const Example& z) const { return grad_loss(w, z); }
  double coordinate_grad(const Vec& w, const Dataset& S, int j) const;

protected:
  void check_w(const Vec& w) const;
  void check_z(const Example& z) const;
};

using ProblemPtr = std::shared_ptr<const Problem>;

// l(w; z) = 1/2 (w - z.x)' diag(curv) (w - z.x).  Strongly convex when every
// curvature is positive; merely convex when some vanish.
ProblemPtr make_quadratic(Vec curvatures);

// l(w; (x, y)) = (<w,x>^2 + <w,x> - y)^2 on m parameters.  Declared probe
// region: |w_j| within [-2, 3], ||z|| <= 2.
ProblemPtr make_quartic(int m = 1);

struct QuarticRegionConstants {
  double lipschitz;   // max |dl/dw| over w in [-2,3], ||z|| <= 2
  double smoothness;  // max |d2l/dw2| over the same region
};
// Dense-grid maximization over the declared region (m = 1 only).
QuarticRegionConstants quartic_region_constants(long grid = 400);

// f(w) = g(sigma(X w)) with g(u) = (lambda_g/2) ||u - y||^2 and sigma the
// piecewise-linear map with slopes c1 (t >= 0) and c2 (t < 0).  Rows of X are
// the examples; per-example losses carry the row count so the empirical mean
// over the canonical dataset reproduces g(sigma(Xw)) exactly.
ProblemPtr make_leaky_relu(Mat X, Vec y, double c1, double c2, double lambda_g = 1.0);

}  // namespace stablab
