#include "problems.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <utility>

namespace stablab {

void Problem::check_w(const Vec& w) const {
  if (w.size() != dim())
    throw std::invalid_argument(kind() + ": parameter vector has length " +
                                std::to_string(w.size()) + ", expected " +
                                std::to_string(dim()));
}

void Problem::check_z(const Example& z) const {
  if (z.x.size() != example_dim())
    throw std::invalid_argument(kind() + ": example has length " +
                                std::to_string(z.x.size()) + ", expected " +
                                std::to_string(example_dim()));
}

double Problem::empirical_risk(const Vec& w, const Dataset& S) const {
  if (S.empty()) throw std::invalid_argument("empirical_risk: dataset is empty");
  double acc = 0.0;
  for (const Example& z : S.examples()) acc += loss(w, z);
  return acc / static_cast<double>(S.size());
}

Vec Problem::empirical_grad(const Vec& w, const Dataset& S) const {
  if (S.empty()) throw std::invalid_argument("empirical_grad: dataset is empty");
  Vec acc = Vec::Zero(dim());
  for (const Example& z : S.examples()) acc += grad_loss(w, z);
  return acc / static_cast<double>(S.size());
}

// One implementation point on purpose: the full mean gradient is computed and
// indexed.  Costs d times more than a scalar recurrence would, which is
// irrelevant at the dimensions handled here.
double Problem::coordinate_grad(const Vec& w, const Dataset& S, int j) const {
  if (j < 0 || j >= dim())
    throw std::invalid_argument("coordinate_grad: coordinate " + std::to_string(j) +
                                " out of range");
  return empirical_grad(w, S)[j];
}

std::optional<double> Problem::optimal_value(const Dataset& S) const {
  auto w = erm_minimizer(S);
  if (!w) return std::nullopt;
  return empirical_risk(*w, S);
}

namespace {

class QuadraticProblem final : public Problem {
public:
  explicit QuadraticProblem(Vec curv) : curv_(std::move(curv)) {}

  std::string kind() const override { return "quadratic"; }
  int dim() const override { return static_cast<int>(curv_.size()); }
  int example_dim() const override { return static_cast<int>(curv_.size()); }

  double loss(const Vec& w, const Example& z) const override {
    check_w(w);
    check_z(z);
    const Vec d = w - z.x;
    return 0.5 * d.dot(curv_.cwiseProduct(d));
  }

  Vec grad_loss(const Vec& w, const Example& z) const override {
    check_w(w);
    check_z(z);
    return curv_.cwiseProduct(w - z.x);
  }

  ProblemConstants constants(const Dataset&) const override {
    ProblemConstants c;
    c.smoothness = curv_.maxCoeff();
    c.strong_convexity = curv_.minCoeff();
    double mu = 0.0;
    for (double v : curv_)
      if (v > 0.0 && (mu == 0.0 || v < mu)) mu = v;
    if (mu > 0.0) c.pl_constant = mu;
    return c;
  }

  std::optional<Vec> erm_minimizer(const Dataset& S) const override {
    if (S.empty()) return std::nullopt;
    Vec mean = Vec::Zero(dim());
    for (const Example& z : S.examples()) {
      check_z(z);
      mean += z.x;
    }
    return mean / static_cast<double>(S.size());
  }

  // Minimizer set fixes coordinates with positive curvature at the sample
  // mean and leaves flat coordinates free.
  std::optional<Vec> project_to_minimizers(const Vec& w, const Dataset& S) const override {
    check_w(w);
    auto mean = erm_minimizer(S);
    if (!mean) return std::nullopt;
    Vec p = w;
    for (int j = 0; j < dim(); ++j)
      if (curv_[j] > 0.0) p[j] = (*mean)[j];
    return p;
  }

private:
  Vec curv_;
};

class QuarticProblem final : public Problem {
public:
  explicit QuarticProblem(int m) : m_(m) {}

  std::string kind() const override { return "quartic"; }
  int dim() const override { return m_; }
  int example_dim() const override { return m_; }
  bool example_uses_label() const override { return true; }

  double loss(const Vec& w, const Example& z) const override {
    check_w(w);
    check_z(z);
    const double u = w.dot(z.x);
    const double r = u * u + u - z.y;
    return r * r;
  }

  Vec grad_loss(const Vec& w, const Example& z) const override {
    check_w(w);
    check_z(z);
    const double u = w.dot(z.x);
    const double r = u * u + u - z.y;
    return 2.0 * r * (2.0 * u + 1.0) * z.x;
  }

private:
  int m_;
};

class LeakyReluProblem final : public Problem {
public:
  LeakyReluProblem(Mat X, Vec y, double c1, double c2, double lg)
      : X_(std::move(X)), y_(std::move(y)), c1_(c1), c2_(c2), lg_(lg),
        scale_(static_cast<double>(X_.rows())) {}

  std::string kind() const override { return "leaky-relu"; }
  int dim() const override { return static_cast<int>(X_.cols()); }
  int example_dim() const override { return static_cast<int>(X_.cols()); }
  bool example_uses_label() const override { return true; }

  double act(double t) const { return t >= 0.0 ? c1_ * t : c2_ * t; }
  double act_slope(double t) const { return t >= 0.0 ? c1_ : c2_; }
  double act_inv(double v) const { return v >= 0.0 ? v / c1_ : v / c2_; }

  // Per-example losses carry the canonical row count, so the empirical mean
  // over the canonical dataset equals g(sigma(Xw)) exactly.
  double loss(const Vec& w, const Example& z) const override {
    check_w(w);
    check_z(z);
    const double r = act(z.x.dot(w)) - z.y;
    return 0.5 * lg_ * scale_ * r * r;
  }

  Vec grad_loss(const Vec& w, const Example& z) const override {
    check_w(w);
    check_z(z);
    const double t = z.x.dot(w);
    return lg_ * scale_ * (act(t) - z.y) * act_slope(t) * z.x;
  }

  bool near_kink(const Vec& w) const override {
    check_w(w);
    return ((X_ * w).cwiseAbs().array() < kKinkTol).any();
  }

  bool loss_kink_at(const Vec& w, const Example& z) const override {
    return std::abs(z.x.dot(w)) < kKinkTol;
  }

  ProblemConstants constants(const Dataset& S) const override {
    ProblemConstants c;
    Mat Xs = rows_of(S);
    if (Xs.rows() > Xs.cols()) return c;  // no analytic constants when overdetermined
    Eigen::JacobiSVD<Mat> svd(Xs);
    const double smin = svd.singularValues().minCoeff();
    if (smin <= 1e-10) return c;
    const double cmin = std::min(c1_, c2_);
    const double g_strong = lg_ * scale_ / static_cast<double>(S.size());
    c.pl_constant = g_strong * smin * smin * cmin * cmin;
    return c;
  }

  std::optional<Vec> erm_minimizer(const Dataset& S) const override {
    Mat Xs = rows_of(S);
    if (Xs.rows() > Xs.cols()) return std::nullopt;
    Vec u(Xs.rows());
    for (Eigen::Index i = 0; i < Xs.rows(); ++i) u[i] = act_inv(S[i].y);
    Mat gram = Xs * Xs.transpose();
    Eigen::LDLT<Mat> ldlt(gram);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    Vec w = Xs.transpose() * ldlt.solve(u);
    if ((Xs * w - u).cwiseAbs().maxCoeff() > 1e-8) return std::nullopt;
    return w;
  }

  // The minimizer set {w : X_S w = sigma^{-1}(y)} is affine, so the
  // projection is the standard residual correction.
  std::optional<Vec> project_to_minimizers(const Vec& w, const Dataset& S) const override {
    check_w(w);
    Mat Xs = rows_of(S);
    if (Xs.rows() > Xs.cols()) return std::nullopt;
    Vec u(Xs.rows());
    for (Eigen::Index i = 0; i < Xs.rows(); ++i) u[i] = act_inv(S[i].y);
    Mat gram = Xs * Xs.transpose();
    Eigen::LDLT<Mat> ldlt(gram);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    return w - Xs.transpose() * ldlt.solve(Xs * w - u);
  }

  std::optional<Dataset> canonical_dataset() const override {
    Dataset S;
    for (Eigen::Index i = 0; i < X_.rows(); ++i) S.add(X_.row(i).transpose(), y_[i]);
    return S;
  }

private:
  static constexpr double kKinkTol = 1e-8;

  Mat rows_of(const Dataset& S) const {
    if (S.empty()) throw std::invalid_argument("leaky-relu: dataset is empty");
    Mat Xs(S.size(), dim());
    for (std::size_t i = 0; i < S.size(); ++i) {
      check_z(S[i]);
      Xs.row(i) = S[i].x.transpose();
    }
    return Xs;
  }

  Mat X_;
  Vec y_;
  double c1_, c2_, lg_, scale_;
};

}  // namespace

ProblemPtr make_quadratic(Vec curvatures) {
  if (curvatures.size() < 1)
    throw std::invalid_argument("make_quadratic: need at least one curvature");
  for (double v : curvatures)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("make_quadratic: curvatures must be finite and nonnegative");
  return std::make_shared<QuadraticProblem>(std::move(curvatures));
}

ProblemPtr make_quartic(int m) {
  if (m < 1) throw std::invalid_argument("make_quartic: m must be positive");
  return std::make_shared<QuarticProblem>(m);
}

QuarticRegionConstants quartic_region_constants(long grid) {
  if (grid < 10) throw std::invalid_argument("quartic_region_constants: grid too coarse");
  // product region: w in [-2,3], z = (x,y) in the radius-2 disk
  double max_g = 0.0, max_h = 0.0;
  const double r = 2.0;
  for (long iw = 0; iw <= grid; ++iw) {
    const double w = -2.0 + 5.0 * static_cast<double>(iw) / static_cast<double>(grid);
    for (long ix = 0; ix <= grid; ++ix) {
      const double x = -r + 2.0 * r * static_cast<double>(ix) / static_cast<double>(grid);
      for (long iy = 0; iy <= grid; ++iy) {
        const double y = -r + 2.0 * r * static_cast<double>(iy) / static_cast<double>(grid);
        if (x * x + y * y > r * r) continue;
        const double u = w * x;
        const double res = u * u + u - y;
        const double g = 2.0 * res * (2.0 * u + 1.0) * x;
        const double h = 2.0 * x * x * ((2.0 * u + 1.0) * (2.0 * u + 1.0) + 2.0 * res);
        max_g = std::max(max_g, std::abs(g));
        max_h = std::max(max_h, std::abs(h));
      }
    }
  }
  return {max_g, max_h};
}

ProblemPtr make_leaky_relu(Mat X, Vec y, double c1, double c2, double lambda_g) {
  if (X.rows() < 1 || X.cols() < 1)
    throw std::invalid_argument("make_leaky_relu: X must be nonempty");
  if (y.size() != X.rows())
    throw std::invalid_argument("make_leaky_relu: y length must match rows of X");
  if (!(c1 > 0.0) || !(c2 > 0.0))
    throw std::invalid_argument("make_leaky_relu: slopes must be positive");
  if (!(lambda_g > 0.0))
    throw std::invalid_argument("make_leaky_relu: lambda_g must be positive");
  return std::make_shared<LeakyReluProblem>(std::move(X), std::move(y), c1, c2, lambda_g);
}

}  // namespace stablab
