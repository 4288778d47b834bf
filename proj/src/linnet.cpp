#include "linnet.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stablab {

namespace {

double min_sigma_of(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues().minCoeff();
}

double max_sigma_of(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues().maxCoeff();
}

}  // namespace

LayerStack::LayerStack(int depth, int d) : d_(d) {
  if (depth < 1) throw std::invalid_argument("LayerStack: depth must be positive");
  if (d < 1) throw std::invalid_argument("LayerStack: width must be positive");
  layers_.assign(static_cast<std::size_t>(depth), Mat::Identity(d, d));
  rebuild_product();
}

LayerStack::LayerStack(std::vector<Mat> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("LayerStack: need at least one layer");
  d_ = static_cast<int>(layers_.front().rows());
  for (const Mat& W : layers_) {
    if (W.rows() != d_ || W.cols() != d_)
      throw std::invalid_argument("LayerStack: layers must be square and equally sized");
  }
  rebuild_product();
}

LayerStack LayerStack::from_flat(const Vec& w, int depth, int d) {
  if (depth < 1 || d < 1) throw std::invalid_argument("LayerStack: bad shape");
  if (w.size() != static_cast<Eigen::Index>(depth) * d * d)
    throw std::invalid_argument("LayerStack: flat vector length mismatch");
  std::vector<Mat> layers;
  layers.reserve(static_cast<std::size_t>(depth));
  for (int j = 0; j < depth; ++j) {
    layers.emplace_back(
        Eigen::Map<const Mat>(w.data() + static_cast<std::ptrdiff_t>(j) * d * d, d, d));
  }
  return LayerStack(std::move(layers));
}

LayerStack LayerStack::random(int depth, int d, Rng& rng, double min_sigma) {
  if (depth < 1 || d < 1) throw std::invalid_argument("LayerStack: bad shape");
  std::vector<Mat> layers;
  layers.reserve(static_cast<std::size_t>(depth));
  for (int j = 0; j < depth; ++j) {
    Mat W(d, d);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) W(r, c) = rng.normal();
      if (min_sigma_of(W) >= min_sigma) break;
    }
    layers.push_back(std::move(W));
  }
  return LayerStack(std::move(layers));
}

const Mat& LayerStack::layer(int j) const {
  check_layer_index(j);
  return layers_[static_cast<std::size_t>(j - 1)];
}

void LayerStack::set_layer(int j, Mat W) {
  check_layer_index(j);
  if (W.rows() != d_ || W.cols() != d_)
    throw std::invalid_argument("LayerStack: layer size mismatch");
  layers_[static_cast<std::size_t>(j - 1)] = std::move(W);
  rebuild_product();
}

double LayerStack::min_singular_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Mat& W : layers_) m = std::min(m, min_sigma_of(W));
  return m;
}

Vec LayerStack::flatten() const {
  Vec w(flat_size());
  for (int j = 0; j < depth(); ++j) {
    Eigen::Map<Mat>(w.data() + static_cast<std::ptrdiff_t>(j) * d_ * d_, d_, d_) =
        layers_[static_cast<std::size_t>(j)];
  }
  return w;
}

void LayerStack::rebuild_product() {
  product_ = layers_.front();
  for (std::size_t j = 1; j < layers_.size(); ++j) product_ = layers_[j] * product_;
}

void LayerStack::check_layer_index(int j) const {
  if (j < 1 || j > depth()) throw std::out_of_range("LayerStack: layer index out of range");
}

DataMatrices::DataMatrices(Mat X, Mat Y) : X_(std::move(X)), Y_(std::move(Y)) {
  if (X_.rows() < 1 || X_.cols() < 1)
    throw std::invalid_argument("DataMatrices: X must be nonempty");
  if (Y_.rows() != X_.rows() || Y_.cols() != X_.cols())
    throw std::invalid_argument("DataMatrices: Y must match X in shape");

  Eigen::JacobiSVD<Mat> svd(X_);
  const Vec& s = svd.singularValues();
  const double s_max = s.maxCoeff();
  const double s_min = s.minCoeff();
  if (X_.cols() < X_.rows() || s_min <= 1e-8 * s_max)
    throw std::invalid_argument("DataMatrices: X must have full row rank");
  const double cond_gram = (s_max / s_min) * (s_max / s_min);
  if (cond_gram > 1e8)
    throw std::invalid_argument("DataMatrices: X X^T too ill conditioned");

  const Mat gram = X_ * X_.transpose();
  const Mat Z = gram.ldlt().solve(X_);  // (XX^T)^{-1} X
  pinv_ = Z.transpose();
  frob_const_ = Z.squaredNorm();

  const Mat recon = X_ * pinv_ * X_;
  if ((recon - X_).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, s_max))
    throw std::invalid_argument("DataMatrices: pseudoinverse identity failed");

  const Mat resid = Y_ * pinv_ * X_ - Y_;
  optimal_loss_ = 0.5 * resid.squaredNorm();
}

DataMatrices DataMatrices::random(int d, long N, Rng& rng) {
  if (d < 1 || N < d) throw std::invalid_argument("DataMatrices: need N >= d >= 1");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Mat X(d, N), Y(d, N);
    for (long c = 0; c < N; ++c)
      for (int r = 0; r < d; ++r) X(r, c) = rng.normal();
    for (long c = 0; c < N; ++c)
      for (int r = 0; r < d; ++r) Y(r, c) = rng.normal();
    Eigen::JacobiSVD<Mat> svd(X);
    const Vec& s = svd.singularValues();
    if (s.minCoeff() > 0.05 && s.maxCoeff() / s.minCoeff() < 1e3)
      return DataMatrices(std::move(X), std::move(Y));
  }
  throw std::runtime_error("DataMatrices: could not draw a well conditioned X");
}

double linnet_loss(const LayerStack& stack, const DataMatrices& data) {
  if (stack.d() != data.d())
    throw std::invalid_argument("linnet_loss: stack width does not match data");
  const Mat& W = stack.product();
  double acc = 0.0;
  for (long k = 0; k < data.N(); ++k) {
    const Vec r = W * data.X().col(k) - data.Y().col(k);
    acc += 0.5 * r.squaredNorm();
  }
  return acc;
}

namespace {

// Suffix products A_j = W_l ... W_{j+1} and prefix products B_j = W_{j-1} ... W_1,
// with A_l = B_1 = I; grad_j = A_j^T G B_j^T for G = (WX - Y) X^T.
void partial_products(const LayerStack& stack, std::vector<Mat>& suffix,
                      std::vector<Mat>& prefix) {
  const int l = stack.depth();
  const int d = stack.d();
  suffix.assign(static_cast<std::size_t>(l) + 1, Mat());
  prefix.assign(static_cast<std::size_t>(l) + 1, Mat());
  prefix[1] = Mat::Identity(d, d);
  for (int j = 2; j <= l; ++j) prefix[j] = stack.layer(j - 1) * prefix[j - 1];
  suffix[l] = Mat::Identity(d, d);
  for (int j = l - 1; j >= 1; --j) suffix[j] = suffix[j + 1] * stack.layer(j + 1);
}

}  // namespace

Mat linnet_grad(const LayerStack& stack, const DataMatrices& data, int j) {
  if (stack.d() != data.d())
    throw std::invalid_argument("linnet_grad: stack width does not match data");
  if (j < 1 || j > stack.depth())
    throw std::out_of_range("linnet_grad: layer index out of range");
  const Mat G = (stack.product() * data.X() - data.Y()) * data.X().transpose();
  std::vector<Mat> suffix, prefix;
  partial_products(stack, suffix, prefix);
  return suffix[static_cast<std::size_t>(j)].transpose() * G *
         prefix[static_cast<std::size_t>(j)].transpose();
}

Vec linnet_full_grad(const LayerStack& stack, const DataMatrices& data) {
  if (stack.d() != data.d())
    throw std::invalid_argument("linnet_full_grad: stack width does not match data");
  const int l = stack.depth();
  const int d = stack.d();
  const Mat G = (stack.product() * data.X() - data.Y()) * data.X().transpose();
  std::vector<Mat> suffix, prefix;
  partial_products(stack, suffix, prefix);
  Vec g(stack.flat_size());
  for (int j = 1; j <= l; ++j) {
    const Mat gj = suffix[static_cast<std::size_t>(j)].transpose() * G *
                   prefix[static_cast<std::size_t>(j)].transpose();
    Eigen::Map<Mat>(g.data() + static_cast<std::ptrdiff_t>(j - 1) * d * d, d, d) = gj;
  }
  return g;
}

double linnet_pl_constant(int depth, double tau, const DataMatrices& data) {
  if (depth < 1) throw std::invalid_argument("linnet_pl_constant: depth must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("linnet_pl_constant: tau must be positive");
  return static_cast<double>(depth) * std::pow(tau, 2 * depth - 2) / data.frob_const();
}

SlackReport check_projection_lemma(const LayerStack& stack, const DataMatrices& data) {
  SlackReport r;
  const Mat resid = stack.product() * data.X() - data.Y();
  r.lhs = data.frob_const() * (resid * data.X().transpose()).squaredNorm();
  r.rhs = resid.squaredNorm() - 2.0 * data.optimal_loss();
  r.slack = r.lhs - r.rhs;
  return r;
}

SlackReport check_grad_lower_bound(const LayerStack& stack, const DataMatrices& data) {
  SlackReport r;
  r.tau = stack.min_singular_value();
  r.degenerate = stack.depth() >= 2 && r.tau < 1e-12;
  const Mat resid = stack.product() * data.X() - data.Y();
  r.lhs = linnet_full_grad(stack, data).squaredNorm();
  r.rhs = static_cast<double>(stack.depth()) * std::pow(r.tau, 2 * stack.depth() - 2) *
          (resid * data.X().transpose()).squaredNorm();
  r.slack = r.lhs - r.rhs;
  return r;
}

SplitReport check_residual_split(const LayerStack& stack, const DataMatrices& data) {
  SplitReport r;
  const Mat WX = stack.product() * data.X();
  const Mat proj = data.Y() * data.pinv() * data.X();
  r.total = (WX - data.Y()).squaredNorm();
  r.parallel = (WX - proj).squaredNorm();
  r.floor = (proj - data.Y()).squaredNorm();
  r.mismatch = std::abs(r.total - r.parallel - r.floor);
  return r;
}

const char* critical_class_name(CriticalClass c) {
  switch (c) {
    case CriticalClass::global_min: return "global-min";
    case CriticalClass::not_critical: return "not-critical";
    case CriticalClass::degenerate: return "degenerate";
  }
  return "unknown";
}

CriticalReport classify_critical_point(const LayerStack& stack, const DataMatrices& data,
                                       double grad_tol) {
  CriticalReport r;
  r.grad_norm = linnet_full_grad(stack, data).norm();
  double sigma_hi = 0.0;
  r.min_sigma = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= stack.depth(); ++j) {
    r.min_sigma = std::min(r.min_sigma, min_sigma_of(stack.layer(j)));
    sigma_hi = std::max(sigma_hi, max_sigma_of(stack.layer(j)));
  }
  r.rank_tol = 1e-8 * sigma_hi;
  r.f_gap = linnet_loss(stack, data) - data.optimal_loss();
  if (r.grad_norm > grad_tol) {
    r.cls = CriticalClass::not_critical;
  } else if (r.min_sigma <= r.rank_tol) {
    r.cls = CriticalClass::degenerate;
  } else {
    r.cls = CriticalClass::global_min;
  }
  return r;
}

namespace {

class LinnetProblem final : public Problem {
public:
  LinnetProblem(DataMatrices data, int depth)
      : data_(std::move(data)), depth_(depth), scale_(static_cast<double>(data_.N())) {
    if (depth_ < 1) throw std::invalid_argument("linnet: depth must be positive");
  }

  std::string kind() const override { return "linnet"; }
  int dim() const override { return depth_ * data_.d() * data_.d(); }
  int example_dim() const override { return 2 * data_.d(); }

  double loss(const Vec& w, const Example& z) const override {
    check_w(w);
    check_z(z);
    const int d = data_.d();
    const LayerStack stack = LayerStack::from_flat(w, depth_, d);
    const Vec r = stack.product() * z.x.head(d) - z.x.tail(d);
    return scale_ * (0.5 * r.squaredNorm());
  }

  Vec grad_loss(const Vec& w, const Example& z) const override {
    check_w(w);
    check_z(z);
    const int d = data_.d();
    const LayerStack stack = LayerStack::from_flat(w, depth_, d);
    const Vec x = z.x.head(d);
    const Vec r = stack.product() * x - z.x.tail(d);
    std::vector<Mat> suffix, prefix;
    partial_products(stack, suffix, prefix);
    Vec g(dim());
    for (int j = 1; j <= depth_; ++j) {
      const Mat gj = scale_ * (suffix[static_cast<std::size_t>(j)].transpose() *
                               (r * x.transpose()) *
                               prefix[static_cast<std::size_t>(j)].transpose());
      Eigen::Map<Mat>(g.data() + static_cast<std::ptrdiff_t>(j - 1) * d * d, d, d) = gj;
    }
    return g;
  }

  std::optional<Vec> erm_minimizer(const Dataset& S) const override {
    auto sub = submatrices(S);
    if (!sub) return std::nullopt;
    LayerStack stack(depth_, data_.d());
    stack.set_layer(1, sub->best_product());
    return stack.flatten();
  }

  std::optional<Vec> project_to_minimizers(const Vec& w, const Dataset& S) const override {
    check_w(w);
    auto sub = submatrices(S);
    if (!sub) return std::nullopt;
    const int d = data_.d();
    if (depth_ == 1) {
      // Affine solution set {W : W Xs = Ys Xs^+ Xs}; least-change correction.
      const Mat W = Eigen::Map<const Mat>(w.data(), d, d);
      const Mat target = sub->Y() * sub->pinv() * sub->X();
      const Mat proj = W - (W * sub->X() - target) * sub->pinv();
      Vec out(d * d);
      Eigen::Map<Mat>(out.data(), d, d) = proj;
      return out;
    }
    return descend_to_minimizer(w, S, *sub);
  }

  std::optional<Dataset> canonical_dataset() const override {
    Dataset S;
    const int d = data_.d();
    for (long k = 0; k < data_.N(); ++k) {
      Vec packed(2 * d);
      packed.head(d) = data_.X().col(k);
      packed.tail(d) = data_.Y().col(k);
      S.add(std::move(packed), 0.0);
    }
    return S;
  }

private:
  DataMatrices data_;
  int depth_;
  double scale_;

  std::optional<DataMatrices> submatrices(const Dataset& S) const {
    const int d = data_.d();
    if (S.empty()) return std::nullopt;
    Mat Xs(d, static_cast<Eigen::Index>(S.size()));
    Mat Ys(d, static_cast<Eigen::Index>(S.size()));
    for (std::size_t k = 0; k < S.size(); ++k) {
      if (S[k].x.size() != 2 * d) return std::nullopt;
      Xs.col(static_cast<Eigen::Index>(k)) = S[k].x.head(d);
      Ys.col(static_cast<Eigen::Index>(k)) = S[k].x.tail(d);
    }
    try {
      return DataMatrices(std::move(Xs), std::move(Ys));
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }

  // Descent retraction: follows the gradient flow from w, so it lands at a
  // nearby minimizer rather than the metric projection.  Callers treat a
  // non-converged descent as oracle failure.
  std::optional<Vec> descend_to_minimizer(const Vec& w, const Dataset& S,
                                          const DataMatrices& sub) const {
    const double f_min = empirical_risk_floor(sub);
    Vec cur = w;
    double gamma = 0.05;
    double risk = empirical_risk(cur, S);
    for (long t = 0; t < 40000; ++t) {
      const Vec g = empirical_grad(cur, S);
      if (g.norm() <= 1e-10) break;
      bool advanced = false;
      while (gamma >= 1e-12) {
        Vec next = cur - gamma * g;
        double next_risk = empirical_risk(next, S);
        if (std::isfinite(next_risk) && next_risk <= risk) {
          cur = std::move(next);
          risk = next_risk;
          advanced = true;
          break;
        }
        gamma *= 0.5;
      }
      if (!advanced) break;
    }
    if (empirical_grad(cur, S).norm() > 1e-8) return std::nullopt;
    if (risk - f_min > 1e-6 * std::max(1.0, std::abs(f_min))) return std::nullopt;
    return cur;
  }

  double empirical_risk_floor(const DataMatrices& sub) const {
    return scale_ * sub.optimal_loss() / static_cast<double>(sub.N());
  }
};

}  // namespace

ProblemPtr make_linnet(DataMatrices data, int depth) {
  return std::make_shared<LinnetProblem>(std::move(data), depth);
}

Mat load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v = std::stod(cell, &pos);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("load_matrix_csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("load_matrix_csv: empty file " + path);
  Mat M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

}  // namespace stablab
