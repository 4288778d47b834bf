#pragma once

#include <string>
#include <vector>

#include "problems.hpp"
#include "rng.hpp"

namespace stablab {

// Product-parametrized linear predictor: W = W_l ... W_1, every layer a real
// d x d matrix.  The product cache is rebuilt on any layer mutation, and the
// flattening to a parameter vector of length l*d*d (layer 1 first, each layer
// column-major) is a bijection.
class LayerStack {
public:
  LayerStack(int depth, int d);  // all layers identity
  explicit LayerStack(std::vector<Mat> layers);

  static LayerStack from_flat(const Vec& w, int depth, int d);

  // Entries i.i.d. standard normal; any layer with a smallest singular value
  // under min_sigma is redrawn, so tau stays bounded away from zero.
  static LayerStack random(int depth, int d, Rng& rng, double min_sigma = 0.1);

  int depth() const { return static_cast<int>(layers_.size()); }
  int d() const { return d_; }
  int flat_size() const { return depth() * d_ * d_; }

  const Mat& layer(int j) const;  // j in 1..depth
  void set_layer(int j, Mat W);

  const Mat& product() const { return product_; }
  double min_singular_value() const;  // min over layers
  Vec flatten() const;

private:
  std::vector<Mat> layers_;
  Mat product_;
  int d_ = 0;

  void rebuild_product();
  void check_layer_index(int j) const;
};

// Feature and label columns with the cached least-squares machinery.  X must
// have full row rank; construction rejects a rank-deficient or numerically
// hostile XX^T.
class DataMatrices {
public:
  DataMatrices(Mat X, Mat Y);

  static DataMatrices random(int d, long N, Rng& rng);

  const Mat& X() const { return X_; }
  const Mat& Y() const { return Y_; }
  int d() const { return static_cast<int>(X_.rows()); }
  long N() const { return static_cast<long>(X_.cols()); }

  const Mat& pinv() const { return pinv_; }       // X^T (X X^T)^{-1}
  double frob_const() const { return frob_const_; }  // ||(XX^T)^{-1} X||_F^2
  Mat best_product() const { return Y_ * pinv_; }
  double optimal_loss() const { return optimal_loss_; }  // 1/2 ||Y X^+ X - Y||_F^2

private:
  Mat X_, Y_, pinv_;
  double frob_const_ = 0.0;
  double optimal_loss_ = 0.0;
};

double linnet_loss(const LayerStack& stack, const DataMatrices& data);
Mat linnet_grad(const LayerStack& stack, const DataMatrices& data, int j);
// All layer gradients flattened in the stack's parameter order.
Vec linnet_full_grad(const LayerStack& stack, const DataMatrices& data);

// mu = depth * tau^(2*depth - 2) / frob_const; valid on stacks whose layers
// all keep their smallest singular value at or above tau.
double linnet_pl_constant(int depth, double tau, const DataMatrices& data);

struct SlackReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  double tau = 0.0;    // min singular value across layers (grad bound only)
  bool degenerate = false;
};

// frob_const * ||(WX - Y) X^T||_F^2  >=  ||WX - Y||_F^2 - ||Y X^+ X - Y||_F^2
SlackReport check_projection_lemma(const LayerStack& stack, const DataMatrices& data);

// sum_j ||grad_j||_F^2  >=  depth * tau^(2*depth-2) * ||(WX - Y) X^T||_F^2
SlackReport check_grad_lower_bound(const LayerStack& stack, const DataMatrices& data);

struct SplitReport {
  double total = 0.0;     // ||WX - Y||_F^2
  double parallel = 0.0;  // ||WX - Y X^+ X||_F^2
  double floor = 0.0;     // ||Y X^+ X - Y||_F^2
  double mismatch = 0.0;  // |total - parallel - floor|
};
SplitReport check_residual_split(const LayerStack& stack, const DataMatrices& data);

enum class CriticalClass { global_min, not_critical, degenerate };
const char* critical_class_name(CriticalClass c);

struct CriticalReport {
  CriticalClass cls = CriticalClass::not_critical;
  double grad_norm = 0.0;
  double min_sigma = 0.0;
  double rank_tol = 0.0;  // 1e-8 * largest singular value across layers
  double f_gap = 0.0;     // loss - optimal_loss
};

// Stationary + every layer full rank => the point must be a global minimum;
// the report carries the evidence either way.
CriticalReport classify_critical_point(const LayerStack& stack, const DataMatrices& data,
                                       double grad_tol = 1e-8);

// Problem bridge.  Each example packs one data column pair: x = [X.col(k);
// Y.col(k)] of length 2d, y unused.  Per-example losses carry the canonical
// column count N so the empirical mean over the canonical dataset equals
// linnet_loss exactly.
ProblemPtr make_linnet(DataMatrices data, int depth);

// Row-major dense matrix from a headerless CSV file, one row per line.
Mat load_matrix_csv(const std::string& path);

}  // namespace stablab
