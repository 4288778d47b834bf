#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stablab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Example {
  Vec x;
  double y = 0.0;
};

// Sample container with the two neighborhood operations stability work needs:
// replace-one and drop-one.  Value semantics throughout; copies are cheap at
// the sizes handled here and keep experiment code free of aliasing bugs.
class Dataset {
public:
  Dataset() = default;
  explicit Dataset(std::vector<Example> examples) : examples_(std::move(examples)) {}

  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  const Example& operator[](std::size_t i) const { return examples_.at(i); }
  const std::vector<Example>& examples() const { return examples_; }

  void add(Example z) { examples_.push_back(std::move(z)); }
  void add(Vec x, double y) { examples_.push_back({std::move(x), y}); }

  // replace-one neighbor: same size, position i holds z
  Dataset neighbor(std::size_t i, Example z) const {
    check_index(i);
    Dataset out(*this);
    out.examples_[i] = std::move(z);
    return out;
  }

  // drop-one: size n-1, position i removed
  Dataset drop(std::size_t i) const {
    check_index(i);
    Dataset out;
    out.examples_.reserve(examples_.size() - 1);
    for (std::size_t j = 0; j < examples_.size(); ++j)
      if (j != i) out.examples_.push_back(examples_[j]);
    return out;
  }

  // true when the two sets have equal size and differ in at most one slot
  bool neighbors(const Dataset& other) const {
    if (size() != other.size()) return false;
    int diff = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      const Example& a = examples_[i];
      const Example& b = other.examples_[i];
      if (a.y != b.y || a.x.size() != b.x.size() || a.x != b.x)
        if (++diff > 1) return false;
    }
    return true;
  }

private:
  void check_index(std::size_t i) const {
    if (i >= examples_.size())
      throw std::out_of_range("Dataset: index " + std::to_string(i) +
                              " out of range for size " + std::to_string(examples_.size()));
  }

  std::vector<Example> examples_;
};

}  // namespace stablab
