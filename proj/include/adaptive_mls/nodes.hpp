#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "adaptive_mls/errors.hpp"

namespace adaptive_mls {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct Spacing {
  Scalar fill;         ///< h: largest consecutive gap
  Scalar min_spacing;  ///< h_m: smallest consecutive gap
};

/// Largest and smallest consecutive gap of a strictly increasing node list.
template <typename Derived>
Spacing<typename Derived::Scalar> fill_distance(const Eigen::DenseBase<Derived>& nodes) {
  using Scalar = typename Derived::Scalar;
  if (nodes.size() < 2) throw ValidationError("fill distance needs at least two nodes");
  Scalar h = 0;
  Scalar hm = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 1; i < nodes.size(); ++i) {
    const Scalar gap = nodes(i) - nodes(i - 1);
    if (!(gap > Scalar(0)))
      throw ValidationError("nodes must be strictly increasing (violated at index " +
                            std::to_string(i) + ")");
    h = std::max(h, gap);
    hm = std::min(hm, gap);
  }
  return {h, hm};
}

/// Strictly increasing data sites with cached fill distance and minimum spacing.
template <typename Scalar = double>
class NodeSet {
 public:
  explicit NodeSet(Vector<Scalar> nodes) : nodes_(std::move(nodes)), spacing_(adaptive_mls::fill_distance(nodes_)) {}

  explicit NodeSet(const std::vector<Scalar>& nodes)
      : NodeSet(Vector<Scalar>(Eigen::Map<const Vector<Scalar>>(nodes.data(), Eigen::Index(nodes.size())))) {}

  const Vector<Scalar>& nodes() const noexcept { return nodes_; }
  Eigen::Index size() const noexcept { return nodes_.size(); }
  Scalar operator[](Eigen::Index i) const { return nodes_(i); }
  Scalar front() const { return nodes_(0); }
  Scalar back() const { return nodes_(nodes_.size() - 1); }

  Scalar fill_distance() const noexcept { return spacing_.fill; }
  Scalar min_spacing() const noexcept { return spacing_.min_spacing; }
  /// h / h_m; bounded for quasi-uniform families.
  Scalar quasi_uniformity() const noexcept { return spacing_.fill / spacing_.min_spacing; }

 private:
  Vector<Scalar> nodes_;
  Spacing<Scalar> spacing_;
};

/// Node set plus the sampled values f_i = f(x_i).
template <typename Scalar = double>
class Samples {
 public:
  Samples(NodeSet<Scalar> nodes, Vector<Scalar> values)
      : nodes_(std::move(nodes)), values_(std::move(values)) {
    if (values_.size() != nodes_.size())
      throw ValidationError("sample count " + std::to_string(values_.size()) +
                            " does not match node count " + std::to_string(nodes_.size()));
  }

  /// Sorts (x, f) pairs by x; duplicate sites are rejected.
  static Samples from_unsorted(const std::vector<Scalar>& xs, const std::vector<Scalar>& fs) {
    if (xs.size() != fs.size()) throw ValidationError("x and f columns differ in length");
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    Vector<Scalar> x(Eigen::Index(xs.size()));
    Vector<Scalar> f(Eigen::Index(xs.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
      x(Eigen::Index(i)) = xs[order[i]];
      f(Eigen::Index(i)) = fs[order[i]];
      if (i > 0 && x(Eigen::Index(i)) == x(Eigen::Index(i - 1)))
        throw ValidationError("duplicate data site x = " + std::to_string(double(x(Eigen::Index(i)))));
    }
    return Samples(NodeSet<Scalar>(std::move(x)), std::move(f));
  }

  /// Samples f at every node.
  template <typename Fn>
  static Samples sample(NodeSet<Scalar> nodes, Fn&& f) {
    Vector<Scalar> values = nodes.nodes().unaryExpr([&](Scalar x) { return Scalar(f(x)); });
    return Samples(std::move(nodes), std::move(values));
  }

  const NodeSet<Scalar>& node_set() const noexcept { return nodes_; }
  const Vector<Scalar>& nodes() const noexcept { return nodes_.nodes(); }
  const Vector<Scalar>& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }

 private:
  NodeSet<Scalar> nodes_;
  Vector<Scalar> values_;
};

}  // namespace adaptive_mls
