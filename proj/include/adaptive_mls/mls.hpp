#pragma once

#include <cmath>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adaptive_mls/kernels.hpp"
#include "adaptive_mls/local_polynomial.hpp"
#include "adaptive_mls/nodes.hpp"

namespace adaptive_mls {

template <typename Scalar>
using VectorRef = std::type_identity_t<Eigen::Ref<const Vector<Scalar>>>;

/// Singular values below this fraction of the largest one count as zero.
inline constexpr double kRankTolerance = 1e-12;

/**
 * Weighted least-squares problem min ||sqrt(W) (E c - f)|| in the monomial basis
 * ((t - center) / scale)^j, j = 0..degree, solved by Householder QR of sqrt(W) E.
 *
 * Rows with zero weight are dropped before factorization. The factorization is
 * independent of the data values, so one instance can fit several right-hand sides
 * and can also expose the data weights C_i of the constant coefficient.
 */
template <typename Scalar = double>
class WeightedLeastSquares {
 public:
  /// @param report_point location named in a RankDeficient error.
  WeightedLeastSquares(VectorRef<Scalar> sites, VectorRef<Scalar> weights, Scalar center, Scalar scale,
                       int degree, Scalar report_point)
      : center_(center), scale_(scale), degree_(degree), total_rows_(sites.size()) {
    if (degree < 0) throw ValidationError("polynomial degree must be nonnegative");
    if (weights.size() != sites.size()) throw ValidationError("weights and sites differ in length");
    const Eigen::Index cols = degree + 1;

    active_.reserve(std::size_t(sites.size()));
    for (Eigen::Index i = 0; i < sites.size(); ++i) {
      if (weights(i) < Scalar(0)) throw ValidationError("least-squares weights must be nonnegative");
      if (weights(i) > Scalar(0)) active_.push_back(i);
    }
    const auto rows = Eigen::Index(active_.size());
    if (rows < cols) throw RankDeficient(double(report_point), std::size_t(rows), std::size_t(cols));

    sqrt_weights_.resize(rows);
    design_.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index i = active_[std::size_t(r)];
      const Scalar sw = std::sqrt(weights(i));
      const Scalar u = (sites(i) - center) / scale;
      sqrt_weights_(r) = sw;
      Scalar power = sw;
      for (Eigen::Index j = 0; j < cols; ++j) {
        design_(r, j) = power;
        power *= u;
      }
    }
    qr_.compute(design_);

    const Matrix<Scalar> upper = qr_.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
    const Vector<Scalar> sigma = Eigen::JacobiSVD<Matrix<Scalar>>(upper).singularValues();
    const Scalar cutoff = Scalar(kRankTolerance) * sigma(0);
    const auto rank = std::size_t((sigma.array() > cutoff).count());
    if (!(sigma(0) > Scalar(0)) || rank < std::size_t(cols))
      throw RankDeficient(double(report_point), rank, std::size_t(cols));
  }

  /// Coefficients of the fitted polynomial for data aligned with the constructor's sites.
  Vector<Scalar> solve(VectorRef<Scalar> values) const {
    if (values.size() != total_rows_) throw ValidationError("value count does not match site count");
    Vector<Scalar> rhs(Eigen::Index(active_.size()));
    for (Eigen::Index r = 0; r < rhs.size(); ++r) rhs(r) = sqrt_weights_(r) * values(active_[std::size_t(r)]);
    return qr_.solve(rhs);
  }

  LocalPolynomial<Scalar> fit(VectorRef<Scalar> values) const {
    return LocalPolynomial<Scalar>(center_, scale_, solve(values));
  }

  /// C_i with c_0 = sum_i C_i f_i, i.e. the first column of D E (E^T D E)^{-1}.
  Vector<Scalar> constant_term_weights() const {
    const Eigen::Index cols = degree_ + 1;
    const auto upper = qr_.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
    Vector<Scalar> z = Vector<Scalar>::Unit(cols, 0);
    upper.transpose().solveInPlace(z);
    upper.solveInPlace(z);
    // Row r of sqrt(W) E is sqrt(w_r) E_r, so C_r = sqrt(w_r) * (sqrt(W) E z)_r.
    const Vector<Scalar> projected = design_ * z;
    Vector<Scalar> weights = Vector<Scalar>::Zero(total_rows_);
    for (Eigen::Index r = 0; r < projected.size(); ++r)
      weights(active_[std::size_t(r)]) = sqrt_weights_(r) * projected(r);
    return weights;
  }

 private:
  Scalar center_;
  Scalar scale_;
  int degree_;
  Eigen::Index total_rows_;
  std::vector<Eigen::Index> active_;
  Vector<Scalar> sqrt_weights_;
  Matrix<Scalar> design_;
  Eigen::HouseholderQR<Matrix<Scalar>> qr_;
};

/**
 * MLS data weights C_i(x), the first column of D E (E^T D E)^{-1} with
 * E_ij = ((x_i - x) / scale)^j and D = diag(weights). The result does not depend
 * on scale (default: the fill distance of the nodes).
 */
template <typename Scalar>
Vector<Scalar> mls_coefficients(Scalar x, const NodeSet<Scalar>& nodes, VectorRef<Scalar> weights, int degree,
                                std::optional<Scalar> scale = std::nullopt) {
  const WeightedLeastSquares<Scalar> ls(nodes.nodes(), weights, x, scale.value_or(nodes.fill_distance()), degree, x);
  return ls.constant_term_weights();
}

/// Per-node weights w(gamma |x - x_i| / h) for the whole node set.
template <typename Scalar>
Vector<Scalar> kernel_weights(Scalar x, const NodeSet<Scalar>& nodes, const WeightKernel<Scalar>& kernel,
                              Scalar gamma) {
  const Scalar h = nodes.fill_distance();
  return nodes.nodes().unaryExpr([&](Scalar xi) { return kernel(gamma * std::abs(x - xi) / h); });
}

/// Local polynomial minimizing sum_i (p(x_i) - f_i)^2 w(gamma |x - x_i| / h), centered at x with scale h.
template <typename Scalar>
LocalPolynomial<Scalar> weighted_mls_fit(Scalar x, const Samples<Scalar>& samples, const WeightKernel<Scalar>& kernel,
                                         Scalar gamma, int degree) {
  if (!(gamma > Scalar(0))) throw ValidationError("shape parameter must be positive");
  const Vector<Scalar> weights = kernel_weights(x, samples.node_set(), kernel, gamma);
  const WeightedLeastSquares<Scalar> ls(samples.nodes(), weights, x, samples.node_set().fill_distance(), degree, x);
  return ls.fit(samples.values());
}

template <typename Scalar>
struct UnweightedFit {
  LocalPolynomial<Scalar> polynomial;
  Vector<Scalar> residuals;  ///< p(x_i) - f_i

  Scalar mean_abs_residual() const { return residuals.cwiseAbs().mean(); }
};

/// Ordinary least squares over polynomials of the given degree; needs more than degree + 1 sites.
template <typename Scalar>
UnweightedFit<Scalar> unweighted_ls_fit(VectorRef<Scalar> sites, VectorRef<Scalar> values, Scalar center, Scalar scale,
                                        int degree) {
  if (sites.size() != values.size()) throw ValidationError("sites and values differ in length");
  if (degree < 0) throw ValidationError("polynomial degree must be nonnegative");
  if (sites.size() <= degree + 1)
    throw RankDeficient(double(center), std::size_t(sites.size()), std::size_t(degree + 2));
  const Vector<Scalar> ones = Vector<Scalar>::Ones(sites.size());
  const WeightedLeastSquares<Scalar> ls(sites, ones, center, scale, degree, center);
  LocalPolynomial<Scalar> poly = ls.fit(values);
  Vector<Scalar> residuals(sites.size());
  for (Eigen::Index i = 0; i < sites.size(); ++i) residuals(i) = poly.value_at(sites(i)) - values(i);
  return {std::move(poly), std::move(residuals)};
}

}  // namespace adaptive_mls
