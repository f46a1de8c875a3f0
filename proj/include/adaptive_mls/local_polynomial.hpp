#pragma once

#include <cmath>
#include <utility>

#include "adaptive_mls/nodes.hpp"

namespace adaptive_mls {

/// Polynomial sum_j c_j ((t - center) / scale)^j.
template <typename Scalar = double>
class LocalPolynomial {
 public:
  LocalPolynomial(Scalar center, Scalar scale, Vector<Scalar> coefficients)
      : center_(center), scale_(scale), coefficients_(std::move(coefficients)) {
    if (!(scale_ > Scalar(0))) throw ValidationError("polynomial scale must be positive");
    if (coefficients_.size() == 0) throw ValidationError("polynomial needs at least one coefficient");
  }

  Scalar center() const noexcept { return center_; }
  Scalar scale() const noexcept { return scale_; }
  int degree() const noexcept { return int(coefficients_.size()) - 1; }
  const Vector<Scalar>& coefficients() const noexcept { return coefficients_; }

  Scalar value_at(Scalar t) const noexcept {
    const Scalar u = (t - center_) / scale_;
    Scalar acc = 0;
    for (Eigen::Index j = coefficients_.size() - 1; j >= 0; --j) acc = acc * u + coefficients_(j);
    return acc;
  }

  Scalar operator()(Scalar t) const noexcept { return value_at(t); }

  /// Same polynomial expressed in ((t - center) / new_scale)^j.
  LocalPolynomial rescaled(Scalar new_scale) const {
    Vector<Scalar> c = coefficients_;
    const Scalar ratio = new_scale / scale_;
    Scalar factor = 1;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      c(j) *= factor;
      factor *= ratio;
    }
    return LocalPolynomial(center_, new_scale, std::move(c));
  }

 private:
  Scalar center_;
  Scalar scale_;
  Vector<Scalar> coefficients_;
};

}  // namespace adaptive_mls
