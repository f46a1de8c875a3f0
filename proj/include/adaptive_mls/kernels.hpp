#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "adaptive_mls/errors.hpp"

namespace adaptive_mls {

enum class KernelKind {
  Gaussian,
  InverseMultiquadric,
  Matern0,
  Matern2,
  Matern4,
  Wendland0,
  Wendland2,
  Wendland4,
  PolyCutoff,
};

template <typename Scalar>
struct KernelSupport {
  bool bounded;            ///< true for compactly supported kinds
  Scalar radius;           ///< 1 when bounded, +inf otherwise
  Scalar effective_radius; ///< smallest r at which eval(r) is identically zero
};

/**
 * Radial weight function w : [0, inf) -> [0, 1] with w(0) = 1, nonincreasing.
 *
 * Non-compact kinds are hard-truncated: values below the truncation threshold
 * are returned as exactly 0, which gives every kind a finite effective radius.
 * Kinds whose textbook form has w(0) = 3 (Matern C4, Wendland C4) are divided by 3.
 */
template <typename Scalar = double>
class WeightKernel {
 public:
  static constexpr Scalar kDefaultTruncation = Scalar(1e-9);

  explicit WeightKernel(KernelKind kind, Scalar truncation_threshold = kDefaultTruncation)
      : WeightKernel(kind, 0, 0, truncation_threshold) {
    if (kind == KernelKind::PolyCutoff)
      throw ValidationError("PolyCutoff kernel requires exponents; use WeightKernel::poly_cutoff");
  }

  /// (1 - r^q)_+^p on [0, 1].
  static WeightKernel poly_cutoff(int p, int q) {
    if (p <= 0 || q <= 0) throw ValidationError("PolyCutoff exponents must be positive integers");
    return WeightKernel(KernelKind::PolyCutoff, p, q, kDefaultTruncation);
  }

  KernelKind kind() const noexcept { return kind_; }
  int cutoff_p() const noexcept { return p_; }
  int cutoff_q() const noexcept { return q_; }
  Scalar truncation_threshold() const noexcept { return threshold_; }

  bool compact() const noexcept {
    switch (kind_) {
      case KernelKind::Wendland0:
      case KernelKind::Wendland2:
      case KernelKind::Wendland4:
      case KernelKind::PolyCutoff:
        return true;
      default:
        return false;
    }
  }

  /// Differentiability class C^k of w(|.|); std::nullopt means C-infinity.
  std::optional<int> smoothness() const noexcept {
    switch (kind_) {
      case KernelKind::Gaussian:
      case KernelKind::InverseMultiquadric:
        return std::nullopt;
      case KernelKind::Matern0:
      case KernelKind::Wendland0:
        return 0;
      case KernelKind::Matern2:
      case KernelKind::Wendland2:
        return 2;
      case KernelKind::Matern4:
      case KernelKind::Wendland4:
        return 4;
      case KernelKind::PolyCutoff:
        return p_ - 1;
    }
    return 0;
  }

  KernelSupport<Scalar> support() const noexcept {
    if (compact()) return {true, Scalar(1), Scalar(1)};
    return {false, std::numeric_limits<Scalar>::infinity(), effective_radius_};
  }

  Scalar effective_radius() const noexcept { return effective_radius_; }

  /// Untruncated formula value.
  Scalar raw(Scalar r) const noexcept {
    using std::exp;
    using std::pow;
    using std::sqrt;
    switch (kind_) {
      case KernelKind::Gaussian:
        return exp(-r * r);
      case KernelKind::InverseMultiquadric:
        return Scalar(1) / sqrt(Scalar(1) + r * r);
      case KernelKind::Matern0:
        return exp(-r);
      case KernelKind::Matern2:
        return exp(-r) * (Scalar(1) + r);
      case KernelKind::Matern4:
        return exp(-r) * (Scalar(3) + Scalar(3) * r + r * r) / Scalar(3);
      case KernelKind::Wendland0: {
        const Scalar s = positive_part(Scalar(1) - r);
        return s * s;
      }
      case KernelKind::Wendland2: {
        const Scalar s = positive_part(Scalar(1) - r);
        const Scalar s2 = s * s;
        return s2 * s2 * (Scalar(4) * r + Scalar(1));
      }
      case KernelKind::Wendland4: {
        const Scalar s = positive_part(Scalar(1) - r);
        const Scalar s3 = s * s * s;
        return s3 * s3 * (Scalar(35) * r * r + Scalar(18) * r + Scalar(3)) / Scalar(3);
      }
      case KernelKind::PolyCutoff:
        if (r >= Scalar(1)) return Scalar(0);
        return pow(Scalar(1) - pow(r, q_), p_);
    }
    return Scalar(0);
  }

  Scalar operator()(Scalar r) const {
    if (!(r >= Scalar(0))) throw ValidationError("kernel evaluated at a negative or NaN radius");
    if (compact()) return raw(r);
    if (r >= effective_radius_) return Scalar(0);
    const Scalar value = raw(r);
    return value < threshold_ ? Scalar(0) : value;
  }

  Scalar eval(Scalar r) const { return (*this)(r); }

  /// Short name used on the command line: G, IMQ, M0, ..., POLY(p,q).
  std::string name() const {
    switch (kind_) {
      case KernelKind::Gaussian: return "G";
      case KernelKind::InverseMultiquadric: return "IMQ";
      case KernelKind::Matern0: return "M0";
      case KernelKind::Matern2: return "M2";
      case KernelKind::Matern4: return "M4";
      case KernelKind::Wendland0: return "W0";
      case KernelKind::Wendland2: return "W2";
      case KernelKind::Wendland4: return "W4";
      case KernelKind::PolyCutoff:
        return "POLY(" + std::to_string(p_) + "," + std::to_string(q_) + ")";
    }
    return "?";
  }

  /// Same kind and exponents with a different truncation threshold.
  WeightKernel with_truncation(Scalar threshold) const {
    return WeightKernel(kind_, p_, q_, threshold);
  }

 private:
  WeightKernel(KernelKind kind, int p, int q, Scalar threshold)
      : kind_(kind), p_(p), q_(q), threshold_(threshold) {
    if (!(threshold >= Scalar(0)) || !(threshold < Scalar(1)))
      throw ValidationError("truncation threshold must lie in [0, 1)");
    effective_radius_ = compute_effective_radius();
  }

  static Scalar positive_part(Scalar v) noexcept { return v > Scalar(0) ? v : Scalar(0); }

  Scalar compute_effective_radius() const {
    using std::log;
    using std::sqrt;
    if (compact()) return Scalar(1);
    if (threshold_ == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
    switch (kind_) {
      case KernelKind::Gaussian:
        return sqrt(-log(threshold_));
      case KernelKind::Matern0:
        return -log(threshold_);
      case KernelKind::InverseMultiquadric:
        return sqrt(Scalar(1) / (threshold_ * threshold_) - Scalar(1));
      default:
        break;
    }
    // Bracket, then bisect for the smallest r with raw(r) <= threshold.
    Scalar lo = 0;
    Scalar hi = 1;
    while (raw(hi) > threshold_) {
      lo = hi;
      hi *= 2;
    }
    while (hi - lo > Scalar(1e-12) * (Scalar(1) + hi)) {
      const Scalar mid = lo + (hi - lo) / 2;
      if (mid <= lo || mid >= hi) break;
      (raw(mid) > threshold_ ? lo : hi) = mid;
    }
    return hi;
  }

  KernelKind kind_;
  int p_;
  int q_;
  Scalar threshold_;
  Scalar effective_radius_{1};
};

/// Parses G, IMQ, M0, M2, M4, W0, W2, W4 or POLY(p,q) (case-insensitive).
WeightKernel<double> parse_kernel(std::string_view name, double truncation_threshold = 1e-9);

}  // namespace adaptive_mls
