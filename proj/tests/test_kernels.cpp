#include <doctest.h>

#include <cmath>
#include <vector>

#include "adaptive_mls/kernels.hpp"

using namespace adaptive_mls;

namespace {

const std::vector<KernelKind> kNamedKinds = {
    KernelKind::Gaussian, KernelKind::InverseMultiquadric, KernelKind::Matern0, KernelKind::Matern2,
    KernelKind::Matern4,  KernelKind::Wendland0,           KernelKind::Wendland2, KernelKind::Wendland4,
};

std::vector<WeightKernel<double>> all_kernels() {
  std::vector<WeightKernel<double>> out;
  for (auto kind : kNamedKinds) out.emplace_back(kind);
  out.push_back(WeightKernel<double>::poly_cutoff(3, 2));
  return out;
}

}  // namespace

TEST_CASE("kernel values at reference radii") {
  CHECK(WeightKernel<double>(KernelKind::Gaussian)(0.0) == 1.0);
  CHECK(WeightKernel<double>(KernelKind::Wendland2)(1.0) == 0.0);
  CHECK(WeightKernel<double>(KernelKind::Wendland2)(0.5) == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(WeightKernel<double>(KernelKind::Gaussian)(5.0) == 0.0);
  CHECK(WeightKernel<double>::poly_cutoff(2, 3)(0.5) == doctest::Approx(std::pow(1.0 - 0.125, 2)));
}

TEST_CASE("support radii") {
  const auto w4 = WeightKernel<double>(KernelKind::Wendland4).support();
  CHECK(w4.bounded);
  CHECK(w4.radius == 1.0);
  CHECK(w4.effective_radius == 1.0);

  const auto g = WeightKernel<double>(KernelKind::Gaussian).support();
  CHECK_FALSE(g.bounded);
  CHECK(std::isinf(g.radius));
  CHECK(g.effective_radius == doctest::Approx(4.55228).epsilon(1e-5));
  CHECK(std::exp(-g.effective_radius * g.effective_radius) == doctest::Approx(1e-9).epsilon(1e-12));

  const auto m0 = WeightKernel<double>(KernelKind::Matern0);
  CHECK(m0.effective_radius() == doctest::Approx(20.723).epsilon(1e-4));
  // Bisection oracle for exp(-r) = 1e-9.
  double lo = 0.0, hi = 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (std::exp(-mid) > 1e-9 ? lo : hi) = mid;
  }
  CHECK(m0.effective_radius() == doctest::Approx(lo).epsilon(1e-12));
}

TEST_CASE("every kind: unit at zero, bounded, nonincreasing, zero past the effective radius") {
  for (const auto& k : all_kernels()) {
    CAPTURE(k.name());
    CHECK(k(0.0) == 1.0);
    const double reach = k.effective_radius() * 1.1;
    double prev = 1.0;
    for (int i = 0; i <= 10000; ++i) {
      const double v = k(reach * i / 10000.0);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
      REQUIRE(v <= prev);
      prev = v;
    }
    CHECK(k(k.effective_radius()) == 0.0);
    CHECK(k(k.effective_radius() * 1.0001) == 0.0);
    CHECK(k(k.effective_radius() * (1 - 1e-6)) > 0.0);
  }
}

TEST_CASE("compact kinds vanish at r >= 1") {
  for (auto kind : {KernelKind::Wendland0, KernelKind::Wendland2, KernelKind::Wendland4}) {
    const WeightKernel<double> k(kind);
    CHECK(k.compact());
    CHECK(k(1.0) == 0.0);
    CHECK(k(3.0) == 0.0);
  }
  CHECK(WeightKernel<double>::poly_cutoff(1, 1)(1.0) == 0.0);
}

TEST_CASE("second differences reflect smoothness class") {
  // Second difference of x -> w(|x|) at x = r.
  const auto second_diff = [](const WeightKernel<double>& k, double r, double step) {
    return (k(std::abs(r + step)) - 2 * k(r) + k(std::abs(r - step))) / (step * step);
  };
  for (auto kind : {KernelKind::Wendland2, KernelKind::Matern2, KernelKind::Wendland4, KernelKind::Matern4}) {
    const WeightKernel<double> k(kind);
    CAPTURE(k.name());
    for (double step : {1e-2, 1e-3, 1e-4}) {
      CHECK(std::abs(second_diff(k, 0.0, step)) < 50.0);
      if (k.compact()) CHECK(std::abs(second_diff(k, 1.0, step)) < 50.0);
    }
  }
  for (auto kind : {KernelKind::Wendland0, KernelKind::Matern0}) {
    const WeightKernel<double> k(kind);
    CAPTURE(k.name());
    CHECK(std::abs(second_diff(k, 0.0, 1e-4)) > 1e3);
    CHECK(std::abs(k(1e-6) - k(0.0)) < 1e-5);
  }
  CHECK(WeightKernel<double>(KernelKind::Wendland2).smoothness() == 2);
  CHECK_FALSE(WeightKernel<double>(KernelKind::Gaussian).smoothness().has_value());
}

TEST_CASE("truncation applies to every non-compact kind") {
  for (auto kind : {KernelKind::Gaussian, KernelKind::InverseMultiquadric, KernelKind::Matern0, KernelKind::Matern2,
                    KernelKind::Matern4}) {
    const WeightKernel<double> k(kind);
    CAPTURE(k.name());
    CHECK_FALSE(k.compact());
    CHECK(std::isfinite(k.effective_radius()));
    CHECK(k.raw(k.effective_radius() * 1.01) < 1e-9);
  }
  const auto loose = WeightKernel<double>(KernelKind::Gaussian).with_truncation(1e-3);
  CHECK(loose.effective_radius() == doctest::Approx(std::sqrt(-std::log(1e-3))));
  CHECK(std::isinf(WeightKernel<double>(KernelKind::Gaussian, 0.0).effective_radius()));
}

TEST_CASE("kernel validation") {
  CHECK_THROWS_AS(WeightKernel<double>(KernelKind::PolyCutoff), ValidationError);
  CHECK_THROWS_AS(WeightKernel<double>::poly_cutoff(0, 2), ValidationError);
  CHECK_THROWS_AS(WeightKernel<double>(KernelKind::Gaussian, 1.5), ValidationError);
  CHECK_THROWS_AS(WeightKernel<double>(KernelKind::Wendland2)(-0.1), ValidationError);
  CHECK_THROWS_AS(WeightKernel<double>(KernelKind::Wendland2)(std::nan("")), ValidationError);
}

TEST_CASE("kernel names round-trip through the parser") {
  for (const auto& k : all_kernels()) {
    const auto parsed = parse_kernel(k.name());
    CHECK(parsed.kind() == k.kind());
    CHECK(parsed.name() == k.name());
  }
  CHECK(parse_kernel("w2").kind() == KernelKind::Wendland2);
  CHECK(parse_kernel("poly( 3 , 2 )").cutoff_q() == 2);
  CHECK_THROWS_AS(parse_kernel("W3"), ValidationError);
  CHECK_THROWS_AS(parse_kernel("POLY(3)"), ValidationError);
}
