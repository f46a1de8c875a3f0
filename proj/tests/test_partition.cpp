#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adaptive_mls/experiments.hpp"
#include "adaptive_mls/partition.hpp"

using namespace adaptive_mls;
namespace ex = adaptive_mls::experiments;

namespace {

Cover<double> sin_cover(int level, const char* kernel = "W2", int degree = 2) {
  auto samples = Samples<double>::sample(ex::uniform_grid(level), [](double x) { return std::sin(std::numbers::pi * x); });
  return build_cover(std::move(samples), ex::make_config(parse_kernel(kernel), degree, {}));
}

Cover<double> step_cover(int level, int degree = 2) {
  auto samples = Samples<double>::sample(ex::uniform_grid(level), [](double x) { return x <= ex::kJump ? 0.0 : 1.0; });
  return build_cover(std::move(samples), ex::make_config(parse_kernel("W2"), degree, {}));
}

double cover_h(int level) { return ex::uniform_grid(level).fill_distance(); }

bool crosses_jump(const Cover<double>& cover, const Subdomain<double>& s) {
  const auto& xs = cover.samples().nodes();
  return xs(s.first) <= ex::kJump && xs(s.last - 1) > ex::kJump;
}

}  // namespace

TEST_CASE("cover geometry on the level-7 grid") {
  const auto cover = sin_cover(7);
  const double h = cover.fill_distance();
  REQUIRE(cover.subdomains().size() == 129);
  const auto& mid = cover.subdomains()[64];
  CHECK(mid.radius == doctest::Approx(h / 0.15));
  CHECK(mid.member_count() == 13);
  for (const auto& s : cover.subdomains()) CHECK(s.member_count() > 3);
  CHECK(cover.domain().lo == -3.0);
  CHECK(cover.domain().hi == 3.0);
}

TEST_CASE("indicators vanish on polynomial data and stay O(1) across a step") {
  auto samples = Samples<double>::sample(ex::uniform_grid(7), [](double x) { return 1 - x + 0.5 * x * x; });
  const auto poly = build_cover(std::move(samples), ex::make_config(parse_kernel("W2"), 2, {}));
  for (const auto& s : poly.subdomains()) CHECK(s.indicator <= 1e-10);

  for (int level : {7, 8, 9}) {
    const auto step = step_cover(level);
    double crossing_min = 1.0;
    for (const auto& s : step.subdomains()) {
      if (crosses_jump(step, s))
        crossing_min = std::min(crossing_min, s.indicator);
      else
        CHECK(s.indicator <= 1e-10);
    }
    CAPTURE(level);
    CHECK(crossing_min > 0.01);
  }
}

TEST_CASE("polynomial data is reproduced by both operators") {
  for (int d = 0; d <= 3; ++d) {
    const auto p = [d](double x) { return std::pow(x - 0.1, d) + (d > 0 ? 0.5 * x : 0.0) - 2; };
    auto samples = Samples<double>::sample(ex::random_grid(200, 11), p);
    const auto cover = build_cover(std::move(samples), ex::make_config(parse_kernel("G"), d, {}));
    for (double x : {-3.0, -1.3, 0.0, 0.77, 2.99, 3.0}) {
      const auto b = evaluate(x, cover);
      CHECK(std::abs(b.value_linear - p(x)) <= 1e-10 * (1 + std::abs(p(x))));
      CHECK(std::abs(b.value_nonlinear - p(x)) <= 1e-10 * (1 + std::abs(p(x))));
    }
  }
}

TEST_CASE("partition-of-unity sums and ranges") {
  for (const char* kernel : {"W2", "W4", "G"}) {
    const auto cover = sin_cover(8, kernel, 3);
    for (const auto& b : evaluate_all<double>(cover, ex::evaluation_grid())) {
      double theta = 0, beta = 0;
      for (const auto& t : b.terms) {
        theta += t.theta;
        beta += t.beta;
        REQUIRE(t.theta >= 0.0);
        REQUIRE(t.theta <= 1.0);
        REQUIRE(t.beta >= 0.0);
        REQUIRE(t.beta <= 1.0);
      }
      REQUIRE(std::abs(theta - 1) <= 1e-12);
      REQUIRE(std::abs(beta - 1) <= 1e-12);
    }
  }
}

TEST_CASE("equal indicators make the operators coincide") {
  auto cover = sin_cover(7);
  cover.override_indicators(Vector<double>::Constant(Eigen::Index(cover.subdomains().size()), 0.25));
  for (double x : {0.1, 0.5, 0.9}) {
    const auto b = evaluate(x, cover);
    for (const auto& t : b.terms) CHECK(t.beta == doctest::Approx(t.theta).epsilon(1e-10));
    CHECK(b.value_nonlinear == doctest::Approx(b.value_linear).epsilon(1e-12));
  }
}

TEST_CASE("t = 0 reduces the nonlinear operator to the linear one") {
  auto samples = Samples<double>::sample(ex::uniform_grid(8), [](double x) { return ex::test_function(ex::TestFunction::G, x); });
  ex::OperatorOptions options;
  options.t = 0.0;
  const auto cover = build_cover(std::move(samples), ex::make_config(parse_kernel("W2"), 2, options));
  const auto values = evaluate_both<double>(cover, ex::evaluation_grid());
  CHECK((values.linear - values.nonlinear).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("single active subdomain returns its local fit") {
  auto samples = Samples<double>::sample(ex::uniform_grid(6), [](double x) { return std::cos(x); });
  PUConfig<double> config = ex::make_config(parse_kernel("W2"), 1, {});
  config.centers = {-2.0, 0.0, 2.0};
  config.gammas = {cover_h(6) / 1.5};
  const auto cover = build_cover(std::move(samples), config);
  const auto b = evaluate(-2.9, cover);
  REQUIRE(b.terms.size() == 1);
  CHECK(b.terms[0].theta == 1.0);
  CHECK(b.value_linear == b.terms[0].local_value);
  CHECK(b.value_nonlinear == b.terms[0].local_value);
}

TEST_CASE("two-subdomain WENO weights") {
  std::vector<ActiveTerm<double>> terms(2);
  terms[0].theta = terms[1].theta = 0.5;
  CHECK(assign_weno_weights(terms, {0.0, 1.0}, 4.0, 1e-14));
  const double expected = (0.5e14) / (0.5e14 + 0.5 / (1 + 1e-14));
  CHECK(terms[0].beta == doctest::Approx(expected).epsilon(1e-15));
  CHECK(terms[1].beta <= 1e-13);
  CHECK(terms[0].beta + terms[1].beta == doctest::Approx(1.0).epsilon(1e-15));

  std::vector<ActiveTerm<double>> huge(2);
  huge[0].theta = huge[1].theta = 0.5;
  CHECK_FALSE(assign_weno_weights(huge, {1e200, 1e200}, 4.0, 0.0));
  CHECK(huge[0].beta == 0.5);
}

TEST_CASE("WENO suppression obeys the indicator bound near a jump") {
  const auto cover = step_cover(9);
  const double t = cover.config().t;
  const double eps = cover.config().eps_weno;
  std::size_t checked = 0;
  for (const auto& b : evaluate_all<double>(cover, ex::evaluation_grid())) {
    for (const auto& k : b.terms) {
      const auto& sk = cover.subdomains()[k.k];
      if (!crosses_jump(cover, sk)) continue;
      for (const auto& j : b.terms) {
        const auto& sj = cover.subdomains()[j.k];
        if (crosses_jump(cover, sj)) continue;
        const double bound = k.theta / j.theta * (std::pow(sj.indicator, t) + eps) / (std::pow(sk.indicator, t) + eps);
        REQUIRE(k.beta <= bound * (1 + 1e-12));
        CHECK(k.beta * j.theta <= 1e-6 * k.theta * j.beta);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("convergence guard") {
  const auto smooth = sin_cover(8);
  CHECK(convergence_guard<double>(smooth, ex::evaluation_grid()).all_points_smooth());

  auto samples = Samples<double>::sample(ex::uniform_grid(8), [](double x) { return ex::test_function(ex::TestFunction::G, x); });
  const auto cover = build_cover(std::move(samples), ex::make_config(parse_kernel("W2"), 2, {}));
  const double radius = cover.subdomains().front().radius;
  const Vector<double> z = ex::evaluation_grid();
  const auto report = convergence_guard<double>(cover, z);
  for (Eigen::Index j = 0; j < z.size(); ++j)
    if (std::abs(z(j) - ex::kJump) > radius) CHECK(report.point_has_smooth[std::size_t(j)]);

  // With only centers whose member spans all straddle the jump, nothing is smooth at the jump.
  auto step = Samples<double>::sample(ex::uniform_grid(8), [](double x) { return ex::test_function(ex::TestFunction::G, x); });
  PUConfig<double> config = ex::make_config(parse_kernel("W2"), 2, {});
  config.centers = {-3.0, ex::kJump, 3.0};
  config.gammas = {0.005};
  const auto sparse = build_cover(std::move(step), config);
  Vector<double> at_jump(1);
  at_jump << ex::kJump;
  CHECK_FALSE(convergence_guard<double>(sparse, at_jump, 1e-3).point_has_smooth.front());
}

TEST_CASE("cover validation errors") {
  auto samples = [] { return Samples<double>::sample(ex::uniform_grid(5), [](double x) { return x; }); };
  PUConfig<double> config = ex::make_config(parse_kernel("W2"), 2, {});

  config.centers = {-3.0, 3.0};
  CHECK_THROWS_AS(build_cover(samples(), config), CoverageGap);

  config.centers.clear();
  config.gammas = {0.9};
  CHECK_THROWS_AS(build_cover(samples(), config), TooFewMembers);

  config.gammas = {-0.1};
  CHECK_THROWS_AS(build_cover(samples(), config), ValidationError);

  config.gammas = {0.15, 0.15};
  CHECK_THROWS_AS(build_cover(samples(), config), ValidationError);

  config.gammas = {0.15};
  config.centers = {5.0};
  CHECK_THROWS_AS(build_cover(samples(), config), ValidationError);

  const auto cover = build_cover(samples(), ex::make_config(parse_kernel("W2"), 2, {}));
  CHECK_THROWS_AS(evaluate(10.0, cover), Uncovered);
}
