#include "adaptive_mls/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "adaptive_mls/determinant_oracle.hpp"
#include "adaptive_mls/experiments.hpp"
#include "adaptive_mls/mls.hpp"
#include "adaptive_mls/partition.hpp"

namespace adaptive_mls {

namespace {

using experiments::TestFunction;

class Suite {
 public:
  explicit Suite(std::string name) { result_.name = std::move(name); }

  void check(bool ok, double deviation, const std::string& what) {
    ++result_.checks;
    worst_ = std::max(worst_, deviation);
    if (!ok && result_.failures++ == 0) first_failure_ = what;
  }

  SuiteResult finish() {
    result_.detail = result_.failures == 0 ? fmt::format("{} checks, worst deviation {:.3e}", result_.checks, worst_)
                                           : fmt::format("{}/{} failed; first: {}", result_.failures,
                                                         result_.checks, first_failure_);
    return result_;
  }

 private:
  SuiteResult result_;
  double worst_ = 0.0;
  std::string first_failure_;
};

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * double(gen() >> 11) * 0x1.0p-53;
}

/// Random well-separated sorted nodes in [-1, 1].
std::vector<double> random_nodes(std::mt19937_64& gen, std::size_t n) {
  while (true) {
    std::vector<double> x(n);
    for (auto& v : x) v = uniform(gen, -1.0, 1.0);
    std::sort(x.begin(), x.end());
    bool separated = true;
    for (std::size_t i = 1; i < n; ++i) separated = separated && x[i] - x[i - 1] > 0.05;
    if (separated) return x;
  }
}

SuiteResult oracle_equivalence() {
  Suite suite("oracle-equivalence");
  std::mt19937_64 gen(20240917);
  for (int instance = 0; instance < 100; ++instance) {
    const int degree = int(gen() % 3);
    const std::size_t lo = std::size_t(std::max(degree + 1, 2));
    const std::size_t n = lo + std::size_t(gen() % (7 - lo));
    const auto nodes = random_nodes(gen, n);
    std::vector<double> weights(n);
    for (auto& w : weights) w = uniform(gen, 0.1, 1.0);
    const double x = uniform(gen, nodes.front(), nodes.back());

    const NodeSet<double> set(nodes);
    const Vector<double> w = Eigen::Map<const Vector<double>>(weights.data(), Eigen::Index(n));
    const Vector<double> qr = mls_coefficients(x, set, w, degree);
    const auto oracle = verification::determinant_coefficients(x, nodes, weights, degree);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(qr(Eigen::Index(i)) - oracle[i]));
    suite.check(diff <= 1e-10, diff, fmt::format("instance {} (N={}, d={}, x={}) differs by {:.3e}", instance, n,
                                                 degree, x, diff));
  }

  // Nodes {0, 1, 2}, unit weights, d = 1: C = ((5 - 3x)/6, 1/3, (3x - 1)/6).
  const NodeSet<double> three(std::vector<double>{0.0, 1.0, 2.0});
  const Vector<double> ones = Vector<double>::Ones(3);
  for (int j = 0; j < 20; ++j) {
    const double x = 2.0 * j / 19.0;
    const Vector<double> c = mls_coefficients(x, three, ones, 1);
    const double diff = std::max({std::abs(c(0) - (5.0 - 3.0 * x) / 6.0), std::abs(c(1) - 1.0 / 3.0),
                                  std::abs(c(2) - (3.0 * x - 1.0) / 6.0)});
    suite.check(diff <= 1e-12, diff, fmt::format("closed form at x={} differs by {:.3e}", x, diff));
  }
  return suite.finish();
}

const char* const kTableKernels[] = {"W2", "W4", "G"};

SuiteResult partition_of_unity() {
  Suite suite("partition-of-unity");
  const Vector<double> z = experiments::evaluation_grid();
  for (const char* name : kTableKernels) {
    for (int degree : {2, 3}) {
      auto samples = Samples<double>::sample(experiments::uniform_grid(7),
                                             [](double x) { return experiments::test_function(TestFunction::Sin, x); });
      const auto cover = build_cover(std::move(samples), experiments::make_config(parse_kernel(name), degree, {}));
      for (const auto& b : evaluate_all<double>(cover, z)) {
        double theta_sum = 0.0;
        double beta_sum = 0.0;
        bool in_range = true;
        for (const auto& t : b.terms) {
          theta_sum += t.theta;
          beta_sum += t.beta;
          in_range = in_range && t.theta >= 0.0 && t.theta <= 1.0 && t.beta >= 0.0 && t.beta <= 1.0;
        }
        const double dev = std::max(std::abs(theta_sum - 1.0), std::abs(beta_sum - 1.0));
        suite.check(dev <= 1e-12 && in_range, dev,
                    fmt::format("{} d={} at x={}: sums ({}, {})", name, degree, b.x, theta_sum, beta_sum));
      }
    }
  }
  return suite.finish();
}

SuiteResult polynomial_reproduction() {
  Suite suite("polynomial-reproduction");
  std::mt19937_64 gen(7);
  const Vector<double> z = experiments::evaluation_grid();
  for (const char* name : kTableKernels) {
    for (int degree = 0; degree <= 3; ++degree) {
      std::vector<double> coeffs(std::size_t(degree + 1));
      for (auto& c : coeffs) c = uniform(gen, -1.0, 1.0);
      const auto poly = [&](double x) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
        return acc;
      };
      for (bool random : {false, true}) {
        NodeSet<double> nodes = random ? experiments::random_grid(129, gen()) : experiments::uniform_grid(7);
        const auto cover = build_cover(Samples<double>::sample(std::move(nodes), poly),
                                       experiments::make_config(parse_kernel(name), degree, {}));
        const auto values = evaluate_both<double>(cover, z);
        double worst = 0.0;
        for (Eigen::Index j = 0; j < z.size(); ++j) {
          const double exact = poly(z(j));
          const double scale = 1.0 + std::abs(exact);
          worst = std::max({worst, std::abs(values.linear(j) - exact) / scale,
                            std::abs(values.nonlinear(j) - exact) / scale});
        }
        suite.check(worst <= 1e-9, worst,
                    fmt::format("{} d={} {} grid: relative error {:.3e}", name, degree, random ? "random" : "uniform",
                                worst));
      }
    }
  }
  return suite.finish();
}

/// On g data, a subdomain whose members straddle the jump must be demoted relative to every
/// subdomain on one side of it: (beta_k / theta_k) / (beta_j / theta_j) stays tiny.
SuiteResult weno_suppression(bool corrupt) {
  Suite suite("weno-suppression");
  const Vector<double> z = experiments::evaluation_grid();
  for (int degree : {2, 3}) {
    auto samples = Samples<double>::sample(experiments::uniform_grid(8),
                                           [](double x) { return experiments::test_function(TestFunction::G, x); });
    auto cover = build_cover(std::move(samples), experiments::make_config(parse_kernel("W2"), degree, {}));
    if (corrupt) cover.override_indicators(Vector<double>::Zero(Eigen::Index(cover.subdomains().size())));
    const auto& xs = cover.samples().nodes();
    const auto crosses = [&](std::size_t k) {
      const auto& s = cover.subdomains()[k];
      return xs(s.first) < experiments::kJump && xs(s.last - 1) > experiments::kJump;
    };
    for (const auto& b : evaluate_all<double>(cover, z)) {
      double worst = -1.0;
      for (const auto& tk : b.terms) {
        if (!crosses(tk.k)) continue;
        for (const auto& tj : b.terms) {
          if (crosses(tj.k) || tj.beta == 0.0) continue;
          worst = std::max(worst, (tk.beta * tj.theta) / (tk.theta * tj.beta));
        }
      }
      if (worst < 0.0) continue;
      suite.check(worst <= 1e-6, worst,
                  fmt::format("d={} at x={}: jump-crossing subdomain keeps {:.3e} of its linear share", degree, b.x,
                              worst));
    }
  }
  return suite.finish();
}

}  // namespace

SelftestReport run_selftest(const SelftestOptions& options) {
  SelftestReport report;
  report.suites.push_back(oracle_equivalence());
  report.suites.push_back(partition_of_unity());
  report.suites.push_back(polynomial_reproduction());
  report.suites.push_back(weno_suppression(options.corrupt_indicators));
  return report;
}

}  // namespace adaptive_mls
