#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adaptive_mls/kernels.hpp"
#include "adaptive_mls/nodes.hpp"
#include "adaptive_mls/partition.hpp"

namespace adaptive_mls::experiments {

inline constexpr double kIntervalLo = -3.0;
inline constexpr double kIntervalHi = 3.0;
/// Location of the jump in the discontinuous test functions.
inline constexpr double kJump = 2.0 / 3.0;

enum class TestFunction { Sin, G, Z };

/// sin(pi x); g and z switch branches at x = 2/3 (left branch inclusive).
double test_function(TestFunction f, double x);

TestFunction parse_test_function(std::string_view name);
std::string to_string(TestFunction f);
std::string to_string(Operator op);
Operator parse_operator(std::string_view name);

struct UniformLevel {
  int level;
};

struct RandomUniform {
  std::size_t n;
  std::uint64_t seed;
};

using GridSpec = std::variant<UniformLevel, RandomUniform>;

/// x_i = -3 + (3 / 2^(l-1)) i, i = 0..2^l.
NodeSet<double> uniform_grid(int level);

/// Both endpoints plus n - 2 sorted U[-3, 3] draws; identical output for identical seeds.
NodeSet<double> random_grid(std::size_t n, std::uint64_t seed);

NodeSet<double> make_grid(const GridSpec& spec);

/// Seed for level l of a random-grid run, derived from the master seed.
std::uint64_t level_seed(std::uint64_t master, int level);

/// z_j = j / 1000, j = 0..1000.
Vector<double> evaluation_grid();

/// Shape parameter used when none is given: 0.15 for W2/W4, 0.7 for G,
/// otherwise the value giving the same subdomain radius as W2.
double default_gamma(const WeightKernel<double>& kernel);

struct OperatorOptions {
  double t = 4.0;
  double eps_weno = 1e-14;
  std::optional<double> gamma;  ///< default_gamma(kernel) when unset
};

PUConfig<double> make_config(const WeightKernel<double>& kernel, int degree, const OperatorOptions& options);

enum class GridKind { Uniform, Random };

struct ConvergenceSpec {
  Operator method = Operator::Nonlinear;
  WeightKernel<double> kernel{KernelKind::Wendland2};
  int degree = 2;
  std::vector<int> levels{7, 8, 9, 10};
  GridKind grid = GridKind::Uniform;
  std::uint64_t seed = 42;
  OperatorOptions options;
};

struct LevelError {
  int level;
  std::size_t n;
  double h;
  double mae;
  std::optional<double> rate;
};

struct ErrorReport {
  std::string method;
  std::string kernel;
  int degree;
  std::vector<LevelError> levels;
};

/// rate = log(mae_prev / mae) / log(h_prev / h).
double convergence_rate(double mae_prev, double mae, double h_prev, double h);

/// max_j |f(z_j) - I(z_j)| for the given operator on sin(pi x) data.
ErrorReport run_convergence(const ConvergenceSpec& spec);

/// One report per requested operator (spec.method is ignored); shares the local fits.
std::vector<ErrorReport> run_convergence(const ConvergenceSpec& spec, const std::vector<Operator>& methods);

struct DiscontinuitySpec {
  TestFunction function = TestFunction::G;
  Operator method = Operator::Nonlinear;
  WeightKernel<double> kernel{KernelKind::Wendland2};
  int degree = 2;
  GridSpec grid = UniformLevel{9};
  OperatorOptions options;
  std::size_t curve_points = 2001;  ///< dense curve over [-3, 3]
};

struct OvershootReport {
  std::string method;
  std::string kernel;
  int degree;
  double max_overshoot;      ///< largest excursion beyond [min f_i, max f_i] on the z grid
  double smooth_region_mae;  ///< max error on z_j farther than exclusion_radius from the jump
  double exclusion_radius;   ///< one subdomain radius: h * effective_radius / gamma
  /// Diagnostic, not part of the CSV: excursion beyond the range of the data feeding each
  /// point (members of its active subdomains), skipping the grid cell that holds the jump.
  double local_overshoot = 0.0;
};

struct Curve {
  Vector<double> x;
  Vector<double> value;
};

struct DiscontinuityResult {
  OvershootReport report;
  Curve curve;
};

DiscontinuityResult run_discontinuity(const DiscontinuitySpec& spec);

/// One result per requested operator (spec.method is ignored); shares the local fits.
std::vector<DiscontinuityResult> run_discontinuity(const DiscontinuitySpec& spec, const std::vector<Operator>& methods);

// CSV output. Tables use 5 significant digits; curves use 17 (round-trip exact).
void write_error_report(std::ostream& out, const ErrorReport& report);
void write_overshoot_header(std::ostream& out);
void write_overshoot_row(std::ostream& out, const OvershootReport& report);
void write_curve(std::ostream& out, const Curve& curve);

}  // namespace adaptive_mls::experiments
