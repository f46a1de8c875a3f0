#include "adaptive_mls/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace adaptive_mls::experiments {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform on [0, 1) from the top 53 bits; avoids libstdc++-specific distribution code.
double unit_draw(std::mt19937_64& gen) { return double(gen() >> 11) * 0x1.0p-53; }

class LevelFailure : public Error {
 public:
  LevelFailure(int level, const std::exception& cause)
      : Error("level " + std::to_string(level) + ": " + cause.what()) {}
};

}  // namespace

double test_function(TestFunction f, double x) {
  using std::numbers::pi;
  switch (f) {
    case TestFunction::Sin:
      return std::sin(pi * x);
    case TestFunction::G:
      return x <= kJump ? std::sin(pi * x) : -std::sin(pi * x);
    case TestFunction::Z: {
      const double c = (x - 0.25) * (x - 0.25) * (x - 0.25) * std::exp(x * x);
      return x <= kJump ? 5.0 * c : 1.5 - c;
    }
  }
  return 0.0;
}

TestFunction parse_test_function(std::string_view name) {
  const std::string n = lower(name);
  if (n == "sin") return TestFunction::Sin;
  if (n == "g") return TestFunction::G;
  if (n == "z") return TestFunction::Z;
  throw ValidationError("unknown test function '" + std::string(name) + "' (expected sin, g, z)");
}

std::string to_string(TestFunction f) {
  switch (f) {
    case TestFunction::Sin: return "sin";
    case TestFunction::G: return "g";
    case TestFunction::Z: return "z";
  }
  return "?";
}

std::string to_string(Operator op) { return op == Operator::Linear ? "linear" : "nonlinear"; }

Operator parse_operator(std::string_view name) {
  const std::string n = lower(name);
  if (n == "linear" || n == "lin") return Operator::Linear;
  if (n == "nonlinear" || n == "nl") return Operator::Nonlinear;
  throw ValidationError("unknown method '" + std::string(name) + "' (expected linear, nonlinear)");
}

NodeSet<double> uniform_grid(int level) {
  if (level < 1 || level > 30) throw ValidationError("grid level must lie in [1, 30]");
  const Eigen::Index count = (Eigen::Index{1} << level) + 1;
  const double step = 3.0 / std::ldexp(1.0, level - 1);
  Vector<double> x(count);
  for (Eigen::Index i = 0; i < count; ++i) x(i) = kIntervalLo + step * double(i);
  return NodeSet<double>(std::move(x));
}

NodeSet<double> random_grid(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ValidationError("random grid needs at least two nodes");
  std::mt19937_64 gen(seed);
  std::vector<double> x;
  x.reserve(n);
  while (x.size() < n - 2) {
    const double v = kIntervalLo + (kIntervalHi - kIntervalLo) * unit_draw(gen);
    if (v > kIntervalLo && v < kIntervalHi) x.push_back(v);
    if (x.size() == n - 2) {
      std::sort(x.begin(), x.end());
      x.erase(std::unique(x.begin(), x.end()), x.end());
    }
  }
  x.insert(x.begin(), kIntervalLo);
  x.push_back(kIntervalHi);
  return NodeSet<double>(x);
}

NodeSet<double> make_grid(const GridSpec& spec) {
  return std::visit(
      [](const auto& s) -> NodeSet<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformLevel>)
          return uniform_grid(s.level);
        else
          return random_grid(s.n, s.seed);
      },
      spec);
}

std::uint64_t level_seed(std::uint64_t master, int level) { return splitmix64(master + std::uint64_t(level)); }

Vector<double> evaluation_grid() { return Vector<double>::LinSpaced(1001, 0.0, 1000.0) / 1000.0; }

double default_gamma(const WeightKernel<double>& kernel) {
  switch (kernel.kind()) {
    case KernelKind::Wendland2:
    case KernelKind::Wendland4:
      return 0.15;
    case KernelKind::Gaussian:
      return 0.7;
    default:
      return 0.15 * kernel.effective_radius();
  }
}

PUConfig<double> make_config(const WeightKernel<double>& kernel, int degree, const OperatorOptions& options) {
  PUConfig<double> config;
  config.degree = degree;
  config.t = options.t;
  config.eps_weno = options.eps_weno;
  config.kernel = kernel;
  config.gammas = {options.gamma.value_or(default_gamma(kernel))};
  return config;
}

double convergence_rate(double mae_prev, double mae, double h_prev, double h) {
  return std::log(mae_prev / mae) / std::log(h_prev / h);
}

ErrorReport run_convergence(const ConvergenceSpec& spec) {
  return run_convergence(spec, {spec.method}).front();
}

std::vector<ErrorReport> run_convergence(const ConvergenceSpec& spec, const std::vector<Operator>& methods) {
  if (spec.levels.empty()) throw ValidationError("no levels requested");
  if (methods.empty()) throw ValidationError("no operators requested");
  if (!std::is_sorted(spec.levels.begin(), spec.levels.end()) ||
      std::adjacent_find(spec.levels.begin(), spec.levels.end()) != spec.levels.end())
    throw ValidationError("levels must be strictly increasing");

  std::vector<ErrorReport> reports;
  for (Operator op : methods) reports.push_back({to_string(op), spec.kernel.name(), spec.degree, {}});
  const Vector<double> z = evaluation_grid();
  const Vector<double> exact = z.unaryExpr([](double v) { return test_function(TestFunction::Sin, v); });
  for (int level : spec.levels) {
    try {
      NodeSet<double> nodes = spec.grid == GridKind::Uniform
                                  ? uniform_grid(level)
                                  : random_grid((std::size_t{1} << level) + 1, level_seed(spec.seed, level));
      const auto n = std::size_t(nodes.size());
      const double h = nodes.fill_distance();
      auto samples =
          Samples<double>::sample(std::move(nodes), [](double x) { return test_function(TestFunction::Sin, x); });
      const auto cover = build_cover(std::move(samples), make_config(spec.kernel, spec.degree, spec.options));
      const auto values = evaluate_both<double>(cover, z);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const double mae = (values[methods[m]] - exact).cwiseAbs().maxCoeff();
        auto& rows = reports[m].levels;
        std::optional<double> rate;
        if (!rows.empty()) rate = convergence_rate(rows.back().mae, mae, rows.back().h, h);
        rows.push_back({level, n, h, mae, rate});
      }
    } catch (const Error& e) {
      throw LevelFailure(level, e);
    }
  }
  return reports;
}

DiscontinuityResult run_discontinuity(const DiscontinuitySpec& spec) {
  return run_discontinuity(spec, {spec.method}).front();
}

std::vector<DiscontinuityResult> run_discontinuity(const DiscontinuitySpec& spec, const std::vector<Operator>& methods) {
  if (methods.empty()) throw ValidationError("no operators requested");
  auto samples = Samples<double>::sample(make_grid(spec.grid), [&](double x) { return test_function(spec.function, x); });
  const Vector<double> fs = samples.values();
  const Vector<double> xs = samples.nodes();
  const double data_max = fs.maxCoeff();
  const double data_min = fs.minCoeff();
  const auto config = make_config(spec.kernel, spec.degree, spec.options);
  const double gamma = config.gammas.front();
  const auto cover = build_cover(std::move(samples), config);
  const double exclusion = cover.fill_distance() * spec.kernel.effective_radius() / gamma;

  // Grid cell (x_i, x_{i+1}) holding the jump.
  const auto right = Eigen::Index(std::upper_bound(xs.begin(), xs.end(), kJump) - xs.begin());
  const double cell_lo = right > 0 ? xs(right - 1) : kIntervalLo;
  const double cell_hi = right < xs.size() ? xs(right) : kIntervalHi;

  const Vector<double> z = evaluation_grid();
  const auto breakdowns = evaluate_all<double>(cover, z);
  Vector<double> curve_x =
      Vector<double>::LinSpaced(Eigen::Index(std::max<std::size_t>(spec.curve_points, 2)), kIntervalLo, kIntervalHi);
  const auto curves = evaluate_both<double>(cover, curve_x);

  std::vector<DiscontinuityResult> results;
  for (Operator op : methods) {
    double overshoot = 0.0;
    double local_overshoot = 0.0;
    double smooth_mae = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const auto& b = breakdowns[std::size_t(j)];
      const double v = op == Operator::Linear ? b.value_linear : b.value_nonlinear;
      overshoot = std::max({overshoot, v - data_max, data_min - v});
      if (std::abs(z(j) - kJump) > exclusion)
        smooth_mae = std::max(smooth_mae, std::abs(test_function(spec.function, z(j)) - v));
      if (z(j) > cell_lo && z(j) < cell_hi) continue;
      Eigen::Index lo = fs.size();
      Eigen::Index hi = 0;
      for (const auto& term : b.terms) {
        lo = std::min(lo, cover.subdomains()[term.k].first);
        hi = std::max(hi, cover.subdomains()[term.k].last);
      }
      const auto feeding = fs.segment(lo, hi - lo);
      local_overshoot = std::max({local_overshoot, v - feeding.maxCoeff(), feeding.minCoeff() - v});
    }
    OvershootReport report{to_string(op), spec.kernel.name(), spec.degree, overshoot, smooth_mae, exclusion,
                           local_overshoot};
    results.push_back({std::move(report), Curve{curve_x, curves[op]}});
  }
  return results;
}

void write_error_report(std::ostream& out, const ErrorReport& report) {
  out << "level,N,h,mae,rate\n";
  for (const auto& row : report.levels) {
    fmt::print(out, "{},{},{:.4e},{:.4e},", row.level, row.n, row.h, row.mae);
    if (row.rate) fmt::print(out, "{:.4f}", *row.rate);
    out << '\n';
  }
}

void write_overshoot_header(std::ostream& out) {
  out << "method,kernel,degree,max_overshoot,smooth_region_mae,exclusion_radius\n";
}

void write_overshoot_row(std::ostream& out, const OvershootReport& report) {
  fmt::print(out, "{},{},{},{:.4e},{:.4e},{:.4e}\n", report.method, csv_field(report.kernel), report.degree,
             report.max_overshoot, report.smooth_region_mae, report.exclusion_radius);
}

void write_curve(std::ostream& out, const Curve& curve) {
  out << "x,value\n";
  for (Eigen::Index j = 0; j < curve.x.size(); ++j) fmt::print(out, "{:.17g},{:.17g}\n", curve.x(j), curve.value(j));
}

}  // namespace adaptive_mls::experiments
