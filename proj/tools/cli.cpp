#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "adaptive_mls/experiments.hpp"
#include "adaptive_mls/selftest.hpp"

namespace adaptive_mls::cli {

namespace {

namespace ex = experiments;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string kernels = "W2";
  std::string degrees = "2";
  std::string methods = "linear,nonlinear";
  std::optional<double> gamma;
  double t = 4.0;
  double eps = 1e-14;
  double trunc = 1e-9;
  std::optional<std::string> levels;
  std::string grid = "uniform";
  std::uint64_t seed = 42;
  std::string func = "g";
  std::string in;
  std::string out;
  std::size_t eval_n = 1001;
  std::optional<double> eval_lo;
  std::optional<double> eval_hi;
  bool eval_midpoints = false;
  bool corrupt_indicators = false;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Splits on commas outside parentheses so POLY(p,q) stays whole.
std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  int depth = 0;
  std::string current;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      items.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  items.push_back(trim(current));
  std::erase_if(items, [](const std::string& s) { return s.empty(); });
  return items;
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
  const std::string s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::vector<int> parse_levels(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw UsageError("empty level list");
  const auto dash = s.find('-');
  const auto lo = parse_number<int>(s.substr(0, dash));
  const auto hi = dash == std::string::npos ? lo : parse_number<int>(s.substr(dash + 1));
  if (!lo || !hi) throw UsageError("--levels expects A-B or A, got '" + s + "'");
  if (*hi < *lo) throw UsageError("empty level list '" + s + "'");
  std::vector<int> levels;
  for (int l = *lo; l <= *hi; ++l) levels.push_back(l);
  return levels;
}

std::vector<WeightKernel<double>> parse_kernels(const Options& o) {
  std::vector<WeightKernel<double>> kernels;
  for (const auto& name : split_list(o.kernels)) kernels.push_back(parse_kernel(name, o.trunc));
  if (kernels.empty()) throw UsageError("no kernel given");
  return kernels;
}

std::vector<int> parse_degrees(const Options& o) {
  std::vector<int> degrees;
  for (const auto& item : split_list(o.degrees)) {
    const auto d = parse_number<int>(item);
    if (!d || *d < 0) throw UsageError("--degree expects non-negative integers, got '" + item + "'");
    degrees.push_back(*d);
  }
  if (degrees.empty()) throw UsageError("no degree given");
  return degrees;
}

std::vector<Operator> parse_methods(const Options& o) {
  std::vector<Operator> methods;
  for (const auto& item : split_list(o.methods)) {
    const Operator op = ex::parse_operator(item);
    if (std::find(methods.begin(), methods.end(), op) == methods.end()) methods.push_back(op);
  }
  if (methods.empty()) throw UsageError("no method given");
  return methods;
}

ex::OperatorOptions operator_options(const Options& o) { return {o.t, o.eps, o.gamma}; }

/// File-name-safe tag for one method/kernel/degree combination.
std::string combo_tag(std::string_view method, std::string_view kernel, int degree) {
  std::string k;
  for (char c : kernel)
    if (std::isalnum(static_cast<unsigned char>(c))) k += c;
  return fmt::format("{}_{}_p{}", method, k, degree);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + path.string());
  file << content;
}

fs::path output_dir(const Options& o) {
  fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw UsageError("--out " + o.out + " is not a directory");
  return dir;
}

Samples<double> read_samples(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open input '" + path + "'");
  std::vector<double> xs;
  std::vector<double> fs;
  std::string line;
  for (std::size_t number = 1; std::getline(file, line); ++number) {
    const std::string row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    const auto comma = row.find(',');
    const auto x = comma == std::string::npos ? std::nullopt : parse_number<double>(row.substr(0, comma));
    const auto f = comma == std::string::npos ? std::nullopt : parse_number<double>(row.substr(comma + 1));
    if (!x || !f) {
      const bool header = xs.empty() && comma != std::string::npos && !x;
      if (header) continue;
      throw UsageError(fmt::format("{}:{}: malformed row '{}' (expected x,f)", path, number, row));
    }
    xs.push_back(*x);
    fs.push_back(*f);
  }
  return Samples<double>::from_unsorted(xs, fs);
}

int cmd_approx(const Options& o, std::ostream& out) {
  if (o.in.empty()) throw UsageError("approx needs --in PATH");
  const auto kernels = parse_kernels(o);
  const auto degrees = parse_degrees(o);
  if (kernels.size() != 1 || degrees.size() != 1) throw UsageError("approx takes a single kernel and degree");
  auto samples = read_samples(o.in);
  const Vector<double> xs = samples.nodes();

  Vector<double> points;
  if (o.eval_midpoints) {
    points = (xs.head(xs.size() - 1) + xs.tail(xs.size() - 1)) / 2.0;
  } else {
    if (o.eval_n < 1) throw UsageError("--eval-n must be positive");
    const double lo = o.eval_lo.value_or(xs(0));
    const double hi = o.eval_hi.value_or(xs(xs.size() - 1));
    points = Vector<double>::LinSpaced(Eigen::Index(o.eval_n), lo, hi);
  }

  const auto cover = build_cover(std::move(samples), ex::make_config(kernels.front(), degrees.front(), operator_options(o)));
  const auto values = evaluate_both<double>(cover, points);
  std::ostringstream csv;
  csv << "x,value_linear,value_nonlinear\n";
  for (Eigen::Index j = 0; j < points.size(); ++j)
    fmt::print(csv, "{:.17g},{:.17g},{:.17g}\n", points(j), values.linear(j), values.nonlinear(j));
  if (o.out.empty())
    out << csv.str();
  else
    write_file(o.out, csv.str());
  return kExitOk;
}

std::optional<double> mean_tail_rate(const ex::ErrorReport& report, std::size_t count) {
  std::vector<double> rates;
  for (const auto& row : report.levels)
    if (row.rate) rates.push_back(*row.rate);
  if (rates.empty()) return std::nullopt;
  const std::size_t n = std::min(count, rates.size());
  double sum = 0.0;
  for (std::size_t i = rates.size() - n; i < rates.size(); ++i) sum += rates[i];
  return sum / double(n);
}

int cmd_convergence(const Options& o, std::ostream& out) {
  ex::ConvergenceSpec spec;
  spec.levels = parse_levels(o.levels.value_or("7-10"));
  if (o.grid == "uniform")
    spec.grid = ex::GridKind::Uniform;
  else if (o.grid == "random")
    spec.grid = ex::GridKind::Random;
  else
    throw UsageError("--grid expects uniform or random");
  spec.seed = o.seed;
  spec.options = operator_options(o);
  const auto methods = parse_methods(o);

  std::vector<ex::ErrorReport> reports;
  for (const auto& kernel : parse_kernels(o)) {
    for (int degree : parse_degrees(o)) {
      spec.kernel = kernel;
      spec.degree = degree;
      for (auto& r : ex::run_convergence(spec, methods)) reports.push_back(std::move(r));
    }
  }

  std::ostringstream summary;
  summary << "method,kernel,degree,final_level,final_mae,mean_rate_last3\n";
  for (const auto& r : reports) {
    const auto& last = r.levels.back();
    const std::string kernel = r.kernel.find(',') == std::string::npos ? r.kernel : "\"" + r.kernel + "\"";
    fmt::print(summary, "{},{},{},{},{:.4e},", r.method, kernel, r.degree, last.level, last.mae);
    if (const auto rate = mean_tail_rate(r, 3)) fmt::print(summary, "{:.4f}", *rate);
    summary << '\n';
  }

  if (o.out.empty()) {
    for (const auto& r : reports) {
      fmt::print(out, "# {} {} p={}\n", r.method, r.kernel, r.degree);
      ex::write_error_report(out, r);
      out << '\n';
    }
    out << "# summary\n" << summary.str();
    return kExitOk;
  }
  const fs::path dir = output_dir(o);
  for (const auto& r : reports) {
    std::ostringstream csv;
    ex::write_error_report(csv, r);
    write_file(dir / (combo_tag(r.method, r.kernel, r.degree) + ".csv"), csv.str());
  }
  write_file(dir / "summary.csv", summary.str());
  return kExitOk;
}

int cmd_discontinuity(const Options& o, std::ostream& out) {
  ex::DiscontinuitySpec spec;
  spec.function = ex::parse_test_function(o.func);
  const auto levels = parse_levels(o.levels.value_or("9"));
  if (levels.size() != 1) throw UsageError("discontinuity takes a single level");
  const int level = levels.front();
  if (o.grid == "uniform")
    spec.grid = ex::UniformLevel{level};
  else if (o.grid == "random")
    spec.grid = ex::RandomUniform{(std::size_t{1} << level) + 1, ex::level_seed(o.seed, level)};
  else
    throw UsageError("--grid expects uniform or random");
  spec.options = operator_options(o);
  const auto methods = parse_methods(o);

  std::vector<ex::DiscontinuityResult> results;
  for (const auto& kernel : parse_kernels(o)) {
    for (int degree : parse_degrees(o)) {
      spec.kernel = kernel;
      spec.degree = degree;
      for (auto& r : ex::run_discontinuity(spec, methods)) results.push_back(std::move(r));
    }
  }

  std::ostringstream table;
  ex::write_overshoot_header(table);
  for (const auto& r : results) ex::write_overshoot_row(table, r.report);
  if (o.out.empty()) {
    out << table.str();
    return kExitOk;
  }
  const fs::path dir = output_dir(o);
  write_file(dir / "overshoot.csv", table.str());
  for (const auto& r : results) {
    std::ostringstream csv;
    ex::write_curve(csv, r.curve);
    write_file(dir / ("curve_" + o.func + "_" + combo_tag(r.report.method, r.report.kernel, r.report.degree) + ".csv"),
               csv.str());
  }
  return kExitOk;
}

int cmd_selftest(const Options& o, std::ostream& out) {
  const auto report = run_selftest({o.corrupt_indicators});
  for (const auto& s : report.suites)
    fmt::print(out, "{} {}: {}\n", s.passed() ? "PASS" : "FAIL", s.name, s.detail);
  return report.passed() ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moving least squares quasi-interpolation with WENO-weighted partition of unity", "adaptive_mls"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; flags on the command line take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Options o;
  app.add_option("--kernel", o.kernels, "G, IMQ, M0, M2, M4, W0, W2, W4 or POLY(p,q); comma list allowed")
      ->capture_default_str();
  app.add_option("--degree", o.degrees, "polynomial degree; comma list allowed")->capture_default_str();
  app.add_option("--method", o.methods, "linear, nonlinear or both (comma list)")->capture_default_str();
  app.add_option("--gamma", o.gamma, "shape parameter (default 0.15 for W2/W4, 0.7 for G)");
  app.add_option("--t", o.t, "indicator exponent")->capture_default_str();
  app.add_option("--eps", o.eps, "WENO regularizer")->capture_default_str();
  app.add_option("--trunc", o.trunc, "truncation threshold for non-compact kernels")->capture_default_str();
  app.add_option("--levels", o.levels, "level range A-B (convergence: 7-10, discontinuity: 9)");
  app.add_option("--grid", o.grid, "uniform or random")->capture_default_str();
  app.add_option("--seed", o.seed, "master seed for random grids")->capture_default_str();
  app.add_option("--func", o.func, "sin, g or z (discontinuity)")->capture_default_str();
  app.add_option("--in", o.in, "input CSV of x,f rows (approx)");
  app.add_option("--out", o.out, "output file (approx) or directory (convergence, discontinuity)");
  app.add_option("--eval-n", o.eval_n, "number of uniform evaluation points (approx)")->capture_default_str();
  app.add_option("--eval-lo", o.eval_lo, "evaluation grid start (approx; default first node)");
  app.add_option("--eval-hi", o.eval_hi, "evaluation grid end (approx; default last node)");
  app.add_flag("--eval-midpoints", o.eval_midpoints, "evaluate at midpoints between consecutive nodes (approx)");
  app.add_flag("--corrupt-indicators", o.corrupt_indicators)->group("");

  auto* approx = app.add_subcommand("approx", "fit user data and write x,value_linear,value_nonlinear");
  auto* convergence = app.add_subcommand("convergence", "error and rate tables on sin(pi x)");
  auto* discontinuity = app.add_subcommand("discontinuity", "overshoot and smooth-region error on g or z");
  auto* selftest = app.add_subcommand("selftest", "built-in verification suites");
  for (auto* sub : {approx, convergence, discontinuity, selftest}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*approx) return cmd_approx(o, out);
    if (*convergence) return cmd_convergence(o, out);
    if (*discontinuity) return cmd_discontinuity(o, out);
    return cmd_selftest(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace adaptive_mls::cli
