#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "adaptive_mls/kernels.hpp"
#include "adaptive_mls/mls.hpp"
#include "adaptive_mls/nodes.hpp"
#include "adaptive_mls/parallel.hpp"

namespace adaptive_mls {

template <typename Scalar>
struct Interval {
  Scalar lo;
  Scalar hi;
};

/// Parameters of the partition-of-unity operators.
template <typename Scalar = double>
struct PUConfig {
  int degree = 2;
  Scalar t = 4;            ///< exponent on the smoothness indicator
  Scalar eps_weno = 1e-14; ///< keeps I_k^t + eps away from zero
  WeightKernel<Scalar> kernel{KernelKind::Wendland2};
  std::vector<Scalar> gammas{Scalar(0.15)};  ///< one per center, or a single shared value
  std::vector<Scalar> centers;               ///< empty: use the data nodes
  std::optional<Interval<Scalar>> domain;    ///< default: [x_1, x_N]
};

/// Omega_k: the nodes x_i with w(gamma_k |x_i - center_k| / h) > 0, a contiguous index range.
template <typename Scalar = double>
struct Subdomain {
  std::size_t index;
  Scalar center;
  Scalar gamma;
  Scalar radius;       ///< effective_radius * h / gamma
  Eigen::Index first;  ///< first member node
  Eigen::Index last;   ///< one past the last member node
  LocalPolynomial<Scalar> fit;  ///< unweighted LS fit over the members
  Scalar indicator;             ///< mean |fit(x_i) - f_i| over the members

  Eigen::Index member_count() const noexcept { return last - first; }
};

template <typename Scalar = double>
struct ActiveTerm {
  std::size_t k;
  Scalar delta;  ///< w(gamma_k |x - center_k| / h)
  Scalar theta;  ///< delta_k / sum delta
  Scalar alpha;  ///< theta_k / (I_k^t + eps)
  Scalar beta;   ///< alpha_k / sum alpha
  Scalar local_value;  ///< p_k(x), the weighted fit restricted to Omega_k
};

template <typename Scalar = double>
struct EvalBreakdown {
  Scalar x;
  std::vector<ActiveTerm<Scalar>> terms;  ///< ordered by subdomain index
  Scalar value_linear;
  Scalar value_nonlinear;
  /// sum alpha underflowed; beta fell back to theta.
  bool weno_fallback = false;
};

template <typename Scalar = double>
struct EvalResult {
  Scalar value;
  EvalBreakdown<Scalar> breakdown;
};

enum class Operator { Linear, Nonlinear };

template <typename Scalar = double>
class Cover;

template <typename Scalar>
Cover<Scalar> build_cover(Samples<Scalar> samples, PUConfig<Scalar> config);

/// Immutable partition-of-unity cover over a fixed sample set.
template <typename Scalar>
class Cover {
 public:
  const Samples<Scalar>& samples() const noexcept { return samples_; }
  const PUConfig<Scalar>& config() const noexcept { return config_; }
  const std::vector<Subdomain<Scalar>>& subdomains() const noexcept { return subdomains_; }
  Scalar fill_distance() const noexcept { return samples_.node_set().fill_distance(); }
  Interval<Scalar> domain() const noexcept { return *config_.domain; }

  /// delta_k(x) = w(gamma_k |x - center_k| / h).
  Scalar delta(std::size_t k, Scalar x) const {
    const auto& s = subdomains_[k];
    return config_.kernel(s.gamma * std::abs(x - s.center) / fill_distance());
  }

  /// Subdomains with delta_k(x) > 0, in index order.
  std::vector<std::pair<std::size_t, Scalar>> active(Scalar x) const {
    std::vector<std::pair<std::size_t, Scalar>> out;
    auto lo = sorted_centers_.begin();
    auto hi = sorted_centers_.end();
    if (std::isfinite(max_radius_)) {
      lo = std::lower_bound(sorted_centers_.begin(), sorted_centers_.end(), x - max_radius_);
      hi = std::upper_bound(lo, sorted_centers_.end(), x + max_radius_);
    }
    for (auto it = lo; it != hi; ++it) {
      const std::size_t k = by_center_[std::size_t(it - sorted_centers_.begin())];
      const Scalar d = delta(k, x);
      if (d > Scalar(0)) out.emplace_back(k, d);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

  /// Replaces the smoothness indicators. Only meant for negative-control tests.
  void override_indicators(const Vector<Scalar>& indicators) {
    if (indicators.size() != Eigen::Index(subdomains_.size()))
      throw ValidationError("indicator count does not match subdomain count");
    for (std::size_t k = 0; k < subdomains_.size(); ++k) subdomains_[k].indicator = indicators(Eigen::Index(k));
  }

 private:
  Cover(Samples<Scalar> samples, PUConfig<Scalar> config)
      : samples_(std::move(samples)), config_(std::move(config)) {}

  friend Cover build_cover<Scalar>(Samples<Scalar>, PUConfig<Scalar>);

  Samples<Scalar> samples_;
  PUConfig<Scalar> config_;
  std::vector<Subdomain<Scalar>> subdomains_;
  std::vector<std::size_t> by_center_;
  std::vector<Scalar> sorted_centers_;
  Scalar max_radius_ = 0;
};

namespace detail {

/// Index range of nodes with kernel(gamma |x_i - center| / h) > 0.
template <typename Scalar>
std::pair<Eigen::Index, Eigen::Index> member_range(const Vector<Scalar>& nodes, const WeightKernel<Scalar>& kernel,
                                                   Scalar center, Scalar gamma, Scalar h, Scalar radius) {
  const Eigen::Index n = nodes.size();
  auto positive = [&](Eigen::Index i) { return kernel(gamma * std::abs(nodes(i) - center) / h) > Scalar(0); };
  Eigen::Index first = 0;
  Eigen::Index last = n;
  if (std::isfinite(radius)) {
    first = Eigen::Index(std::lower_bound(nodes.begin(), nodes.end(), center - radius) - nodes.begin());
    last = Eigen::Index(std::upper_bound(nodes.begin(), nodes.end(), center + radius) - nodes.begin());
  }
  // The radius is only a rounding-level estimate; settle the boundary on the kernel itself.
  while (first > 0 && positive(first - 1)) --first;
  while (last < n && positive(last)) ++last;
  while (first < last && !positive(first)) ++first;
  while (last > first && !positive(last - 1)) --last;
  return {first, last};
}

/// Throws CoverageGap unless every point of domain lies in some open interval (c - r, c + r).
template <typename Scalar>
void check_coverage(std::vector<Interval<Scalar>> intervals, Interval<Scalar> domain) {
  std::sort(intervals.begin(), intervals.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  // [domain.lo, frontier) is covered; frontier itself is not yet.
  Scalar frontier = domain.lo;
  for (const auto& iv : intervals) {
    if (frontier > domain.hi) return;
    if (iv.hi <= frontier) continue;
    if (iv.lo >= frontier) throw CoverageGap(double(frontier), double(std::min(iv.lo, domain.hi)));
    frontier = iv.hi;
  }
  if (frontier <= domain.hi) throw CoverageGap(double(frontier), double(domain.hi));
}

}  // namespace detail

/**
 * Builds Omega_k for every center, fits the unweighted polynomial p~_k and its
 * indicator I_k, and checks |Omega_k| > d + 1 and [a, b] within the union of Omega_k.
 */
template <typename Scalar>
Cover<Scalar> build_cover(Samples<Scalar> samples, PUConfig<Scalar> config) {
  const Vector<Scalar>& nodes = samples.nodes();
  if (config.degree < 0) throw ValidationError("polynomial degree must be nonnegative");
  if (!(config.t >= Scalar(0))) throw ValidationError("indicator exponent t must be nonnegative");
  if (!(config.eps_weno > Scalar(0))) throw ValidationError("WENO epsilon must be positive");
  if (config.centers.empty()) config.centers.assign(nodes.begin(), nodes.end());
  if (!config.domain) config.domain = Interval<Scalar>{nodes(0), nodes(nodes.size() - 1)};
  const auto domain = *config.domain;
  if (!(domain.lo <= domain.hi)) throw ValidationError("domain must satisfy a <= b");
  const std::size_t m = config.centers.size();
  if (config.gammas.size() == 1) config.gammas.assign(m, config.gammas.front());
  if (config.gammas.size() != m)
    throw ValidationError("need one shape parameter per center (or a single shared value)");
  for (std::size_t k = 0; k < m; ++k) {
    if (!(config.gammas[k] > Scalar(0))) throw ValidationError("shape parameters must be positive");
    if (config.centers[k] < domain.lo || config.centers[k] > domain.hi)
      throw ValidationError("center " + std::to_string(double(config.centers[k])) + " lies outside the domain");
  }

  const Scalar h = samples.node_set().fill_distance();
  const Scalar effective = config.kernel.effective_radius();
  const auto required = std::size_t(config.degree + 1);

  Cover<Scalar> cover(std::move(samples), std::move(config));
  const auto& cfg = cover.config_;
  const Vector<Scalar>& xs = cover.samples_.nodes();
  const Vector<Scalar>& fs = cover.samples_.values();

  std::vector<Interval<Scalar>> intervals;
  intervals.reserve(m);
  cover.subdomains_.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Scalar center = cfg.centers[k];
    const Scalar gamma = cfg.gammas[k];
    const Scalar radius = effective * h / gamma;
    const auto [first, last] = detail::member_range(xs, cfg.kernel, center, gamma, h, radius);
    if (std::size_t(last - first) <= required) throw TooFewMembers(k, std::size_t(last - first), required);
    auto fit = unweighted_ls_fit<Scalar>(xs.segment(first, last - first), fs.segment(first, last - first), center, h,
                                         cfg.degree);
    const Scalar indicator = fit.mean_abs_residual();
    cover.subdomains_.push_back({k, center, gamma, radius, first, last, std::move(fit.polynomial), indicator});
    intervals.push_back({center - radius, center + radius});
    cover.max_radius_ = std::max(cover.max_radius_, radius);
  }
  detail::check_coverage(std::move(intervals), domain);

  cover.by_center_.resize(m);
  std::iota(cover.by_center_.begin(), cover.by_center_.end(), std::size_t{0});
  std::stable_sort(cover.by_center_.begin(), cover.by_center_.end(),
                   [&](std::size_t a, std::size_t b) { return cfg.centers[a] < cfg.centers[b]; });
  cover.sorted_centers_.reserve(m);
  for (std::size_t k : cover.by_center_) cover.sorted_centers_.push_back(cfg.centers[k]);
  return cover;
}

/// WENO weights beta_k = alpha_k / sum alpha, alpha_k = theta_k / (I_k^t + eps), written into terms.
/// Returns false (and sets beta = theta) if sum alpha underflows to zero or is not finite.
template <typename Scalar>
bool assign_weno_weights(std::vector<ActiveTerm<Scalar>>& terms, const std::vector<Scalar>& indicators, Scalar t,
                         Scalar eps) {
  Scalar alpha_sum = 0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    terms[j].alpha = terms[j].theta / (std::pow(indicators[j], t) + eps);
    alpha_sum += terms[j].alpha;
  }
  if (!(alpha_sum > Scalar(0)) || !std::isfinite(alpha_sum)) {
    for (auto& term : terms) term.beta = term.theta;
    return false;
  }
  for (auto& term : terms) term.beta = term.alpha / alpha_sum;
  return true;
}

/// Both operator values at x with every intermediate weight.
template <typename Scalar>
EvalBreakdown<Scalar> evaluate(Scalar x, const Cover<Scalar>& cover) {
  const auto active = cover.active(x);
  if (active.empty()) throw Uncovered(double(x));
  const auto& cfg = cover.config();
  const Scalar h = cover.fill_distance();
  const Vector<Scalar>& xs = cover.samples().nodes();
  const Vector<Scalar>& fs = cover.samples().values();

  EvalBreakdown<Scalar> out{x, {}, 0, 0, false};
  out.terms.reserve(active.size());
  std::vector<Scalar> indicators;
  indicators.reserve(active.size());
  Scalar delta_sum = 0;
  for (const auto& [k, delta] : active) {
    const auto& s = cover.subdomains()[k];
    const Eigen::Index count = s.member_count();
    const auto sites = xs.segment(s.first, count);
    const Vector<Scalar> weights =
        sites.unaryExpr([&](Scalar xi) { return cfg.kernel(s.gamma * std::abs(x - xi) / h); });
    const WeightedLeastSquares<Scalar> ls(sites, weights, x, h, cfg.degree, x);
    const Scalar local = ls.solve(fs.segment(s.first, count))(0);
    out.terms.push_back({k, delta, 0, 0, 0, local});
    indicators.push_back(s.indicator);
    delta_sum += delta;
  }
  for (auto& term : out.terms) term.theta = term.delta / delta_sum;
  out.weno_fallback = !assign_weno_weights(out.terms, indicators, cfg.t, cfg.eps_weno);
  for (const auto& term : out.terms) {
    out.value_linear += term.theta * term.local_value;
    out.value_nonlinear += term.beta * term.local_value;
  }
  return out;
}

/// sum_k theta_k(x) p_k(x).
template <typename Scalar>
EvalResult<Scalar> evaluate_linear(Scalar x, const Cover<Scalar>& cover) {
  auto breakdown = evaluate(x, cover);
  const Scalar value = breakdown.value_linear;
  return {value, std::move(breakdown)};
}

/// sum_k beta_k(x) p_k(x).
template <typename Scalar>
EvalResult<Scalar> evaluate_nonlinear(Scalar x, const Cover<Scalar>& cover) {
  auto breakdown = evaluate(x, cover);
  const Scalar value = breakdown.value_nonlinear;
  return {value, std::move(breakdown)};
}

/// Full breakdowns at many points; points are independent and processed in parallel.
template <typename Scalar>
std::vector<EvalBreakdown<Scalar>> evaluate_all(const Cover<Scalar>& cover, VectorRef<Scalar> points) {
  std::vector<EvalBreakdown<Scalar>> out(std::size_t(points.size()));
  parallel_for(out.size(), [&](std::size_t j) { out[j] = evaluate(points(Eigen::Index(j)), cover); });
  return out;
}

template <typename Scalar>
struct OperatorValues {
  Vector<Scalar> linear;
  Vector<Scalar> nonlinear;

  const Vector<Scalar>& operator[](Operator op) const { return op == Operator::Linear ? linear : nonlinear; }
};

/// Both operators at many points from one set of local fits.
template <typename Scalar>
OperatorValues<Scalar> evaluate_both(const Cover<Scalar>& cover, VectorRef<Scalar> points) {
  OperatorValues<Scalar> values{Vector<Scalar>(points.size()), Vector<Scalar>(points.size())};
  parallel_for(std::size_t(points.size()), [&](std::size_t j) {
    const auto b = evaluate(points(Eigen::Index(j)), cover);
    values.linear(Eigen::Index(j)) = b.value_linear;
    values.nonlinear(Eigen::Index(j)) = b.value_nonlinear;
  });
  return values;
}

template <typename Scalar>
Vector<Scalar> evaluate_many(const Cover<Scalar>& cover, VectorRef<Scalar> points, Operator op) {
  auto both = evaluate_both(cover, points);
  return op == Operator::Linear ? std::move(both.linear) : std::move(both.nonlinear);
}

template <typename Scalar = double>
struct GuardReport {
  Scalar threshold;
  std::vector<bool> smooth_subdomain;  ///< I_k <= threshold
  std::vector<bool> point_has_smooth;  ///< some active subdomain at the point is smooth

  bool all_points_smooth() const {
    return std::all_of(point_has_smooth.begin(), point_has_smooth.end(), [](bool b) { return b; });
  }
};

/**
 * Checks the hypothesis of the nonlinear convergence result: at each point some
 * active subdomain has a small indicator. Default threshold is 10 * median(I_k).
 */
template <typename Scalar>
GuardReport<Scalar> convergence_guard(const Cover<Scalar>& cover, VectorRef<Scalar> points,
                                      std::optional<Scalar> threshold = std::nullopt) {
  const auto& subs = cover.subdomains();
  GuardReport<Scalar> report;
  if (threshold) {
    report.threshold = *threshold;
  } else {
    std::vector<Scalar> values;
    values.reserve(subs.size());
    for (const auto& s : subs) values.push_back(s.indicator);
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + std::ptrdiff_t(mid), values.end());
    Scalar median = values[mid];
    if (values.size() % 2 == 0) {
      const Scalar lower = *std::max_element(values.begin(), values.begin() + std::ptrdiff_t(mid));
      median = (median + lower) / 2;
    }
    report.threshold = 10 * median;
  }
  report.smooth_subdomain.reserve(subs.size());
  for (const auto& s : subs) report.smooth_subdomain.push_back(s.indicator <= report.threshold);
  report.point_has_smooth.reserve(std::size_t(points.size()));
  for (Eigen::Index j = 0; j < points.size(); ++j) {
    bool found = false;
    for (const auto& [k, delta] : cover.active(points(j))) found = found || report.smooth_subdomain[k];
    report.point_has_smooth.push_back(found);
  }
  return report;
}

}  // namespace adaptive_mls
