#include "adaptive_mls/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>

namespace adaptive_mls {

namespace {

int parse_positive(std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || value <= 0)
    throw ValidationError("POLY exponents must be positive integers, got '" + std::string(text) + "'");
  return value;
}

}  // namespace

WeightKernel<double> parse_kernel(std::string_view name, double truncation_threshold) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return char(std::toupper(c)); });
  upper.erase(std::remove_if(upper.begin(), upper.end(), [](unsigned char c) { return std::isspace(c); }),
              upper.end());

  if (upper == "G") return WeightKernel<double>(KernelKind::Gaussian, truncation_threshold);
  if (upper == "IMQ") return WeightKernel<double>(KernelKind::InverseMultiquadric, truncation_threshold);
  if (upper == "M0") return WeightKernel<double>(KernelKind::Matern0, truncation_threshold);
  if (upper == "M2") return WeightKernel<double>(KernelKind::Matern2, truncation_threshold);
  if (upper == "M4") return WeightKernel<double>(KernelKind::Matern4, truncation_threshold);
  if (upper == "W0") return WeightKernel<double>(KernelKind::Wendland0, truncation_threshold);
  if (upper == "W2") return WeightKernel<double>(KernelKind::Wendland2, truncation_threshold);
  if (upper == "W4") return WeightKernel<double>(KernelKind::Wendland4, truncation_threshold);

  if (upper.starts_with("POLY(") && upper.ends_with(")")) {
    const std::string_view args = std::string_view(upper).substr(5, upper.size() - 6);
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) throw ValidationError("POLY kernel expects POLY(p,q)");
    return WeightKernel<double>::poly_cutoff(parse_positive(args.substr(0, comma)),
                                             parse_positive(args.substr(comma + 1)));
  }
  throw ValidationError("unknown kernel '" + std::string(name) + "' (expected G, IMQ, M0, M2, M4, W0, W2, W4, POLY(p,q))");
}

}  // namespace adaptive_mls
