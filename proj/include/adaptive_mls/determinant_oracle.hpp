#pragma once

#include <cstddef>
#include <vector>

#include "adaptive_mls/errors.hpp"

namespace adaptive_mls::verification {

/**
 * Closed-form MLS data weights via the Vandermonde determinant expansion of E^T D E:
 *
 *   n_{i0}(x) = w_{i0} sum_{i1..id} prod_{j>=1} w_{ij} (x_{ij} - x)^j prod_{k<l} (x_{il} - x_{ik})
 *   C_{i0}(x) = n_{i0}(x) / sum_i n_i(x)
 *
 * Cost is O(N^{d+1} d^2), so it is restricted to N <= 8, d <= 3. It shares no code
 * with the QR path and serves only as a cross-check.
 */
inline std::vector<double> determinant_coefficients(double x, const std::vector<double>& nodes,
                                                    const std::vector<double>& weights, int degree) {
  const std::size_t n = nodes.size();
  if (n != weights.size()) throw ValidationError("oracle: nodes and weights differ in length");
  if (n > 8 || degree > 3 || degree < 0) throw ValidationError("oracle limited to N <= 8 and 0 <= d <= 3");
  const auto d = std::size_t(degree);

  std::vector<double> numerators(n, 0.0);
  std::vector<std::size_t> idx(d + 1, 0);
  for (std::size_t i0 = 0; i0 < n; ++i0) {
    idx[0] = i0;
    double sum = 0.0;
    // Odometer over (i1, ..., id) in [0, n)^d.
    std::vector<std::size_t> tail(d, 0);
    while (true) {
      for (std::size_t j = 0; j < d; ++j) idx[j + 1] = tail[j];
      double term = 1.0;
      for (std::size_t j = 1; j <= d; ++j) {
        double power = 1.0;
        for (std::size_t e = 0; e < j; ++e) power *= nodes[idx[j]] - x;
        term *= weights[idx[j]] * power;
      }
      for (std::size_t l = 1; l <= d && term != 0.0; ++l)
        for (std::size_t k = 0; k < l; ++k) term *= nodes[idx[l]] - nodes[idx[k]];
      sum += term;

      std::size_t pos = 0;
      while (pos < d && ++tail[pos] == n) tail[pos++] = 0;
      if (pos == d) break;
    }
    numerators[i0] = weights[i0] * sum;
  }

  double determinant = 0.0;
  for (double v : numerators) determinant += v;
  if (determinant == 0.0) throw ValidationError("oracle: E^T D E is singular");
  for (double& v : numerators) v /= determinant;
  return numerators;
}

}  // namespace adaptive_mls::verification
