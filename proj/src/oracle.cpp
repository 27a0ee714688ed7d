#include "interp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "interp/error.hpp"

namespace interp {
namespace {

double plain_norm(const std::vector<double>& z, const SpaceSpec& s) {
  const auto w = s.weights();
  if (s.exponent().is_infinite()) {
    double m = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) m = std::max(m, w[i] * std::abs(z[i]));
    return m;
  }
  const double p = s.exponent().value();
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) acc += std::pow(w[i] * std::abs(z[i]), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace

OracleResult oracle_k(double t, const CoupleElement& a, const CoupleSpec& c, int resolution) {
  const std::size_t n = a.dim();
  if (n > 4) throw InvalidInput("oracle_k: dimension must be <= 4");
  if (resolution < 1) throw InvalidInput("oracle_k: resolution must be >= 1");
  if (!(t > 0.0)) throw InvalidInput("oracle_k: t must be > 0");
  require_same_dim(n, c.dim(), "oracle_k");

  std::vector<int> idx(n, 0);
  std::vector<double> a0(n), a1(n);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = static_cast<double>(idx[i]) / resolution;
      a0[i] = s * a[i];
      a1[i] = a[i] - a0[i];
    }
    best = std::min(best, plain_norm(a0, c.space0()) + t * plain_norm(a1, c.space1()));
    std::size_t k = 0;
    while (k < n && ++idx[k] > resolution) idx[k++] = 0;
    if (k == n) break;
  }
  if (n == 0) best = 0.0;

  // Both norms are dominated by the weighted l^1 norm, so moving s by at most
  // h/2 per coordinate changes the objective by at most this much.
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lipschitz += std::abs(a[i]) * (c.space0().weights()[i] + t * c.space1().weights()[i]);
  }
  return {best, 0.5 / resolution * lipschitz};
}

}  // namespace interp
