#pragma once

#include <span>
#include <vector>

#include "interp/couple.hpp"

namespace interp::detail {

struct ReducedSolution {
  std::vector<double> share;  // a0_i = share_i * a_i, each share in [0, 1]
  double lower_bound = 0.0;   // certified lower bound on K(t, a)
};

// General minimizer of ||s*u||_X0 + t ||(1-s)*u||_X1 over s in [0,1]^n, where
// u = |a|. Restricting a0 to s*a loses nothing: clamping any a0_i into the
// segment between 0 and a_i never increases either lattice norm.
ReducedSolution solve_reduced(double t, std::span<const double> magnitudes, const SpaceSpec& x0,
                              const SpaceSpec& x1);

}  // namespace interp::detail
