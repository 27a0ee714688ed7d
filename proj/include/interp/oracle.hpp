#pragma once

// Brute-force reference for the K-functional. Deliberately shares no code
// with the solver: it evaluates norms itself and enumerates decompositions.

#include "interp/couple.hpp"

namespace interp {

struct OracleResult {
  double value = 0.0;        // min of the objective over the grid
  double error_bound = 0.0;  // value - error_bound <= K(t, a) <= value
};

/// Exhaustive minimum over a0 = s * a with s on a uniform grid of
/// `resolution` + 1 points per axis in [0,1]^n. Requires n <= 4.
OracleResult oracle_k(double t, const CoupleElement& a, const CoupleSpec& c, int resolution);

}  // namespace interp
