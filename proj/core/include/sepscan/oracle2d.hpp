#pragma once

#include <gmpxx.h>

#include <array>
#include <vector>

#include "sepscan/types.hpp"

namespace sepscan {

/// Tiny 2-D instance with exact rational coordinates; the exhaustive ground
/// truth for property tests of the LP path.
struct TinyProblem {
  std::vector<std::array<mpq_class, 2>> points;
  std::vector<int> labels;  // +1 / -1, both classes non-empty
};

constexpr int kOracleMaxPoints = 12;

/// Decides feasibility of { y_i (w . x_i + b) >= 1 } exactly by
/// Fourier-Motzkin elimination over the rationals on (w1, w2, b). No
/// tolerances. Throws Error{too_large} beyond n = 12 and
/// Error{invalid_argument} on malformed labels.
bool oracle_separable_2d(const TinyProblem& tp);

}  // namespace sepscan
