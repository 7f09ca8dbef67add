#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "sindy/dense.hpp"

namespace sindy::reference {

/// Consistent triangular benchmark: b is constructed as A * x_true, so the
/// unrestricted least-squares solution recovers x_true exactly.
struct LinearSystemCase {
  DenseMatrix a;
  DenseVector x_true;
  DenseVector b;
};

inline LinearSystemCase example1() {
  DenseMatrix a = DenseMatrix::from_rows({
      {1.0, 0.0, 0.0, 0.0, 0.0},
      {-0.1, 0.9, 0.0, 0.0, 0.0},
      {-0.1, -0.1, 0.8, 0.0, 0.0},
      {-0.1, -0.1, -0.1, 0.7, 0.0},
      {-0.1, -0.1, -0.1, -0.1, 0.6},
  });
  DenseVector x_true{10.0, 0.95, 0.9, 0.85, 0.8};
  DenseVector b = matvec(a, x_true);
  return {std::move(a), std::move(x_true), std::move(b)};
}

/// Noisy square benchmark: b = A * x_true + eta with a fixed noise vector, so
/// runs are exactly reproducible. The target support is {0, 1, 2}.
struct NoisyLinearCase {
  DenseMatrix a;
  DenseVector x_true;
  DenseVector eta;
  DenseVector b;
};

inline NoisyLinearCase example2() {
  DenseMatrix a = DenseMatrix::from_rows({
      {4, 5, 1, 6, 8, 4, 6, 6, 2, 7},
      {6, 5, 7, 5, 3, 3, 2, 5, 9, 2},
      {1, 5, 1, 7, 4, 8, 1, 3, 9, 7},
      {10, 2, 9, 5, 5, 10, 0, 8, 1, 2},
      {9, 9, 3, 9, 6, 4, 3, 7, 1, 4},
      {10, 1, 7, 8, 7, 4, 10, 3, 3, 6},
      {2, 4, 4, 5, 6, 9, 1, 9, 1, 9},
      {2, 5, 1, 3, 6, 3, 10, 7, 2, 1},
      {1, 1, 1, 3, 10, 4, 4, 4, 5, 1},
      {6, 5, 1, 4, 2, 5, 1, 5, 1, 8},
  });
  DenseVector x_true{1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  DenseVector eta{0.23, 0.08, -0.01, -0.02, 0.04, -0.28, -0.32, 0.09, 0.30, 0.63};
  DenseVector b = matvec(a, x_true);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += eta[i];
  return {std::move(a), std::move(x_true), std::move(eta), std::move(b)};
}

// ---- Expected reference outputs for the cases above (4-decimal prints). ----

// example1, lambda in (0.95, 10]: one refinement reaching this vector.
inline constexpr std::array<double, 5> kExample1OneStepX1{9.7981, 0.0, 0.0, 0.0, 0.0};

// example1, lambda = 0.802: the full five-iterate path.
inline constexpr std::array<std::array<double, 5>, 5> kExample1Path{{
    {10.0, 0.95, 0.9, 0.85, 0.8},
    {9.9366, 0.8725, 0.8031, 0.7255, 0.0},
    {9.8869, 0.8117, 0.7271, 0.0, 0.0},
    {9.8417, 0.7566, 0.0, 0.0, 0.0},
    {9.7981, 0.0, 0.0, 0.0, 0.0},
}};

// Objective values along the runs above (rescaled-system convention).
inline constexpr std::array<double, 2> kExample1ObjectiveOneStep{320.0000, 65.2119};
inline constexpr std::array<double, 5> kExample1Objective802{3.2160, 2.7727, 2.3688, 2.0490, 1.8551};

// example2, lambda = 0.7.
inline constexpr std::array<double, 3> kExample2Objective{4.9000, 2.9401, 1.4702};
inline constexpr std::array<double, 10> kExample2X1{1.06, 1.08, 0.96, -0.10, 0.04,
                                                    0.0,  0.0,  -0.03, 0.0,  0.0};
inline constexpr std::array<double, 10> kExample2X2{1.04, 1.01, 0.94, 0.0, 0.0,
                                                    0.0,  0.0,  0.0,  0.0, 0.0};

// example2 support evolution, ordered by entry magnitude (0-based indices).
inline const std::vector<std::vector<std::size_t>> kExample2SupportOrder{
    {1, 2, 7, 3, 0, 4},
    {1, 0, 2},
    {0, 1, 2},
};

}  // namespace sindy::reference
