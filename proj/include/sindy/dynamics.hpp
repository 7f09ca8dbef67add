#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "sindy/dense.hpp"
#include "sindy/errors.hpp"
#include "sindy/random.hpp"

namespace sindy {

/// Uniform-grid trajectory. The grid is stored as (t0, h) rather than a float
/// array so long series do not accumulate drift; row k is the state at t0+k*h.
struct TimeSeries {
  double t0 = 0.0;
  double h = 0.0;
  DenseMatrix states;  // T x d

  TimeSeries(double t0, double h, DenseMatrix states) : t0(t0), h(h), states(std::move(states)) {
    if (h <= 0.0) throw std::invalid_argument("TimeSeries: step size must be positive");
  }
  std::size_t samples() const { return states.rows(); }
  std::size_t dim() const { return states.cols(); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * h; }
};

struct NoiseModel {
  double variance = 0.0;
  std::uint64_t seed = 0;
};

using SystemRhs = std::function<void(std::span<const double>, std::span<double>)>;

struct SystemId {
  std::string name;
  std::size_t dim = 0;
  SystemRhs rhs;
};

inline void lorenz_rhs(std::span<const double> u, std::span<double> du) {
  du[0] = 10.0 * (u[1] - u[0]);
  du[1] = u[0] * (28.0 - u[2]) - u[1];
  du[2] = u[0] * u[1] - (8.0 / 3.0) * u[2];
}

inline void thomas_rhs(std::span<const double> u, std::span<double> du) {
  du[0] = -0.18 * u[0] + std::sin(u[1]);
  du[1] = -0.18 * u[1] + std::sin(u[2]);
  du[2] = -0.18 * u[2] + std::sin(u[0]);
}

inline SystemId lorenz_system() { return {"lorenz", 3, lorenz_rhs}; }
inline SystemId thomas_system() { return {"thomas", 3, thomas_rhs}; }
inline SystemId custom_system(std::string name, std::size_t dim, SystemRhs rhs) {
  return {std::move(name), dim, std::move(rhs)};
}

/// Classic fixed-step fourth-order Runge-Kutta. t_end/h must be an integer up
/// to rounding; the run fails with the blow-up time if a state goes non-finite.
inline TimeSeries rk4_integrate(const SystemId& system, const DenseVector& u0, double h,
                                double t_end, double t0 = 0.0) {
  if (h <= 0.0) throw std::invalid_argument("rk4_integrate: step size must be positive");
  if (t_end < h) throw std::invalid_argument("rk4_integrate: t_end must be at least one step");
  if (u0.size() != system.dim) throw DimensionError("rk4_integrate: initial state dimension mismatch");
  const double steps_real = t_end / h;
  const auto steps = static_cast<std::size_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9)
    throw std::invalid_argument("rk4_integrate: t_end is not an integer multiple of h");

  const std::size_t d = u0.size();
  DenseMatrix states(steps + 1, d);
  DenseVector u = u0, k1(d), k2(d), k3(d), k4(d), tmp(d);
  for (std::size_t j = 0; j < d; ++j) states(0, j) = u[j];
  for (std::size_t k = 0; k < steps; ++k) {
    system.rhs(u, k1);
    for (std::size_t j = 0; j < d; ++j) tmp[j] = u[j] + 0.5 * h * k1[j];
    system.rhs(tmp, k2);
    for (std::size_t j = 0; j < d; ++j) tmp[j] = u[j] + 0.5 * h * k2[j];
    system.rhs(tmp, k3);
    for (std::size_t j = 0; j < d; ++j) tmp[j] = u[j] + h * k3[j];
    system.rhs(tmp, k4);
    for (std::size_t j = 0; j < d; ++j) u[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(u[j]))
        throw std::runtime_error("rk4_integrate: state became non-finite at t = " +
                                 std::to_string(t0 + static_cast<double>(k + 1) * h));
      states(k + 1, j) = u[j];
    }
  }
  return TimeSeries(t0, h, std::move(states));
}

/// Adds elementwise N(0, variance) noise from the seeded sampler, row-major
/// draw order (time outer, component inner). Zero variance returns the input
/// unchanged; equal seeds give bit-identical output.
inline TimeSeries add_gaussian_noise(const TimeSeries& ts, const NoiseModel& noise) {
  if (noise.variance < 0.0) throw std::invalid_argument("add_gaussian_noise: variance must be nonnegative");
  TimeSeries out = ts;
  if (noise.variance == 0.0) return out;
  GaussianSampler sampler(noise.seed);
  const double stddev = std::sqrt(noise.variance);
  for (std::size_t k = 0; k < ts.samples(); ++k)
    for (std::size_t j = 0; j < ts.dim(); ++j) out.states(k, j) += sampler.next(stddev);
  return out;
}

/// Derivative estimate on the grid: forward difference in the first row,
/// backward in the last, centered in between.
inline DenseMatrix finite_difference_derivative(const TimeSeries& ts) {
  const std::size_t rows = ts.samples(), d = ts.dim();
  if (rows < 3) throw DimensionError("finite_difference_derivative: need at least 3 samples");
  DenseMatrix out(rows, d);
  const double h = ts.h;
  const auto& u = ts.states;
  for (std::size_t j = 0; j < d; ++j) {
    out(0, j) = (u(1, j) - u(0, j)) / h;
    for (std::size_t k = 1; k + 1 < rows; ++k) out(k, j) = (u(k + 1, j) - u(k - 1, j)) / (2.0 * h);
    out(rows - 1, j) = (u(rows - 1, j) - u(rows - 2, j)) / h;
  }
  return out;
}

/// 10 log10( ||x - mean(x)||^2 / ||eta||^2 ), mean taken over all entries.
inline double snr(const DenseVector& x, const DenseVector& eta) {
  const double eta2 = norm2_squared(eta);
  if (eta2 <= 0.0) throw std::invalid_argument("snr: noise norm must be positive");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double centered2 = 0.0;
  for (double v : x) centered2 += (v - mean) * (v - mean);
  return 10.0 * std::log10(centered2 / eta2);
}

/// ||x - x_true|| / ||x_true||.
inline double relative_error(const DenseVector& x, const DenseVector& x_true) {
  if (x.size() != x_true.size()) throw DimensionError("relative_error: size mismatch");
  const double denom = norm2(x_true);
  if (denom <= 0.0) throw std::invalid_argument("relative_error: reference vector must be nonzero");
  double num2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) num2 += (x[i] - x_true[i]) * (x[i] - x_true[i]);
  return std::sqrt(num2) / denom;
}

/// Column-wise flattening; matches the matrix storage order.
inline DenseVector flatten(const DenseMatrix& m) { return m.data(); }

}  // namespace sindy
