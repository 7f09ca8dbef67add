#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sindy/dense.hpp"
#include "sindy/errors.hpp"
#include "sindy/linalg.hpp"

namespace sindy {

inline constexpr double kZeroTol = 1e-12;        // |x_j| > kZeroTol counts as nonzero
inline constexpr double kFixedPointTol = 1e-8;   // inf-norm fixed-point tolerance

struct SolverParams {
  double lambda = 0.0;       // hard threshold, must be > 0
  double gamma = 0.0;        // ridge weight; > 0 switches to the augmented scheme
  std::size_t max_iter = 0;  // refinement budget; 0 means the column count
};

enum class SolveStatus {
  converged,               // support stabilized on a nonempty set
  converged_to_zero,       // support collapsed to the empty set after refinements
  empty_initial_support,   // threshold already empty at the unrestricted solution
};

struct IterationTrace {
  std::vector<DenseVector> iterates;     // x0, x1, ...
  std::vector<SupportSet> supports;      // thresholded support of each iterate
  std::vector<double> residual_norms;    // ||A x^k - b|| on the raw system
  std::vector<double> objective_values;  // objective on the system rescaled by ||A||_2
  bool converged = false;
  SolveStatus status = SolveStatus::converged;
  std::size_t refinement_steps = 0;      // restricted solves after x0 (= iterates.size() - 1)
};

struct SparseSolution {
  DenseVector x;
  SupportSet support;    // nonzero pattern of x
  double residual_norm;  // raw system
  double objective;      // rescaled system
};

inline std::size_t l0_norm(const DenseVector& x, double zero_tol = kZeroTol) {
  std::size_t c = 0;
  for (double v : x)
    if (std::abs(v) > zero_tol) ++c;
  return c;
}

inline SupportSet support_of(const DenseVector& x, double zero_tol = kZeroTol) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (std::abs(x[j]) > zero_tol) idx.push_back(j);
  return SupportSet(std::move(idx));
}

/// { j : |x_j| >= lambda }. Boundary values are kept.
inline SupportSet threshold_support(const DenseVector& x, double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("threshold_support: lambda must be positive");
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (std::abs(x[j]) >= lambda) idx.push_back(j);
  return SupportSet(std::move(idx));
}

/// Indices of S ordered by |x_j| descending (ties by index). Display order used
/// when comparing support evolutions.
inline std::vector<std::size_t> magnitude_ordered(const DenseVector& x, const SupportSet& s) {
  std::vector<std::size_t> idx(s.indices());
  std::stable_sort(idx.begin(), idx.end(),
                   [&x](std::size_t a, std::size_t b) { return std::abs(x[a]) > std::abs(x[b]); });
  return idx;
}

/// ||A x - b||^2 + lambda^2 ||x||_0 evaluated on the system rescaled so that
/// the matrix has unit spectral norm (both A and b divided by ||A||_2).
inline double objective_value(const DenseMatrix& a, const DenseVector& b, const DenseVector& x,
                              double lambda) {
  double sigma = spectral_norm(a);
  if (sigma == 0.0) sigma = 1.0;
  const double r2 = norm2_squared(residual(a, x, b));
  return r2 / (sigma * sigma) + lambda * lambda * static_cast<double>(l0_norm(x));
}

/// Majorizer of the objective at y. The caller passes an already-normalized
/// system (||A||_2 <= 1 up to roundoff); no rescaling happens here.
inline double surrogate_value(const DenseMatrix& a, const DenseVector& b, const DenseVector& x,
                              const DenseVector& y, double lambda) {
  if (x.size() != y.size()) throw DimensionError("surrogate_value: x/y size mismatch");
  const double r2 = norm2_squared(residual(a, x, b));
  DenseVector d(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) d[j] = x[j] - y[j];
  const double ad2 = norm2_squared(matvec(a, d));
  return r2 - ad2 + norm2_squared(d) + lambda * lambda * static_cast<double>(l0_norm(x));
}

namespace detail {

inline void validate_system(const DenseMatrix& a, const DenseVector& b, const char* who) {
  if (b.size() != a.rows()) throw DimensionError(std::string(who) + ": rhs length != row count");
  if (!a.all_finite()) throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
  for (double v : b)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": rhs has non-finite entries");
}

inline void validate_params(const SolverParams& p, const char* who) {
  if (p.lambda <= 0.0) throw std::invalid_argument(std::string(who) + ": lambda must be positive");
  if (p.gamma < 0.0) throw std::invalid_argument(std::string(who) + ": gamma must be nonnegative");
}

}  // namespace detail

std::pair<SparseSolution, IterationTrace> stridge_solve(const DenseMatrix& a, const DenseVector& b,
                                                        const SolverParams& params);

/// One-time preparation of a dictionary shared by repeated solves against
/// different right-hand sides: the QR factorization, the rank check, and the
/// spectral norm used for objective rescaling.
class PrefactoredDictionary {
 public:
  explicit PrefactoredDictionary(const DenseMatrix& a) : qr_(a), sigma_(spectral_norm(a)) {
    if (!a.all_finite())
      throw std::invalid_argument("PrefactoredDictionary: matrix has non-finite entries");
    if (!qr_.rank_full())
      throw RankDeficientError(
          "dictionary is rank deficient (sigma_min/sigma_max = " +
          std::to_string(qr_.sigma_min_estimate() / qr_.sigma_max_estimate()) + ")");
    if (sigma_ == 0.0) sigma_ = 1.0;
  }
  const DenseMatrix& matrix() const { return qr_.matrix(); }
  const QRFactorization& qr() const { return qr_; }
  double matrix_norm() const { return sigma_; }

 private:
  QRFactorization qr_;
  double sigma_;
};

/// Alternates hard thresholding with least squares restricted to the surviving
/// columns, starting from the unrestricted solution. Stops once the support is
/// stationary; an empty support ends the run at the zero vector (flagged in the
/// status, not an error). Terminates within cols(A) refinements.
inline std::pair<SparseSolution, IterationTrace> sindy_solve(const PrefactoredDictionary& dict,
                                                             const DenseVector& b,
                                                             const SolverParams& params) {
  detail::validate_params(params, "sindy_solve");
  if (params.gamma > 0.0)
    throw std::invalid_argument("sindy_solve: a prefactored solve requires gamma == 0; augment first");
  const DenseMatrix& a = dict.matrix();
  detail::validate_system(a, b, "sindy_solve");
  const std::size_t n = a.cols();
  const double sigma = dict.matrix_norm();
  const double lambda = params.lambda;
  const std::size_t max_refinements = (params.max_iter == 0) ? n : params.max_iter;

  IterationTrace trace;
  auto record = [&](DenseVector x) {
    const double r2 = norm2_squared(residual(a, x, b));
    trace.residual_norms.push_back(std::sqrt(r2));
    trace.objective_values.push_back(r2 / (sigma * sigma) +
                                     lambda * lambda * static_cast<double>(l0_norm(x)));
    trace.supports.push_back(threshold_support(x, lambda));
    trace.iterates.push_back(std::move(x));
  };

  record(dict.qr().solve(b));
  while (true) {
    const std::size_t k = trace.supports.size();
    if (k >= 2 && trace.supports[k - 1] == trace.supports[k - 2]) {
      trace.status = SolveStatus::converged;
      break;
    }
    if (trace.supports.back().empty()) {
      // The next iterate is exactly zero and its support repeats; finish here.
      record(DenseVector(n, 0.0));
      ++trace.refinement_steps;
      trace.status = (k == 1) ? SolveStatus::empty_initial_support : SolveStatus::converged_to_zero;
      break;
    }
    if (trace.refinement_steps >= max_refinements)
      throw std::logic_error("sindy_solve: support did not stabilize within the iteration budget (" +
                             std::to_string(max_refinements) + "); this contradicts the termination bound");
    record(restricted_least_squares(a, b, trace.supports.back()));
    ++trace.refinement_steps;
  }
  trace.converged = true;

  const DenseVector& xf = trace.iterates.back();
  SparseSolution sol{xf, support_of(xf), trace.residual_norms.back(), trace.objective_values.back()};
  return {std::move(sol), std::move(trace)};
}

inline std::pair<SparseSolution, IterationTrace> sindy_solve(const DenseMatrix& a,
                                                             const DenseVector& b,
                                                             const SolverParams& params) {
  detail::validate_params(params, "sindy_solve");
  if (params.gamma > 0.0) return stridge_solve(a, b, params);
  if (a.rows() < a.cols()) throw DimensionError("sindy_solve: requires rows >= cols");
  detail::validate_system(a, b, "sindy_solve");
  return sindy_solve(PrefactoredDictionary(a), b, params);
}

/// [A; gamma I] stacked over b padded with zeros.
inline DenseMatrix ridge_augment_matrix(const DenseMatrix& a, double gamma) {
  DenseMatrix out(a.rows() + a.cols(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto src = a.col(j);
    auto dst = out.col(j);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[a.rows() + j] = gamma;
  }
  return out;
}

inline DenseVector ridge_augment_rhs(const DenseVector& b, std::size_t n) {
  DenseVector out(b.size() + n, 0.0);
  std::copy(b.begin(), b.end(), out.begin());
  return out;
}

/// Ridge variant: runs the same scheme on the augmented system, which is full
/// column rank for any A. Trace quantities refer to the augmented system.
inline std::pair<SparseSolution, IterationTrace> stridge_solve(const DenseMatrix& a,
                                                               const DenseVector& b,
                                                               const SolverParams& params) {
  if (params.gamma <= 0.0) throw std::invalid_argument("stridge_solve: gamma must be positive");
  detail::validate_system(a, b, "stridge_solve");
  SolverParams inner = params;
  inner.gamma = 0.0;
  return sindy_solve(ridge_augment_matrix(a, params.gamma), ridge_augment_rhs(b, a.cols()), inner);
}

/// True iff x is unchanged by one scheme step: nonzero entries at or above the
/// threshold (within tol), zero entries strictly below it, and x solves the
/// least-squares problem restricted to its own support (inf-norm tol).
inline bool is_fixed_point(const DenseMatrix& a, const DenseVector& b, const DenseVector& x,
                           double lambda, double tol = kFixedPointTol) {
  if (tol <= 0.0) throw std::invalid_argument("is_fixed_point: tol must be positive");
  const SupportSet supp = support_of(x);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double m = std::abs(x[j]);
    if (m > kZeroTol) {
      if (m < lambda - tol) return false;
    } else if (m >= lambda) {
      return false;
    }
  }
  const DenseVector y = restricted_least_squares(a, b, supp);
  for (std::size_t j = 0; j < x.size(); ++j)
    if (std::abs(y[j] - x[j]) > tol) return false;
  return true;
}

/// One-step recovery window test: min_{j in S} |x0_j| >= lambda > max over the
/// complement, where x0 is the unrestricted least-squares solution.
inline bool check_one_step_condition(const DenseMatrix& a, const DenseVector& b, const SupportSet& s,
                                     double lambda) {
  const DenseVector x0 = pseudo_inverse_apply(a, b);
  double min_on = std::numeric_limits<double>::infinity();
  double max_off = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x0.size(); ++j) {
    if (s.contains(j))
      min_on = std::min(min_on, std::abs(x0[j]));
    else
      max_off = std::max(max_off, std::abs(x0[j]));
  }
  return min_on >= lambda && lambda > max_off;
}

/// Necessary conditions for a global minimizer on a normalized system:
/// |a_j^T(Ax-b)| <= lambda off the support; on the support the entry is at
/// least lambda in magnitude and the correlation vanishes. Passing this check
/// does not certify global optimality.
inline bool check_global_min_conditions(const DenseMatrix& a, const DenseVector& b,
                                        const DenseVector& x, double lambda, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("check_global_min_conditions: tol must be positive");
  const DenseVector corr = matvec_transpose(a, residual(a, x, b));
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (std::abs(x[j]) > kZeroTol) {
      if (std::abs(x[j]) < lambda - tol) return false;
      if (std::abs(corr[j]) > tol) return false;
    } else {
      if (std::abs(corr[j]) > lambda + tol) return false;
    }
  }
  return true;
}

/// Exhaustive minimizer of the objective over all supports. Expects the system
/// pre-normalized to unit spectral norm; the objective is evaluated directly.
/// Ties resolve to the smaller support, then the lexicographically smallest.
inline SparseSolution brute_force_global_min(const DenseMatrix& a, const DenseVector& b,
                                             double lambda) {
  const std::size_t n = a.cols();
  if (n > 20)
    throw std::invalid_argument("brute_force_global_min: refusing enumeration for n = " +
                                std::to_string(n) + " (> 20)");
  if (lambda <= 0.0) throw std::invalid_argument("brute_force_global_min: lambda must be positive");
  detail::validate_system(a, b, "brute_force_global_min");

  bool have_best = false;
  SparseSolution best{};
  auto consider = [&](const SupportSet& s) {
    const DenseVector x = restricted_least_squares(a, b, s);
    const double r2 = norm2_squared(residual(a, x, b));
    const SupportSet supp = support_of(x);
    const double f = r2 + lambda * lambda * static_cast<double>(supp.size());
    const bool better =
        !have_best || f < best.objective ||
        (f == best.objective &&
         (supp.size() < best.support.size() ||
          (supp.size() == best.support.size() &&
           std::lexicographical_compare(supp.indices().begin(), supp.indices().end(),
                                        best.support.indices().begin(), best.support.indices().end()))));
    if (better) {
      best = SparseSolution{x, supp, std::sqrt(r2), f};
      have_best = true;
    }
  };

  consider(SupportSet{});
  // Cardinality-ascending, lexicographic within each cardinality.
  for (std::size_t c = 1; c <= n; ++c) {
    std::vector<std::size_t> comb(c);
    for (std::size_t i = 0; i < c; ++i) comb[i] = i;
    while (true) {
      consider(SupportSet(comb));
      std::size_t i = c;
      while (i-- > 0) {
        if (comb[i] != i + n - c) {
          ++comb[i];
          for (std::size_t k = i + 1; k < c; ++k) comb[k] = comb[k - 1] + 1;
          break;
        }
        if (i == 0) goto next_cardinality;
      }
    }
  next_cardinality:;
  }
  return best;
}

}  // namespace sindy
