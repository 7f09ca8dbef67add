#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sindy/dense.hpp"
#include "sindy/dictionary.hpp"
#include "sindy/dynamics.hpp"
#include "sindy/solver.hpp"

namespace sindy {

/// End-to-end identification run: simulate, perturb, differentiate, build the
/// dictionary, and solve one sparse regression per state equation.
struct IdentifyOptions {
  SystemId system;
  DenseVector u0;
  double h = 0.025;
  double t_end = 10.0;
  double t0 = 0.0;
  DictionarySpec dictionary{};
  NoiseModel noise{};
  SolverParams params{};
  bool analytic_derivatives = false;  // use the true right-hand side instead of differencing
};

struct EquationResult {
  SparseSolution solution;
  IterationTrace trace;
};

struct IdentifyResult {
  TimeSeries clean;
  TimeSeries noisy;
  DenseMatrix derivatives;             // the regression targets, one column per equation
  std::vector<TermLabel> labels;
  DenseMatrix coefficients;            // dictionary_size x d
  std::vector<EquationResult> equations;
  std::optional<double> snr_db;        // absent for noise-free runs
  std::optional<double> relative_err;  // absent when the true coefficients are unknown
};

inline std::optional<std::size_t> find_label(const std::vector<TermLabel>& labels,
                                             const TermLabel& wanted) {
  for (std::size_t j = 0; j < labels.size(); ++j)
    if (labels[j] == wanted) return j;
  return std::nullopt;
}

/// Coefficients of the named benchmark system expressed in the given
/// dictionary, or nullopt if the system is unknown or a term is missing.
inline std::optional<DenseMatrix> true_coefficients(const std::string& system_name,
                                                    const std::vector<TermLabel>& labels) {
  struct Entry {
    TermKind kind;
    std::vector<unsigned> exponents;
    std::size_t equation;
    double value;
  };
  std::vector<Entry> entries;
  if (system_name == "lorenz") {
    entries = {
        {TermKind::monomial, {1, 0, 0}, 0, -10.0},       {TermKind::monomial, {0, 1, 0}, 0, 10.0},
        {TermKind::monomial, {1, 0, 0}, 1, 28.0},        {TermKind::monomial, {0, 1, 0}, 1, -1.0},
        {TermKind::monomial, {1, 0, 1}, 1, -1.0},        {TermKind::monomial, {0, 0, 1}, 2, -8.0 / 3.0},
        {TermKind::monomial, {1, 1, 0}, 2, 1.0},
    };
  } else if (system_name == "thomas") {
    entries = {
        {TermKind::monomial, {1, 0, 0}, 0, -0.18}, {TermKind::sine, {0, 1, 0}, 0, 1.0},
        {TermKind::monomial, {0, 1, 0}, 1, -0.18}, {TermKind::sine, {0, 0, 1}, 1, 1.0},
        {TermKind::monomial, {0, 0, 1}, 2, -0.18}, {TermKind::sine, {1, 0, 0}, 2, 1.0},
    };
  } else {
    return std::nullopt;
  }
  DenseMatrix coeffs(labels.size(), 3);
  for (const auto& e : entries) {
    const auto j = find_label(labels, TermLabel{e.kind, e.exponents});
    if (!j) return std::nullopt;
    coeffs(*j, e.equation) = e.value;
  }
  return coeffs;
}

/// Per-equation supports of the named benchmark system in the given dictionary.
inline std::optional<std::vector<SupportSet>> true_supports(const std::string& system_name,
                                                            const std::vector<TermLabel>& labels) {
  const auto coeffs = true_coefficients(system_name, labels);
  if (!coeffs) return std::nullopt;
  std::vector<SupportSet> out;
  for (std::size_t eq = 0; eq < coeffs->cols(); ++eq) {
    DenseVector col(coeffs->col(eq).begin(), coeffs->col(eq).end());
    out.push_back(support_of(col));
  }
  return out;
}

inline IdentifyResult run_identify(const IdentifyOptions& opt) {
  TimeSeries clean = rk4_integrate(opt.system, opt.u0, opt.h, opt.t_end, opt.t0);
  TimeSeries noisy = add_gaussian_noise(clean, opt.noise);

  DenseMatrix derivatives(noisy.samples(), noisy.dim());
  if (opt.analytic_derivatives) {
    DenseVector du(noisy.dim()), state(noisy.dim());
    for (std::size_t k = 0; k < noisy.samples(); ++k) {
      for (std::size_t j = 0; j < noisy.dim(); ++j) state[j] = noisy.states(k, j);
      opt.system.rhs(state, du);
      for (std::size_t j = 0; j < noisy.dim(); ++j) derivatives(k, j) = du[j];
    }
  } else {
    derivatives = finite_difference_derivative(noisy);
  }

  auto [dict, labels] = assemble_dictionary(noisy.states, opt.dictionary);

  IdentifyResult res{std::move(clean), std::move(noisy), std::move(derivatives), std::move(labels),
                     DenseMatrix(dict.cols(), opt.system.dim), {}, std::nullopt, std::nullopt};
  // The dictionary is shared by the d per-equation solves; factor it once.
  // A positive ridge weight turns into the augmented system up front.
  const bool ridged = opt.params.gamma > 0.0;
  SolverParams per_eq = opt.params;
  per_eq.gamma = 0.0;
  const PrefactoredDictionary shared(ridged ? ridge_augment_matrix(dict, opt.params.gamma) : dict);
  for (std::size_t eq = 0; eq < opt.system.dim; ++eq) {
    DenseVector target(res.derivatives.col(eq).begin(), res.derivatives.col(eq).end());
    if (ridged) target = ridge_augment_rhs(target, dict.cols());
    auto [sol, trace] = sindy_solve(shared, target, per_eq);
    for (std::size_t j = 0; j < dict.cols(); ++j) res.coefficients(j, eq) = sol.x[j];
    res.equations.push_back(EquationResult{std::move(sol), std::move(trace)});
  }

  if (opt.noise.variance > 0.0) {
    DenseVector eta(res.clean.states.data().size());
    for (std::size_t i = 0; i < eta.size(); ++i)
      eta[i] = res.noisy.states.data()[i] - res.clean.states.data()[i];
    res.snr_db = snr(flatten(res.clean.states), eta);
  }
  if (const auto truth = true_coefficients(opt.system.name, res.labels))
    res.relative_err = relative_error(flatten(res.coefficients), flatten(*truth));
  return res;
}

}  // namespace sindy
