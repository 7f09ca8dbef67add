// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 5 and 6 measure seed-robustness of the noisy benchmark
// identifications; their success rates are reported as measured.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "sindy/sindy.hpp"

using namespace sindy;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s  %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : "  -- ",
              detail.c_str());
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t m, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix a(m, n);
  for (double& v : a.data()) v = dist(rng);
  return a;
}

DenseVector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseVector v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

std::pair<DenseMatrix, DenseVector> normalized(const DenseMatrix& a, const DenseVector& b) {
  const double sigma = spectral_norm(a);
  DenseMatrix an = a;
  for (double& v : an.data()) v /= sigma;
  DenseVector bn = b;
  for (double& v : bn) v /= sigma;
  return {std::move(an), std::move(bn)};
}

// --- criterion 1: one-step window, value accuracy, and per-solve runtime ---
void criterion_one_step() {
  const auto ex = reference::example1();
  (void)sindy_solve(ex.a, ex.b, {.lambda = 5.0});  // warmup
  bool ok = true;
  std::string detail;
  double worst_ms = 0.0;
  for (double lambda : {1.0, 5.0, 10.0}) {
    const auto t0 = Clock::now();
    auto [sol, trace] = sindy_solve(ex.a, ex.b, {.lambda = lambda});
    worst_ms = std::max(worst_ms, ms_since(t0));
    bool this_ok = trace.refinement_steps == 1;
    for (std::size_t j = 0; j < 5; ++j)
      if (std::abs(sol.x[j] - reference::kExample1OneStepX1[j]) > 1e-4) this_ok = false;
    if (!this_ok) {
      ok = false;
      detail += "lambda=" + std::to_string(lambda) + " gave " +
                std::to_string(trace.refinement_steps) + " refinements ending " +
                (sol.support.empty() ? "at zero" : "elsewhere") + "; ";
    }
  }
  if (worst_ms >= 1.0) ok = false;
  detail += "worst solve " + std::to_string(worst_ms) + " ms";
  if (!ok)
    detail += " (the refit value 9.7981 is below a threshold of 10, so the scheme's own "
              "threshold step empties the support; the attainable window is (0.95, 9.7981])";
  report("criterion 1: one-step regime (lambda in {1,5,10}, x to 1e-4, < 1 ms)", ok, detail);
}

// --- criterion 2: the four-step path ---
void criterion_full_path() {
  const auto ex = reference::example1();
  auto [sol, trace] = sindy_solve(ex.a, ex.b, {.lambda = 0.802});
  bool ok = trace.refinement_steps == 4 && trace.iterates.size() == 5;
  if (ok)
    for (std::size_t k = 0; k < 5; ++k)
      for (std::size_t j = 0; j < 5; ++j)
        if (std::abs(trace.iterates[k][j] - reference::kExample1Path[k][j]) > 1e-3) ok = false;
  const std::size_t cards[5] = {4, 3, 2, 1, 1};
  if (ok)
    for (std::size_t k = 0; k < 5; ++k)
      if (trace.supports[k].size() != cards[k]) ok = false;
  report("criterion 2: four refinements, iterates to 1e-3, support cards 4,3,2,1,1", ok, "");
}

// --- criterion 3: objective table ---
void criterion_objective_table() {
  const auto ex1 = reference::example1();
  const auto ex2 = reference::example2();
  bool ok = true;
  {
    auto [sol, trace] = sindy_solve(ex1.a, ex1.b, {.lambda = 8.0});
    for (std::size_t k = 0; k < 2; ++k)
      if (std::abs(trace.objective_values[k] - reference::kExample1ObjectiveOneStep[k]) > 1e-3)
        ok = false;
  }
  {
    auto [sol, trace] = sindy_solve(ex1.a, ex1.b, {.lambda = 0.802});
    for (std::size_t k = 0; k < 5; ++k)
      if (std::abs(trace.objective_values[k] - reference::kExample1Objective802[k]) > 1e-3)
        ok = false;
  }
  {
    auto [sol, trace] = sindy_solve(ex2.a, ex2.b, {.lambda = 0.7});
    for (std::size_t k = 0; k < 3; ++k)
      if (std::abs(trace.objective_values[k] - reference::kExample2Objective[k]) > 1e-3) ok = false;
  }
  report("criterion 3: objective table reproduced to 1e-3 (rescaled convention)", ok, "");
}

// --- criterion 4: noisy square case ---
void criterion_noisy_case() {
  const auto ex = reference::example2();
  auto [sol, trace] = sindy_solve(ex.a, ex.b, {.lambda = 0.7});
  bool ok = sol.support == SupportSet({0, 1, 2});
  for (std::size_t j = 0; j < 10 && ok; ++j)
    if (std::abs(trace.iterates.back()[j] - reference::kExample2X2[j]) > 1e-2) ok = false;
  for (std::size_t k = 0; k < 3 && ok; ++k)
    if (magnitude_ordered(trace.iterates[k], trace.supports[k]) !=
        reference::kExample2SupportOrder[k])
      ok = false;
  report("criterion 4: final support {1,2,3}, x2 to 1e-2, magnitude-ordered path", ok, "");
}

// --- criteria 5/6: seed-robustness of the benchmark identifications ---
struct RobustnessResult {
  int successes = 0;
  double worst_e = 0.0;
  double ms = 0.0;
};

RobustnessResult identification_robustness(const SystemId& system, const DenseVector& u0,
                                           double t_end, const DictionarySpec& dict, double lambda,
                                           double e_bound, bool check_snr) {
  const auto t0 = Clock::now();
  RobustnessResult out;
  const TimeSeries clean = rk4_integrate(system, u0, 0.025, t_end);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const TimeSeries noisy = add_gaussian_noise(clean, {.variance = 0.01, .seed = seed});
    DenseVector eta(clean.states.data().size());
    for (std::size_t i = 0; i < eta.size(); ++i)
      eta[i] = noisy.states.data()[i] - clean.states.data()[i];
    const DenseMatrix deriv = finite_difference_derivative(noisy);
    auto [dict_m, labels] = assemble_dictionary(noisy.states, dict);
    const auto truth = true_coefficients(system.name, labels);
    const auto supports = true_supports(system.name, labels);

    bool support_ok = true;
    DenseMatrix coeffs(dict_m.cols(), 3);
    for (std::size_t eq = 0; eq < 3; ++eq) {
      DenseVector target(deriv.col(eq).begin(), deriv.col(eq).end());
      auto [sol, trace] = sindy_solve(dict_m, target, {.lambda = lambda});
      support_ok &= sol.support == (*supports)[eq];
      for (std::size_t j = 0; j < dict_m.cols(); ++j) coeffs(j, eq) = sol.x[j];
    }
    const double e = relative_error(flatten(coeffs), flatten(*truth));
    const double s = snr(flatten(clean.states), eta);
    out.worst_e = std::max(out.worst_e, e);
    const bool snr_ok = !check_snr || (s >= 39.0 && s <= 43.0);
    if (support_ok && e <= e_bound && snr_ok) ++out.successes;
  }
  out.ms = ms_since(t0);
  return out;
}

void criterion_lorenz_robustness() {
  const auto r = identification_robustness(lorenz_system(), {-5.0, 10.0, 30.0}, 10.0,
                                           {.poly_order = 5}, 0.8, 0.1, true);
  const bool ok = r.successes >= 95 && r.ms < 5000.0;
  report("criterion 5: lorenz identification robust for >= 95/100 seeds, < 5 s",
         ok,
         std::to_string(r.successes) + "/100 seeds succeeded (support+E+SNR), " +
             std::to_string(r.ms / 1000.0) + " s");
}

void criterion_thomas_robustness() {
  const auto r = identification_robustness(thomas_system(), {1.0, 1.0, 0.0}, 100.0,
                                           {.poly_order = 3, .sin_order = 1, .cos_order = 1}, 0.1,
                                           0.05, false);
  const bool ok = r.successes >= 95;
  report("criterion 6: thomas identification robust for >= 95/100 seeds", ok,
         std::to_string(r.successes) + "/100 seeds succeeded (support+E), " +
             std::to_string(r.ms / 1000.0) + " s");
}

// --- criterion 7: solver property suite ---
void criterion_property_suite() {
  std::mt19937_64 rng(20240807);
  int violations = 0;
  std::string first_violation;
  auto violate = [&](const std::string& what, int trial) {
    ++violations;
    if (first_violation.empty()) first_violation = what + " at instance " + std::to_string(trial);
  };
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<std::size_t> mdist(8, 30);
    const std::size_t m = mdist(rng);
    std::uniform_int_distribution<std::size_t> ndist(4, std::min<std::size_t>(12, m));
    const std::size_t n = ndist(rng);
    const DenseMatrix a = random_matrix(rng, m, n);
    const DenseVector b = random_vector(rng, m);
    std::uniform_real_distribution<double> ldist(0.05, 1.0);
    const double lambda = ldist(rng);
    auto [sol, trace] = sindy_solve(a, b, {.lambda = lambda});

    if (trace.refinement_steps > n) violate("iteration bound", trial);
    if (trace.refinement_steps >
        std::max<std::size_t>(trace.supports.front().size() - sol.support.size() + 1, 1))
      violate("shrink-count bound", trial);
    for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k) {
      const SupportSet supp_next = support_of(trace.iterates[k + 1]);
      if (!trace.supports[k + 1].subset_of(supp_next) || !supp_next.subset_of(trace.supports[k]))
        violate("support nesting", trial);
      if (trace.residual_norms[k + 1] <
          trace.residual_norms[k] - 1e-10 * (1.0 + trace.residual_norms[k]))
        violate("residual monotonicity", trial);
      const bool same = trace.iterates[k] == trace.iterates[k + 1];
      if (same) {
        if (std::abs(trace.objective_values[k + 1] - trace.objective_values[k]) >
            1e-12 * (1.0 + std::abs(trace.objective_values[k])))
          violate("objective stationarity", trial);
      } else if (!(trace.objective_values[k + 1] < trace.objective_values[k])) {
        violate("strict objective decrease", trial);
      }
    }
    const double bnorm = norm2(b);
    for (double rn : trace.residual_norms)
      if (rn > bnorm * (1.0 + 1e-10)) violate("residual bound", trial);
    if (!is_fixed_point(a, b, sol.x, lambda)) violate("final fixed point", trial);
  }
  report("criterion 7: property suite over 1000 seeded instances, zero violations",
         violations == 0,
         violations == 0 ? "" : std::to_string(violations) + " violations; first: " + first_violation);
}

// --- criterion 8: exhaustive oracle suite ---
void criterion_oracle_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240808);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<std::size_t> ndist(4, 10);
    const std::size_t n = ndist(rng);
    std::uniform_int_distribution<std::size_t> mdist(n, n + 8);
    const std::size_t m = mdist(rng);
    const DenseMatrix a_raw = random_matrix(rng, m, n);
    const DenseVector b_raw = random_vector(rng, m);
    const auto [an, bn] = normalized(a_raw, b_raw);
    std::uniform_real_distribution<double> ldist(0.05, 0.6);
    const double lambda = ldist(rng);

    const SparseSolution best = brute_force_global_min(an, bn, lambda);
    auto [sol, trace] = sindy_solve(an, bn, {.lambda = lambda});
    if (sol.objective < best.objective - 1e-10) ++violations;
    if (!check_global_min_conditions(an, bn, best.x, lambda, 1e-8)) ++violations;
    const DenseVector next = restricted_least_squares(an, bn, threshold_support(best.x, lambda));
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(next[j] - best.x[j]) > 1e-8) {
        ++violations;
        break;
      }
  }
  const double secs = ms_since(t0) / 1000.0;
  report("criterion 8: oracle suite (200 instances), dominance + certificates, < 60 s",
         violations == 0 && secs < 60.0,
         std::to_string(violations) + " violations, " + std::to_string(secs) + " s");
}

// --- criterion 9: ridge equivalence ---
void criterion_ridge_equivalence() {
  std::mt19937_64 rng(20240809);
  bool ok = true;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    std::uniform_int_distribution<std::size_t> ndist(4, 8);
    const std::size_t n = ndist(rng);
    std::uniform_int_distribution<std::size_t> mdist(n + 1, n + 9);
    const std::size_t m = mdist(rng);
    const DenseMatrix a = random_matrix(rng, m, n);
    const DenseVector b = random_vector(rng, m);
    std::uniform_real_distribution<double> ldist(0.05, 0.8), gdist(0.05, 1.0);
    const double lambda = ldist(rng), gamma = gdist(rng);
    auto [rsol, rtrace] = stridge_solve(a, b, {.lambda = lambda, .gamma = gamma});
    auto [psol, ptrace] =
        sindy_solve(ridge_augment_matrix(a, gamma), ridge_augment_rhs(b, n), {.lambda = lambda});
    if (rtrace.iterates.size() != ptrace.iterates.size()) ok = false;
    for (std::size_t k = 0; ok && k < rtrace.iterates.size(); ++k) {
      if (!(rtrace.iterates[k] == ptrace.iterates[k])) ok = false;           // bitwise
      if (!(rtrace.supports[k] == ptrace.supports[k])) ok = false;
      if (rtrace.objective_values[k] != ptrace.objective_values[k]) ok = false;
      if (rtrace.residual_norms[k] != ptrace.residual_norms[k]) ok = false;
    }
  }
  // Duplicated-column matrix with a real ridge terminates normally.
  DenseMatrix dup = DenseMatrix::from_rows({{1, 1, 0}, {2, 2, 1}, {-1, -1, 2}, {0.5, 0.5, -1}});
  bool dup_ok = true;
  try {
    auto [sol, trace] = stridge_solve(dup, DenseVector{1.0, -0.5, 2.0, 0.25}, {.lambda = 0.1, .gamma = 0.1});
    dup_ok = trace.converged;
  } catch (...) {
    dup_ok = false;
  }
  report("criterion 9: ridge trace equals the augmented plain trace exactly; duplicated column ok",
         ok && dup_ok, "");
}

// --- criterion 10: integrator order and closed-loop recovery ---
void criterion_integrator_and_closed_loop() {
  auto expo = custom_system("exp", 1, [](std::span<const double> u, std::span<double> du) {
    du[0] = u[0];
  });
  const double e1 = std::abs(rk4_integrate(expo, {1.0}, 0.1, 1.0).states(10, 0) - std::exp(1.0));
  const double e2 = std::abs(rk4_integrate(expo, {1.0}, 0.05, 1.0).states(20, 0) - std::exp(1.0));
  const double factor = e1 / e2;
  bool ok = factor >= 12.0 && factor <= 20.0;

  IdentifyOptions opt;
  opt.system = lorenz_system();
  opt.u0 = {-5.0, 10.0, 30.0};
  opt.h = 0.025;
  opt.t_end = 10.0;
  opt.dictionary = {.poly_order = 5};
  opt.params = {.lambda = 0.5};
  opt.analytic_derivatives = true;
  const IdentifyResult res = run_identify(opt);
  const auto truth = true_coefficients("lorenz", res.labels);
  for (std::size_t j = 0; j < res.labels.size(); ++j)
    for (std::size_t eq = 0; eq < 3; ++eq)
      if (std::abs(res.coefficients(j, eq) - (*truth)(j, eq)) > 1e-6) ok = false;
  report("criterion 10: RK4 halving factor in [12,20]; noise-free closed loop exact to 1e-6", ok,
         "factor " + std::to_string(factor));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_one_step();
  criterion_full_path();
  criterion_objective_table();
  criterion_noisy_case();
  criterion_lorenz_robustness();
  criterion_thomas_robustness();
  criterion_property_suite();
  criterion_oracle_suite();
  criterion_ridge_equivalence();
  criterion_integrator_and_closed_loop();
  std::printf("acceptance total: %.2f s, %d failing criterion(s)\n", ms_since(t0) / 1000.0,
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
