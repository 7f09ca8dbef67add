#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sindy/dense.hpp"
#include "sindy/errors.hpp"

namespace sindy {

enum class TermKind { constant, monomial, sine, cosine };

/// One dictionary column: a monomial exponent pattern, optionally wrapped in
/// sin or cos. The constant term has an all-zero exponent vector.
struct TermLabel {
  TermKind kind = TermKind::constant;
  std::vector<unsigned> exponents;  // one entry per state component

  unsigned degree() const {
    unsigned d = 0;
    for (unsigned e : exponents) d += e;
    return d;
  }
  bool operator==(const TermLabel&) const = default;
};

/// Candidate-function blocks: polynomials up to poly_order, then sin and cos
/// applied elementwise to the monomial blocks up to sin_order / cos_order.
struct DictionarySpec {
  unsigned poly_order = 0;
  unsigned sin_order = 0;
  unsigned cos_order = 0;
  bool include_constant = true;
};

inline std::string to_string(const TermLabel& t) {
  std::string mono;
  for (std::size_t i = 0; i < t.exponents.size(); ++i) {
    const unsigned e = t.exponents[i];
    if (e == 0) continue;
    if (!mono.empty()) mono += "*";
    mono += "u" + std::to_string(i + 1);
    if (e > 1) mono += "^" + std::to_string(e);
  }
  switch (t.kind) {
    case TermKind::constant: return "1";
    case TermKind::monomial: return mono;
    case TermKind::sine: return "sin(" + mono + ")";
    case TermKind::cosine: return "cos(" + mono + ")";
  }
  return mono;
}

/// All exponent multi-indices of the given total degree over d variables, in
/// graded-lexicographic order with the first component dominating:
/// (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2) for d=3, degree 2.
inline std::vector<std::vector<unsigned>> monomial_exponents(std::size_t d, unsigned degree) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur(d, 0);
  auto rec = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
    if (pos + 1 == d) {
      cur[pos] = remaining;
      out.push_back(cur);
      return;
    }
    for (unsigned e = remaining; e != static_cast<unsigned>(-1); --e) {
      cur[pos] = e;
      self(self, pos + 1, remaining - e);
    }
  };
  rec(rec, 0, degree);
  return out;
}

inline std::size_t monomial_count(std::size_t d, unsigned degree) {
  // C(d + degree - 1, degree)
  std::size_t num = 1, den = 1;
  for (unsigned k = 1; k <= degree; ++k) {
    num *= d + k - 1;
    den *= k;
  }
  return num / den;
}

inline std::size_t dictionary_size(const DictionarySpec& spec, std::size_t d) {
  std::size_t n = spec.include_constant ? 1 : 0;
  for (unsigned k = 1; k <= spec.poly_order; ++k) n += monomial_count(d, k);
  for (unsigned k = 1; k <= spec.sin_order; ++k) n += monomial_count(d, k);
  for (unsigned k = 1; k <= spec.cos_order; ++k) n += monomial_count(d, k);
  return n;
}

inline double evaluate_term(const TermLabel& t, std::span<const double> state) {
  if (t.exponents.size() != state.size() && t.kind != TermKind::constant)
    throw DimensionError("evaluate_term: state dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < t.exponents.size(); ++i)
    for (unsigned e = 0; e < t.exponents[i]; ++e) v *= state[i];
  switch (t.kind) {
    case TermKind::constant: return 1.0;
    case TermKind::monomial: return v;
    case TermKind::sine: return std::sin(v);
    case TermKind::cosine: return std::cos(v);
  }
  return v;
}

/// All degree-homogeneous monomials of the state components, one column per
/// exponent pattern, evaluated row-wise.
inline std::pair<DenseMatrix, std::vector<TermLabel>> monomial_columns(const DenseMatrix& states,
                                                                       unsigned degree) {
  if (degree == 0) throw std::invalid_argument("monomial_columns: degree must be at least 1");
  const std::size_t rows = states.rows(), d = states.cols();
  const auto expos = monomial_exponents(d, degree);
  DenseMatrix block(rows, expos.size());
  std::vector<TermLabel> labels;
  labels.reserve(expos.size());
  for (std::size_t c = 0; c < expos.size(); ++c) {
    auto col = block.col(c);
    std::fill(col.begin(), col.end(), 1.0);
    for (std::size_t i = 0; i < d; ++i) {
      const unsigned e = expos[c][i];
      if (e == 0) continue;
      const auto sc = states.col(i);
      for (std::size_t r = 0; r < rows; ++r)
        for (unsigned rep = 0; rep < e; ++rep) col[r] *= sc[r];
    }
    labels.push_back(TermLabel{TermKind::monomial, expos[c]});
  }
  return {std::move(block), std::move(labels)};
}

/// Column layout: [1 | monomials deg 1..p1 | sin blocks deg 1..p2 | cos blocks
/// deg 1..p3], labels aligned with columns. Requires at least as many rows as
/// columns so the downstream solve is overdetermined.
inline std::pair<DenseMatrix, std::vector<TermLabel>> assemble_dictionary(const DenseMatrix& states,
                                                                          const DictionarySpec& spec) {
  const std::size_t rows = states.rows(), d = states.cols();
  const std::size_t n = dictionary_size(spec, d);
  if (n == 0) throw std::invalid_argument("assemble_dictionary: empty dictionary spec");
  if (rows < n)
    throw DimensionError("assemble_dictionary: " + std::to_string(rows) + " samples for " +
                         std::to_string(n) +
                         " columns; provide a longer series or a smaller dictionary");
  DenseMatrix a(rows, n);
  std::vector<TermLabel> labels;
  labels.reserve(n);
  std::size_t next = 0;
  if (spec.include_constant) {
    auto col = a.col(next++);
    std::fill(col.begin(), col.end(), 1.0);
    labels.push_back(TermLabel{TermKind::constant, std::vector<unsigned>(d, 0)});
  }
  auto append_block = [&](unsigned degree, TermKind kind) {
    auto [block, block_labels] = monomial_columns(states, degree);
    for (std::size_t c = 0; c < block.cols(); ++c) {
      auto src = block.col(c);
      auto dst = a.col(next++);
      switch (kind) {
        case TermKind::monomial:
          std::copy(src.begin(), src.end(), dst.begin());
          break;
        case TermKind::sine:
          for (std::size_t r = 0; r < rows; ++r) dst[r] = std::sin(src[r]);
          break;
        case TermKind::cosine:
          for (std::size_t r = 0; r < rows; ++r) dst[r] = std::cos(src[r]);
          break;
        case TermKind::constant:
          break;
      }
      labels.push_back(TermLabel{kind, block_labels[c].exponents});
    }
  };
  for (unsigned k = 1; k <= spec.poly_order; ++k) append_block(k, TermKind::monomial);
  for (unsigned k = 1; k <= spec.sin_order; ++k) append_block(k, TermKind::sine);
  for (unsigned k = 1; k <= spec.cos_order; ++k) append_block(k, TermKind::cosine);
  return {std::move(a), std::move(labels)};
}

/// Right-hand side of the identified model: one coefficient column per state
/// equation, evaluated exactly at the given state.
inline DenseVector evaluate_model(const DenseMatrix& coefficients, const std::vector<TermLabel>& labels,
                                  const DenseVector& state) {
  if (coefficients.rows() != labels.size())
    throw DimensionError("evaluate_model: coefficient rows != label count");
  DenseVector f(coefficients.cols(), 0.0);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const double tj = evaluate_term(labels[j], state);
    for (std::size_t eq = 0; eq < coefficients.cols(); ++eq) f[eq] += coefficients(j, eq) * tj;
  }
  return f;
}

}  // namespace sindy
