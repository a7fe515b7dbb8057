#pragma once

// Partial-trace quadratic forms
//
//   q_v(p, gamma, alpha, C) = sum_J alpha^|J| (-1)^(|J| + sum_{k in J} v_k) ||tr_J C||_p^gamma
//
// over all subsets J of the subsystems (tr_{} C = C, and the full trace enters
// through |tr C|), together with the operators and identities built from them:
// state-inversion operators, fermionic/bosonic creation and annihilation maps,
// the positivity polynomial and the rank-2 counterexample family.

#include "wernerlab/spectral.hpp"
#include "wernerlab/tensorspace.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wernerlab {

/// Selects one form q_v(p, gamma, alpha, .).
struct FormSpec {
  std::vector<int> v;  // one entry in {0,1} per subsystem; 1 = antisymmetric slot
  double p = 2.0;
  double gamma = 2.0;
  double alpha = 0.0;

  /// q^(n)(alpha, .): v = (1, ..., 1), p = gamma = 2.
  static FormSpec distillability(int n, double alpha) { return {std::vector<int>(n, 1), 2.0, 2.0, alpha}; }

  int subsystems() const { return static_cast<int>(v.size()); }

  void validate() const {
    if (v.empty()) throw std::invalid_argument("sign vector must be non-empty");
    for (int x : v)
      if (x != 0 && x != 1) throw std::invalid_argument("sign vector entries must be 0 or 1");
    if (std::isnan(p) || p < 1.0) throw std::invalid_argument("form requires p >= 1");
    if (!std::isfinite(gamma) || gamma < 1.0) throw std::invalid_argument("form requires gamma >= 1");
    if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
  }

  void validate_for(const Dims& dims) const {
    validate();
    if (v.size() != dims.size())
      throw std::invalid_argument("sign vector has length " + std::to_string(v.size()) + " but the matrix has " +
                                  std::to_string(dims.size()) + " subsystems");
  }

  /// Signed coefficient alpha^|J| (-1)^(|J| + sum_{k in J} v_k) of the J term.
  double coefficient(const SubsystemSubset& j) const {
    int parity = j.size();
    for (int k : j.members()) parity += v[k];
    const double mag = std::pow(alpha, j.size());
    return (parity % 2 == 0) ? mag : -mag;
  }

  /// True when no coefficient is negative, so q >= 0 holds trivially.
  bool trivially_nonnegative() const {
    const int n = subsystems();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
      if (coefficient(SubsystemSubset::from_mask(n, mask)) < 0.0) return false;
    return true;
  }
};

struct FormTerm {
  SubsystemSubset traced;
  double norm = 0.0;         // ||tr_J C||_p  (|tr C| for the full set)
  double coefficient = 0.0;  // signed coefficient from FormSpec::coefficient
  double contribution(double gamma) const { return coefficient * std::pow(norm, gamma); }
};

/// Every term of q_v, ordered by subset bitmask (the empty set first).
inline std::vector<FormTerm> q_form_breakdown(const FormSpec& spec, const MultipartiteMatrix& c) {
  spec.validate_for(c.dims());
  const int n = c.subsystems();
  std::vector<FormTerm> terms;
  terms.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto j = SubsystemSubset::from_mask(n, mask);
    terms.push_back({j, schatten_norm(partial_trace(c, j), spec.p), spec.coefficient(j)});
  }
  return terms;
}

inline double q_form(const FormSpec& spec, const MultipartiteMatrix& c) {
  double total = 0.0;
  for (const auto& t : q_form_breakdown(spec, c)) total += t.contribution(spec.gamma);
  return total;
}

/// q^(n)(alpha, C) with the Hilbert-Schmidt norm squared.
inline double q_distillability(double alpha, const MultipartiteMatrix& c) {
  return q_form(FormSpec::distillability(c.subsystems(), alpha), c);
}

// ---------------------------------------------------------------------------
// State-inversion operators

enum class InversionKind { bipartite_q, tripartite_q, tripartite_p, general };

struct InversionOperator {
  Vector base;
  int rank_parameter = 1;
  InversionKind kind = InversionKind::general;
  MultipartiteMatrix matrix;
  bool projected = false;
  bool degenerate = false;  // base vector was zero; every bound is vacuous
};

/// sum_J c_J (1_J (x) tr_J |a><a|) with c_J the coefficients of `spec`
/// (p and gamma are ignored).  For every x,
/// <x, O x> = sum_J c_J ||tr_{J^C} |a><x| ||_2^2.
inline MultipartiteMatrix inversion_matrix(const Vector& a, const Dims& dims, const FormSpec& spec) {
  spec.validate_for(dims);
  if (a.size() != total_dimension(dims)) throw std::invalid_argument("base vector does not match dims");
  const auto proj = MultipartiteMatrix::outer(dims, a, a);
  const int n = static_cast<int>(dims.size());
  Matrix acc = Matrix::Zero(a.size(), a.size());
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto j = SubsystemSubset::from_mask(n, mask);
    acc += spec.coefficient(j) * extend_by_identity(partial_trace(proj, j).entries(), dims, j).entries();
  }
  // Exact Hermitian symmetrisation removes rounding asymmetry.
  return {dims, (acc + acc.adjoint()) / 2.0};
}

/// P_{a-perp} M P_{a-perp}: compression onto ker(|a><a|).
inline MultipartiteMatrix project_out(const MultipartiteMatrix& m, const Vector& a) {
  const double nrm2 = a.squaredNorm();
  if (nrm2 == 0.0) return m;
  const Matrix p = Matrix::Identity(a.size(), a.size()) - a * a.adjoint() / nrm2;
  Matrix out = p * m.entries() * p;
  return {m.dims(), (out + out.adjoint()) / 2.0};
}

namespace detail {

inline InversionOperator make_inversion(const Vector& a, int r, const Dims& dims, std::vector<int> v, double alpha,
                                        InversionKind kind, bool projected) {
  if (r < 1) throw std::invalid_argument("rank parameter r must be >= 1");
  if (a.size() != total_dimension(dims)) throw std::invalid_argument("base vector does not match dims");
  InversionOperator op{a, r, kind, MultipartiteMatrix::zero(dims), projected, a.squaredNorm() == 0.0};
  if (op.degenerate) return op;
  op.matrix = inversion_matrix(a, dims, FormSpec{std::move(v), 2.0, 2.0, alpha});
  if (projected) op.matrix = project_out(op.matrix, a);
  return op;
}

}  // namespace detail

/// Q_a^r = |a><a| - (1/r)(1 (x) tr_1|a><a| + tr_2|a><a| (x) 1) + (1/r^2)||a||^2 1.
/// On ker(|a><a|) its spectrum lies in [-(1/r)(1-1/r)||a||^2, ||a||^2/r^2].
inline InversionOperator inversion_Q_bipartite(const Vector& a, int r, const Dims& dims, bool projected) {
  if (dims.size() != 2) throw std::invalid_argument("bipartite inversion needs two subsystems");
  return detail::make_inversion(a, r, dims, {1, 1}, -1.0 / r, InversionKind::bipartite_q, projected);
}

/// Tripartite Q_a^(3),r: alternating signs with powers of 1/r over all
/// marginals.  Projected, it is bounded above by (1/r^2)(1-1/r)||a||^2.
inline InversionOperator inversion_Q_tripartite(const Vector& a, int r, const Dims& dims, bool projected = false) {
  if (dims.size() != 3) throw std::invalid_argument("tripartite inversion needs three subsystems");
  return detail::make_inversion(a, r, dims, {1, 1, 1}, -1.0 / r, InversionKind::tripartite_q, projected);
}

/// P_a^(3),r, the operator of the q_(0,1,1) form at -1/r.  On ker(|a><a|) it
/// is bounded below by ((1-r^2)/r^3)||a||^2.
inline InversionOperator inversion_P_tripartite(const Vector& a, int r, const Dims& dims, bool projected = false) {
  if (dims.size() != 3) throw std::invalid_argument("tripartite inversion needs three subsystems");
  return detail::make_inversion(a, r, dims, {0, 1, 1}, -1.0 / r, InversionKind::tripartite_p, projected);
}

// ---------------------------------------------------------------------------
// Creation and annihilation maps on two copies of H

enum class Statistics { bosonic = +1, fermionic = -1 };

struct CreationAnnihilation {
  Matrix creation;      // a*_(+/-)(v): H -> H (x) H, shape D^2 x D
  Matrix annihilation;  // a_(+/-)(v) = creation^*, shape D x D^2
};

/// a*_(+/-)(v) w = (v (x) w +/- w (x) v) / sqrt(2).
inline CreationAnnihilation creation_annihilation(const Vector& v, Statistics stats) {
  const Eigen::Index d = v.size();
  const double sign = static_cast<double>(static_cast<int>(stats));
  Matrix cr = Matrix::Zero(d * d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Vector e = basis_vector(d, k);
    cr.col(k) = (kron(v, e) + sign * kron(e, v)) / std::sqrt(2.0);
  }
  Matrix an = cr.adjoint();
  return {std::move(cr), std::move(an)};
}

struct IdentityResiduals {
  double fermionic = 0.0;  // || 1 (x) tr_1|v><w| - tr_2|v><w| (x) 1 - a_-(w) F_24 a*_-(v) ||_inf
  double bosonic = 0.0;    // || 1 (x) tr_1|v><w| + tr_2|v><w| (x) 1 - a_+(w) F_24 a*_+(v) ||_inf
};

/// a_(+/-)(w) F_24 a*_(+/-)(v) as a D x D matrix, F_24 swapping the second
/// factor of each copy of H = H_1 (x) H_2.
inline Matrix exchange_composition(const Vector& v, const Vector& w, const Dims& dims, Statistics stats) {
  if (dims.size() != 2) throw std::invalid_argument("exchange composition needs a bipartite space");
  const auto f24 = flip_pair({dims[0], dims[1], dims[0], dims[1]}, 1, 3);
  return creation_annihilation(w, stats).annihilation * f24.entries() * creation_annihilation(v, stats).creation;
}

/// 1 (x) tr_1 C + sign * tr_2 C (x) 1 for bipartite C.
inline Matrix marginal_kronecker_sum(const MultipartiteMatrix& c, double sign) {
  if (c.subsystems() != 2) throw std::invalid_argument("marginal Kronecker sum needs a bipartite matrix");
  const auto& dims = c.dims();
  const Matrix left = extend_by_identity(partial_trace(c, {2, {0}}).entries(), dims, {2, {0}}).entries();
  const Matrix right = extend_by_identity(partial_trace(c, {2, {1}}).entries(), dims, {2, {1}}).entries();
  return left + sign * right;
}

inline IdentityResiduals fermionic_bosonic_identity_residual(const Vector& v, const Vector& w, const Dims& dims) {
  if (v.size() != total_dimension(dims) || w.size() != v.size())
    throw std::invalid_argument("vectors do not match dims");
  const auto c = MultipartiteMatrix::outer(dims, v, w);
  IdentityResiduals res;
  res.fermionic = operator_norm(marginal_kronecker_sum(c, -1.0) - exchange_composition(v, w, dims, Statistics::fermionic));
  res.bosonic = operator_norm(marginal_kronecker_sum(c, +1.0) - exchange_composition(v, w, dims, Statistics::bosonic));
  return res;
}

/// || 1 (x) tr_1 C - tr_2 C (x) 1 ||_inf, bounded by ||C||_1.
inline double kronecker_difference_norm(const MultipartiteMatrix& c) {
  return operator_norm(marginal_kronecker_sum(c, -1.0));
}

// ---------------------------------------------------------------------------
// Rank-1 forms as squared norms

/// sum_{k,j} (x) _m (v_k^m # w_j^m) on H_1 H_1 H_2 H_2 ... H_n H_n, where
/// v = sum_k v_k^1 (x) ... (x) v_k^n expands v over the standard basis of the
/// first n-1 factors (likewise w), and # is the antisymmetric product
/// x (x) y - y (x) x in slots with slots[m] = 1, the symmetric one otherwise.
/// Then q_slots(-1, |v><w|) = 2^-n ||result||^2.
inline Vector rank1_exchange_vector(const Vector& v, const Vector& w, const Dims& dims, const std::vector<int>& slots) {
  const auto total = total_dimension(dims);
  if (v.size() != total || w.size() != total) throw std::invalid_argument("vectors do not match dims");
  if (slots.size() != dims.size()) throw std::invalid_argument("slot vector does not match dims");
  const int n = static_cast<int>(dims.size());
  const Eigen::Index last = dims.back();
  const Eigen::Index terms = total / last;
  const auto factor = [&](const Vector& x, Eigen::Index k, int m) -> Vector {
    if (m == n - 1) return x.segment(k * last, last);
    Eigen::Index stride = terms;
    for (int i = 0; i <= m; ++i) stride /= dims[i];
    return basis_vector(dims[m], (k / stride) % dims[m]);
  };
  Vector out = Vector::Zero(total * total);
  for (Eigen::Index k = 0; k < terms; ++k)
    for (Eigen::Index j = 0; j < terms; ++j) {
      Vector term = Vector::Ones(1);
      for (int m = 0; m < n; ++m) {
        const Vector a = factor(v, k, m), b = factor(w, j, m);
        const double s = slots[m] ? -1.0 : 1.0;
        term = kron(term, Vector(kron(a, b) + s * kron(b, a)));
      }
      out += term;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Positivity polynomial p_r(x) with r = x.size()

/// sum_{i>j} (x_i - x_j)^2.
inline double positivity_polynomial(std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) acc += (x[i] - x[j]) * (x[i] - x[j]);
  return acc;
}

/// (r-1) sum_i x_i^2 - 2 sum_{i>j} x_i x_j; equal to positivity_polynomial.
inline double positivity_polynomial_expanded(std::span<const double> x) {
  const double r = static_cast<double>(x.size());
  double squares = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    squares += x[i] * x[i];
    for (std::size_t j = 0; j < i; ++j) cross += x[i] * x[j];
  }
  return (r - 1.0) * squares - 2.0 * cross;
}

// ---------------------------------------------------------------------------
// Rank-2 counterexample family for even n

struct AppendixCounterexample {
  MultipartiteMatrix matrix;
  double alpha = 0.0;        // -1/2 - eps
  double q_value = 0.0;      // q^(n)(alpha, C) through q_form
  double closed_form = 0.0;  // 2 sum_{k<n} binom(n,k) alpha^k
};

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

/// C = |e_0^{(x)n}><e_0^{(x)n}| - |e_1^{(x)n}><e_1^{(x)n}| on (C^d)^{(x)n}.
inline MultipartiteMatrix appendix_matrix(int n, int d) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("counterexample family is defined for even n >= 2");
  if (d < 2) throw std::invalid_argument("counterexample family needs d >= 2");
  const Dims dims(n, d);
  const auto total = total_dimension(dims);
  Eigen::Index idx1 = 0;
  for (int k = 0; k < n; ++k) idx1 = idx1 * d + 1;
  Matrix m = Matrix::Zero(total, total);
  m(0, 0) = 1.0;
  m(idx1, idx1) = -1.0;
  return {dims, std::move(m)};
}

inline AppendixCounterexample appendix_counterexample(int n, int d, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  auto c = appendix_matrix(n, d);
  const double alpha = -0.5 - eps;
  double closed = 0.0;
  for (int k = 0; k < n; ++k) closed += binomial(n, k) * std::pow(alpha, k);
  closed *= 2.0;
  const double q = q_distillability(alpha, c);
  return {std::move(c), alpha, q, closed};
}

// ---------------------------------------------------------------------------
// Alternating binomial sum in exact rational arithmetic

using Rational = boost::multiprecision::cpp_rational;

struct LemmaSides {
  Rational lhs;  // sum_{k=m}^{n-1} (-1)^k / 2^(k-m) binom(n,k) binom(k,m)
  Rational rhs;  // binom(n,m) (1/2)^(n-m) ((-1)^m - (-1)^n)
};

inline boost::multiprecision::cpp_int exact_binomial(int n, int k) {
  boost::multiprecision::cpp_int b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

inline LemmaSides lemma_a1_sum(int n, int m) {
  if (m < 0 || n < 1 || m >= n) throw std::invalid_argument("lemma sum requires 0 <= m < n");
  using boost::multiprecision::cpp_int;
  Rational lhs = 0;
  for (int k = m; k < n; ++k) {
    const cpp_int num = exact_binomial(n, k) * exact_binomial(k, m);
    const cpp_int den = cpp_int(1) << (k - m);
    Rational term(num, den);
    lhs += (k % 2 == 0) ? term : Rational(-term);
  }
  const int sign_diff = (m % 2 == 0 ? 1 : -1) - (n % 2 == 0 ? 1 : -1);
  Rational rhs(exact_binomial(n, m) * sign_diff, cpp_int(1) << (n - m));
  return {lhs, rhs};
}

}  // namespace wernerlab
