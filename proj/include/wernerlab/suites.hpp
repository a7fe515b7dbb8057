#pragma once

// Seeded property suites over random ensembles.  Each check records a margin
// per trial and passes when every margin is at least its floor: inequalities
// record (right side - left side), equalities record minus the relative error.

#include "wernerlab/ensembles.hpp"
#include "wernerlab/forms.hpp"
#include "wernerlab/spectral.hpp"
#include "wernerlab/tensorspace.hpp"
#include "wernerlab/werner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wernerlab {

struct Check {
  std::string name;
  double floor = -1e-9;
  long trials = 0;
  long failures = 0;
  double worst = std::numeric_limits<double>::infinity();

  void record(double margin) {
    ++trials;
    if (!(margin >= floor)) ++failures;
    if (std::isnan(margin) || margin < worst) worst = margin;
  }
  bool passed() const { return trials > 0 && failures == 0; }
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
  }
  long failures() const {
    long f = 0;
    for (const auto& c : checks) f += c.failures;
    return f;
  }
  const Check& check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw std::out_of_range("no check named '" + name + "' in suite " + suite);
  }
};

struct SuiteOptions {
  int trials = 0;  // 0: the suite's own default
  std::uint64_t seed = 7;
  int n_max = 12;  // largest even n for lemma-a1
};

/// |a - b| / max(1, |a|, |b|).
inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

namespace detail {

class SuiteBuilder {
 public:
  explicit SuiteBuilder(std::string name) { result_.suite = std::move(name); }

  Check& check(const std::string& name, double floor) {
    for (auto& c : result_.checks)
      if (c.name == name) return c;
    result_.checks.push_back({name, floor});
    return result_.checks.back();
  }
  SuiteResult take() { return std::move(result_); }

 private:
  SuiteResult result_;
};

inline Vector unit_vector(Eigen::Index n, Field field, Rng& rng) {
  Vector v = gaussian_vector(n, field, rng);
  return v / v.norm();
}

inline MultipartiteMatrix unit_frobenius(const MultipartiteMatrix& c) {
  const double nrm = c.entries().norm();
  return nrm > 0.0 ? MultipartiteMatrix(c.dims(), c.entries() / nrm) : c;
}

inline double hs2(const MultipartiteMatrix& c) { return c.entries().squaredNorm(); }

inline double marginal2(const MultipartiteMatrix& c, std::initializer_list<int> traced) {
  return partial_trace(c, {c.subsystems(), traced}).entries().squaredNorm();
}

inline double trace2(const MultipartiteMatrix& c) { return std::norm(c.trace()); }

inline int trials_or(const SuiteOptions& o, int fallback) { return o.trials > 0 ? o.trials : fallback; }

inline const std::vector<Dims>& bipartite_dims() {
  static const std::vector<Dims> d{{2, 2}, {2, 3}, {3, 3}};
  return d;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline SuiteResult suite_rank1(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("rank1");
  const int trials = trials_or(o, 500);
  const std::vector<Dims> dims_cycle{{2, 2}, {2, 3}, {3, 3}, {3, 4}, {4, 4}};
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(o.seed, t));
    const Dims& dims = dims_cycle[t % dims_cycle.size()];
    const auto total = total_dimension(dims);
    const Vector v = unit_vector(total, Field::complex, rng);
    const Vector w = unit_vector(total, Field::complex, rng);
    const auto c = MultipartiteMatrix::outer(dims, v, w);
    const double q = q_distillability(-1.0, c);
    s.check("q2(-1,|v><w|) >= 0", -1e-9).record(q);

    const Vector x = rank1_exchange_vector(v, w, dims, {1, 1});
    s.check("q2(-1,|v><w|) = 1/4 ||sum wedge (x) wedge||^2", -1e-9).record(-relative_error(q, x.squaredNorm() / 4.0));

    const Dims doubled{dims[0], dims[1], dims[0], dims[1]};
    const Vector vw = kron(v, w);
    const Matrix one = Matrix::Identity(vw.size(), vw.size());
    const Matrix op = (one - flip_pair(doubled, 0, 2).entries()) * (one - flip_pair(doubled, 1, 3).entries());
    s.check("q2(-1,|v><w|) = <v(x)w,(1-F13)(1-F24)v(x)w>", -1e-10)
        .record(-relative_error(q, vw.dot(op * vw).real()));

    const Dims tri{2, 2, 2};
    const Vector a = unit_vector(8, Field::complex, rng), b = unit_vector(8, Field::complex, rng);
    const auto c3 = MultipartiteMatrix::outer(tri, a, b);
    const double q3 = q_distillability(-1.0, c3);
    s.check("q3(-1,|v><w|) >= 0 on [2,2,2]", -1e-9).record(q3);
    const Vector x3 = rank1_exchange_vector(a, b, tri, {1, 1, 1});
    s.check("q3(-1,|v><w|) = 1/8 ||sum wedge (x) wedge (x) wedge||^2", -1e-9)
        .record(-relative_error(q3, x3.squaredNorm() / 8.0));

    // |u><u| (x) |v><w| with v orthogonal to w.
    const int d = 2 + t % 3;
    const Vector u = unit_vector(d, Field::complex, rng);
    const Vector p = unit_vector(d, Field::complex, rng);
    Vector r = gaussian_vector(d, Field::complex, rng);
    r -= p.dot(r) * p;
    r /= r.norm();
    const auto ce = kron(MultipartiteMatrix::outer({d}, u, u), MultipartiteMatrix::outer({d}, p, r));
    for (double eps : {0.1, 0.01})
      s.check("q2(-1-eps,|u><u|(x)|v><w|) = -eps", -1e-12).record(-std::abs(q_distillability(-1.0 - eps, ce) + eps));
  }
  return s.take();
}

inline SuiteResult suite_cor33(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("cor33");
  const int trials = trials_or(o, 500);
  for (int t = 0; t < trials; ++t) {
    const int r = 1 + t % 4;
    const Dims& dims = bipartite_dims()[(t / 4) % 3];
    const auto c = unit_frobenius(random_matrix(MatrixKind::rank_r, dims, r, Field::complex, derive_seed(o.seed, t)));
    s.check("q2(-1/(2r),C) >= 0", -1e-9).record(q_distillability(-1.0 / (2.0 * r), c));
    Rng rng(derive_seed(o.seed ^ 0xC0u, t));
    const double alpha = -1.0 / (2.0 * r) + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    s.check("q2(alpha,C) >= 0 for alpha >= -1/(2r)", -1e-9).record(q_distillability(alpha, c));
  }
  return s.take();
}

inline SuiteResult suite_thm45(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("thm45");
  const int trials = trials_or(o, 500);
  const MatrixKind kinds[] = {MatrixKind::rank_r, MatrixKind::psd, MatrixKind::hermitian, MatrixKind::ginibre};
  for (int t = 0; t < trials; ++t) {
    const Dims& dims = bipartite_dims()[t % 3];
    const int d = std::max(dims[0], dims[1]);
    const int rank_hint = 1 + (t / 3) % 4;
    const MatrixKind kind = kinds[(t / 12) % 4];
    const auto c = unit_frobenius(random_matrix(kind, dims, rank_hint, Field::complex, derive_seed(o.seed, t)));
    const int r = numerical_rank(c).numerical_rank;
    const double m = std::min(r, d);
    const double n2 = hs2(c), t1 = marginal2(c, {0}), t2 = marginal2(c, {1}), tr = trace2(c);
    s.check("(1) |tr1|^2-|tr2|^2 <= min(r,d)|C|^2 - |trC|^2/min(r,d)", -1e-9)
        .record(m * n2 - tr / m - std::abs(t1 - t2));
    s.check("(2) |tr1|^2+|tr2|^2 <= d|C|^2 + |trC|^2/d", -1e-9).record(d * n2 + tr / d - (t1 + t2));

    Rng rng(derive_seed(o.seed ^ 0x45u, t));
    const int rs = 1 + t % 4;
    const auto cs = unit_frobenius({dims, structured_rank1_plus_normal(total_dimension(dims), rs, Field::complex, rng)});
    const int r3 = numerical_rank(cs).numerical_rank;
    const double sn2 = hs2(cs), s1 = marginal2(cs, {0}), s2 = marginal2(cs, {1}), st = trace2(cs);
    s.check("(3) rank-1 + normal: |tr1|^2+|tr2|^2 <= r|C|^2 + |trC|^2/r", -1e-9)
        .record(r3 * sn2 + st / r3 - (s1 + s2));
  }
  return s.take();
}

inline SuiteResult suite_tripartite(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("tripartite");
  const int trials = trials_or(o, 500);
  const std::vector<Dims> tri{{2, 2, 2}, {2, 2, 3}};
  for (int t = 0; t < trials; ++t) {
    const int r = 1 + t % 4;
    const Dims& dims = bipartite_dims()[(t / 4) % 3];
    const auto c = unit_frobenius(random_matrix(MatrixKind::psd, dims, r, Field::complex, derive_seed(o.seed, t)));
    s.check("PSD: |tr1 C|^2 >= |tr2 C|^2 / r", -1e-9).record(marginal2(c, {0}) - marginal2(c, {1}) / r);
    s.check("PSD: |tr2 C|^2 >= |tr1 C|^2 / r", -1e-9).record(marginal2(c, {1}) - marginal2(c, {0}) / r);

    const Dims& d3 = tri[(t / 4) % 2];
    const auto c3 = unit_frobenius(random_matrix(MatrixKind::psd, d3, r, Field::complex, derive_seed(o.seed ^ 0x3u, t)));
    s.check("PSD: q_(0,1,1)(-1/r,C) >= 0", -1e-9).record(q_form({{0, 1, 1}, 2.0, 2.0, -1.0 / r}, c3));
    s.check("PSD: q_(0,0,1)(-1/r,C) >= 0", -1e-9).record(q_form({{0, 0, 1}, 2.0, 2.0, -1.0 / r}, c3));

    Rng rng(derive_seed(o.seed ^ 0x33u, t));
    const Vector v1 = gaussian_vector(8, Field::complex, rng);
    Vector v2 = gaussian_vector(8, Field::complex, rng);
    v2 -= (v1.dot(v2) / v1.squaredNorm()) * v1;
    const Matrix h = v1 * v1.adjoint() - v2 * v2.adjoint();
    const auto ch = unit_frobenius({{2, 2, 2}, h});
    s.check("self-adjoint rank 2 (+,-): q3(-1/2,C) >= 0", -1e-9).record(q_distillability(-0.5, ch));
  }
  return s.take();
}

inline SuiteResult suite_spectral_bounds(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("spectral-bounds");
  const int trials = trials_or(o, 500);
  const std::vector<Dims> dims_cycle{{2, 2}, {3, 3}};
  const double ps[] = {1.0, 1.5, 2.0, 3.0, kOperatorNorm};
  for (int t = 0; t < trials; ++t) {
    const int r = 1 + t % 4;
    const Dims& dims = dims_cycle[(t / 4) % 2];
    const auto c = unit_frobenius(random_matrix(MatrixKind::rank_r, dims, r, Field::complex, derive_seed(o.seed, t)));
    const double n1 = schatten_norm(c, 1.0), n2 = schatten_norm(c, 2.0);
    s.check("|T|_2 <= |T|_1", -1e-10).record(n1 - n2);
    s.check("|T|_1 <= sqrt(r)|T|_2", -1e-10).record(std::sqrt(r) * n2 - n1);
    s.check("|T|_2^2 >= |trT|^2 / r", -1e-10).record(n2 * n2 - trace2(c) / r);
    s.check("Schatten-2 equals entrywise Frobenius", -1e-12).record(-relative_error(n2, c.entries().norm()));
    for (int i = 0; i < 2; ++i) {
      const auto m = partial_trace(c, {2, {i}});
      s.check("|tr_i T|_1 <= |T|_1", -1e-10).record(n1 - schatten_norm(m, 1.0));
      for (double p : ps) {
        const double expo = std::isinf(p) ? 1.0 : (p - 1.0) / p;
        const double np = schatten_norm(c, p), mp = schatten_norm(m, p);
        s.check("|tr_i C|_p <= d^((p-1)/p)|C|_p", -1e-10).record(std::pow(dims[i], expo) * np - mp);
        s.check("|tr_i C|_p <= r^((p-1)/p)|C|_p", -1e-10).record(std::pow(r, expo) * np - mp);
      }
    }
  }
  return s.take();
}

inline SuiteResult suite_creation_annihilation(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("creation-annihilation");
  const int trials = trials_or(o, 200);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(o.seed, t));
    const Dims& dims = bipartite_dims()[t % 3];
    const auto total = total_dimension(dims);
    const Vector v = gaussian_vector(total, Field::complex, rng);
    const Vector w = gaussian_vector(total, Field::complex, rng);
    const auto res = fermionic_bosonic_identity_residual(v, w, dims);
    s.check("fermionic exchange identity residual < 1e-10", -1e-10).record(-res.fermionic);
    s.check("bosonic exchange identity residual < 1e-10", -1e-10).record(-res.bosonic);

    const int d = 2 + t % 5;
    const Vector x = gaussian_vector(d, Field::complex, rng);
    const auto ca = creation_annihilation(x, Statistics::fermionic);
    s.check("|a*_-(v)|_inf = |v|", -1e-10).record(-relative_error(operator_norm(ca.creation), x.norm()));
    s.check("a*_-(v) v = 0", -1e-10).record(-(ca.creation * x).norm());
    s.check("a_-(v) = a*_-(v)^*", -1e-12).record(-(ca.annihilation - ca.creation.adjoint()).norm());

    const auto c = random_matrix(MatrixKind::rank_r, dims, 3, Field::complex, derive_seed(o.seed ^ 0xCAu, t));
    s.check("|1(x)tr1 C - tr2 C(x)1|_inf <= |C|_1", -1e-10).record(schatten_norm(c, 1.0) - kronecker_difference_norm(c));
    const auto c1 = MultipartiteMatrix::outer(dims, v, w);
    s.check("|1(x)tr1 |v><w| - tr2 |v><w|(x)1|_inf <= |v||w|", -1e-10)
        .record(v.norm() * w.norm() - kronecker_difference_norm(c1));
  }
  return s.take();
}

inline SuiteResult suite_operator_bounds(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("operator-bounds");
  const int trials = trials_or(o, 200);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(o.seed, t));
    const int r = 2 + t % 3;
    const Dims& dims = bipartite_dims()[(t / 3) % 3];
    const Vector a = gaussian_vector(total_dimension(dims), Field::complex, rng);
    const double a2 = a.squaredNorm();
    const auto q = inversion_Q_bipartite(a, r, dims, true);
    const auto ev = hermitian_eigenvalues(q.matrix.entries());
    s.check("Q~_a^r >= -(1/r)(1-1/r)|a|^2", -1e-9).record(ev.minCoeff() + (1.0 / r) * (1.0 - 1.0 / r) * a2);
    s.check("Q~_a^r <= |a|^2/r^2", -1e-9).record(a2 / (r * r) - ev.maxCoeff());
    s.check("Q~_a^r a = 0", -1e-10).record(-(q.matrix.entries() * a).norm());
    s.check("Q~_a^r Hermitian", -1e-12).record(-(q.matrix.entries() - q.matrix.entries().adjoint()).norm());

    const int r3 = 2 + t % 2;
    const Vector b = gaussian_vector(8, Field::complex, rng);
    const double b2 = b.squaredNorm();
    const auto q3 = inversion_Q_tripartite(b, r3, {2, 2, 2}, true);
    s.check("Q~_a^(3),r <= (1/r^2)(1-1/r)|a|^2", -1e-9)
        .record((1.0 / (r3 * r3)) * (1.0 - 1.0 / r3) * b2 - hermitian_eigenvalues(q3.matrix.entries()).maxCoeff());
    const auto p3 = inversion_P_tripartite(b, r3, {2, 2, 2}, true);
    s.check("P_a^(3),r >= ((1-r^2)/r^3)|a|^2 on ker|a><a|", -1e-9)
        .record(hermitian_eigenvalues(p3.matrix.entries()).minCoeff() - (1.0 - r3 * r3) / (r3 * r3 * r3) * b2);
    const auto p3raw = inversion_P_tripartite(b, r3, {2, 2, 2}, false);
    s.check("tripartite operators Hermitian", -1e-12)
        .record(-std::max((q3.matrix.entries() - q3.matrix.entries().adjoint()).norm(),
                          (p3raw.matrix.entries() - p3raw.matrix.entries().adjoint()).norm()));
  }
  return s.take();
}

inline SuiteResult suite_werner_equivalence(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("werner-equivalence");
  const int trials = trials_or(o, 200);
  const double alphas[] = {-0.8, -0.5, -0.3, 0.4};
  for (int t = 0; t < trials; ++t) {
    const int d = 2 + t % 2;
    const int n = 1 + (t / 2) % 2;
    const double alpha = alphas[(t / 4) % 4];
    const Dims dims(n, d);
    const int r = std::min<int>(1 + (t / 16) % 3, static_cast<int>(total_dimension(dims)));
    const auto c = unit_frobenius(random_matrix(MatrixKind::rank_r, dims, r, Field::complex, derive_seed(o.seed, t)));
    const auto eq = q_witness_equivalence(c, alpha);
    s.check("q^(n)(alpha,C) = (d^2+alpha d)^n <psi_C,(rho^T1)^(x)n psi_C>", -1e-9)
        .record(-relative_error(eq.q_value, eq.witness_value));
    const auto psi = psi_from_matrix(c);
    s.check("schmidt_rank(psi_C) = rank(C)", 0.0).record(schmidt_rank(psi) == r ? 0.0 : -1.0);
    s.check("|psi_C|^2 = |C|_2^2", -1e-12).record(-relative_error(psi.amplitudes().squaredNorm(), hs2(c)));

    Rng rng(derive_seed(o.seed ^ 0x1Du, t));
    const int dw = 2 + t % 3;
    const Vector amp = kron(gaussian_vector(dw, Field::complex, rng), gaussian_vector(dw, Field::complex, rng)) +
                       kron(gaussian_vector(dw, Field::complex, rng), gaussian_vector(dw, Field::complex, rng));
    const WitnessVector wv(amp / amp.norm(), dw, 1);
    s.check("Schmidt-rank-2 witness: <psi,rho_{-1/2}^T1 psi> >= 0", -1e-9).record(witness_value(wv, {dw, -0.5}));

    const int dm = 2 + t % 2;
    const auto cm = unit_frobenius(random_matrix(MatrixKind::rank_r, {dm, dm}, 1 + t % 2, Field::complex,
                                                 derive_seed(o.seed ^ 0x46u, t)));
    const auto mixed = mixed_sign_witness(cm);
    s.check("<psi_C,(rho_{1/2}(x)rho_{-1/2})^T1 psi_C> >= 0", -1e-9).record(mixed.plus_minus);
    s.check("<psi_C,(rho_{-1/2}(x)rho_{1/2})^T1 psi_C> >= 0", -1e-9).record(mixed.minus_plus);
    s.check("mixed-sign witnesses are multiples of q_(0,1), q_(1,0)", -1e-9)
        .record(-std::max(relative_error(mixed.plus_minus * mixed.scale, mixed.q01),
                          relative_error(mixed.minus_plus * mixed.scale, mixed.q10)));
  }
  // A traceful rank-2 projector is violated just below -1/2.
  for (int d : {2, 3, 4}) {
    Matrix p = Matrix::Zero(d, d);
    p(0, 0) = p(1, 1) = 1.0;
    const auto psi = psi_from_matrix({{d}, p});
    s.check("rank-2 projector witness negative at alpha = -0.55", 0.0).record(witness_value(psi, {d, -0.55}) < 0.0 ? 0.0 : -1.0);
    s.check("rank-2 projector witness has Schmidt rank 2", 0.0).record(schmidt_rank(psi) == 2 ? 0.0 : -1.0);
  }
  return s.take();
}

inline SuiteResult suite_appendix(const SuiteOptions&) {
  detail::SuiteBuilder s("appendix");
  for (int n : {2, 4})
    for (int d : {2, 3})
      for (double eps : {0.1, 0.01}) {
        const auto ce = appendix_counterexample(n, d, eps);
        s.check("q^(n)(-1/2-eps,C) = 2 sum_k binom(n,k) alpha^k", -1e-10)
            .record(-relative_error(ce.q_value, ce.closed_form));
        const double anchor = n == 2 ? -4.0 * eps : -2.0 * eps - 8.0 * eps * eps * eps;
        s.check("q = -4eps (n=2), -2eps-8eps^3 (n=4)", -1e-10).record(-relative_error(ce.q_value, anchor));
        s.check("q < 0", 0.0).record(ce.q_value < 0.0 ? 0.0 : -1.0);
      }
  double prev = -std::numeric_limits<double>::infinity();
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const double q = appendix_counterexample(2, 2, eps).q_value;
    s.check("q -> 0- as eps -> 0+", 0.0).record(q < 0.0 && q > prev ? 0.0 : -1.0);
    prev = q;
  }
  return s.take();
}

inline SuiteResult suite_lemma_a1(const SuiteOptions& o) {
  detail::SuiteBuilder s("lemma-a1");
  for (int n = 2; n <= o.n_max; n += 2)
    for (int m = 0; m < n; ++m) {
      const auto sides = lemma_a1_sum(n, m);
      s.check("lhs = rhs exactly", 0.0).record(sides.lhs == sides.rhs ? 0.0 : -1.0);
      if (m % 2 == 0)
        s.check("zero for even m", 0.0).record(sides.lhs == 0 ? 0.0 : -1.0);
      else
        s.check("negative for odd m", 0.0).record(sides.lhs < 0 ? 0.0 : -1.0);
    }
  return s.take();
}

inline SuiteResult suite_dimension_bound(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("dimension-bound");
  const int trials = trials_or(o, 500);
  for (int t = 0; t < trials; ++t) {
    const Dims& dims = bipartite_dims()[t % 3];
    const int d = std::max(dims[0], dims[1]);
    const auto c = unit_frobenius(random_matrix(MatrixKind::ginibre, dims, 0, Field::complex, derive_seed(o.seed, t)));
    for (int mask = 0; mask < 4; ++mask)
      for (double sign : {-1.0, 1.0})
        s.check("q_v(+-1/d,C) >= 0, v in {0,1}^2", -1e-9)
            .record(q_form({{mask >> 1 & 1, mask & 1}, 2.0, 2.0, sign / d}, c));

    const double n2 = hs2(c), t1 = marginal2(c, {0}), t2 = marginal2(c, {1}), tr = trace2(c);
    const double q10 = q_form({{1, 0}, 2.0, 2.0, -1.0 / d}, c);
    const double split = (n2 - t1 / d) + (t2 - tr / d) / d;
    s.check("q_(1,0)(-1/d,C) = q^H1(C) + (1/d) q^H1(tr2 C)", -1e-10).record(-relative_error(q10, split));

    if (dims == Dims{2, 3}) {
      const auto padded = pad_embed(c, {3, 3});
      for (int mask = 0; mask < 4; ++mask) {
        const FormSpec spec{{mask >> 1 & 1, mask & 1}, 2.0, 2.0, -0.4};
        s.check("q_v(pad_embed(C)) = q_v(C)", -1e-10).record(-relative_error(q_form(spec, padded), q_form(spec, c)));
      }
    }
  }
  return s.take();
}

inline SuiteResult suite_tsallis(const SuiteOptions& o) {
  using namespace detail;
  detail::SuiteBuilder s("tsallis");
  const int trials = trials_or(o, 500);
  const std::pair<double, double> pg[] = {{1.5, 1.0}, {1.5, 1.5}, {2.0, 1.0}, {2.0, 2.0}, {3.0, 1.0}, {3.0, 3.0}};
  for (int t = 0; t < trials; ++t) {
    const Dims& dims = bipartite_dims()[t % 3];
    const int r = 1 + (t / 3) % static_cast<int>(total_dimension(dims));
    const auto rho = random_matrix(MatrixKind::density, dims, r, Field::complex, derive_seed(o.seed, t));
    for (const auto& [p, g] : pg)
      s.check("|rho|_p^g - |tr1 rho|_p^g - |tr2 rho|_p^g + 1 >= 0", -1e-9)
          .record(q_form({{1, 1}, p, g, -1.0}, rho));
  }
  return s.take();
}

inline SuiteResult suite_werner_spectra(const SuiteOptions&) {
  detail::SuiteBuilder s("werner-spectra");
  for (int d = 2; d <= 5; ++d) {
    double lo = -1.0, hi = 0.0;  // negative at lo, non-negative at hi
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      (werner_ppt_min_eigenvalue({d, mid}) < 0.0 ? lo : hi) = mid;
    }
    s.check("PPT boundary at alpha = -1/d", -1e-9).record(-std::abs(0.5 * (lo + hi) + 1.0 / d));
    s.check("min eig rho^T1 at -1/d is 0", -1e-10).record(-std::abs(werner_ppt_min_eigenvalue({d, -1.0 / d})));

    for (double alpha : {-0.9, -0.3, 0.25, 0.8}) {
      const WernerParams wp{d, alpha};
      const auto rho = werner_state(wp);
      const auto ev = hermitian_eigenvalues(rho.entries());
      const double sym = (1.0 + alpha) / wp.normalization(), anti = (1.0 - alpha) / wp.normalization();
      int n_sym = 0, n_anti = 0;
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i) - sym) < 1e-10) ++n_sym;
        if (std::abs(ev(i) - anti) < 1e-10) ++n_anti;
      }
      s.check("multiplicities d(d+1)/2 and d(d-1)/2", 0.0)
          .record(n_sym == d * (d + 1) / 2 && n_anti == d * (d - 1) / 2 ? 0.0 : -1.0);
      s.check("tr rho = 1", -1e-12).record(-std::abs(rho.trace().real() - 1.0));
      const auto pt = partial_transpose(rho, {2, {0}});
      s.check("analytic rho^T1 equals partial_transpose(rho)", -1e-12)
          .record(-(pt.entries() - werner_partial_transpose(wp).entries()).cwiseAbs().maxCoeff());
      s.check("min eig rho^T1 < 0 iff alpha < -1/d", 0.0)
          .record((werner_ppt_min_eigenvalue(wp) < -1e-10) == (alpha < -1.0 / d) ? 0.0 : -1.0);
    }
  }
  return s.take();
}

// ---------------------------------------------------------------------------

using SuiteFn = SuiteResult (*)(const SuiteOptions&);

inline const std::map<std::string, SuiteFn>& suite_registry() {
  static const std::map<std::string, SuiteFn> reg{
      {"rank1", suite_rank1},
      {"cor33", suite_cor33},
      {"thm45", suite_thm45},
      {"tripartite", suite_tripartite},
      {"spectral-bounds", suite_spectral_bounds},
      {"creation-annihilation", suite_creation_annihilation},
      {"operator-bounds", suite_operator_bounds},
      {"werner-equivalence", suite_werner_equivalence},
      {"werner-spectra", suite_werner_spectra},
      {"appendix", suite_appendix},
      {"lemma-a1", suite_lemma_a1},
      {"dimension-bound", suite_dimension_bound},
      {"tsallis", suite_tsallis},
  };
  return reg;
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [k, _] : suite_registry()) names.push_back(k);
  return names;
}

/// Runs one named suite, or every suite for "all".
inline std::vector<SuiteResult> run_suites(const std::string& name, const SuiteOptions& opts) {
  const auto& reg = suite_registry();
  std::vector<SuiteResult> out;
  if (name == "all") {
    for (const auto& [k, fn] : reg) out.push_back(fn(opts));
    return out;
  }
  const auto it = reg.find(name);
  if (it == reg.end()) throw std::invalid_argument("unknown suite '" + name + "'");
  out.push_back(it->second(opts));
  return out;
}

}  // namespace wernerlab
