#pragma once

// Dense operators on finite tensor products H_1 (x) ... (x) H_n.
//
// Basis convention: a basis index of the full space is the mixed-radix number
// (i_1, ..., i_n) with subsystem 0 the most significant digit, i.e. the same
// ordering Eigen's Kronecker products and numpy's reshape use.  Subsystems are
// numbered from 0 throughout the library.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wernerlab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<int>;

/// Largest total dimension any operator in the library may have.
inline constexpr Eigen::Index kDimensionCap = 4096;

/// Raised when a construction would exceed kDimensionCap.
class size_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

namespace detail {

inline std::string dims_to_string(const Dims& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

inline Eigen::Index checked_product(const Dims& dims, Eigen::Index cap = kDimensionCap) {
  if (dims.empty()) throw std::invalid_argument("dims must be non-empty");
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("subsystem dimension must be >= 1, got " + dims_to_string(dims));
    total *= d;
    if (total > cap)
      throw size_error("total dimension of " + dims_to_string(dims) + " exceeds cap " + std::to_string(cap));
  }
  return total;
}

/// Row-major strides: stride[k] = prod_{j>k} dims[j].
inline std::vector<Eigen::Index> strides(const Dims& dims) {
  std::vector<Eigen::Index> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

/// Offsets into the full index space obtained by enumerating the digits of
/// `systems` (first listed most significant), all other digits held at zero.
inline std::vector<Eigen::Index> radix_offsets(const Dims& dims, std::span<const int> systems) {
  const auto st = strides(dims);
  std::vector<Eigen::Index> out{0};
  for (int k : systems) {
    std::vector<Eigen::Index> next;
    next.reserve(out.size() * dims[k]);
    for (Eigen::Index base : out)
      for (int digit = 0; digit < dims[k]; ++digit) next.push_back(base + digit * st[k]);
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

/// A subset J of the subsystems {0, ..., n-1}.
class SubsystemSubset {
 public:
  static constexpr int kMaxSystems = 31;

  SubsystemSubset() = default;

  SubsystemSubset(int n, std::initializer_list<int> members) : SubsystemSubset(n, std::vector<int>(members)) {}

  SubsystemSubset(int n, const std::vector<int>& members) : n_(n) {
    check_n(n);
    for (int k : members) {
      if (k < 0 || k >= n)
        throw std::invalid_argument("subsystem index " + std::to_string(k) + " out of range for " +
                                    std::to_string(n) + " subsystems");
      mask_ |= 1u << k;
    }
  }

  static SubsystemSubset from_mask(int n, std::uint32_t mask) {
    check_n(n);
    if (n < 32 && (mask >> n) != 0) throw std::invalid_argument("subset mask has bits beyond subsystem count");
    SubsystemSubset s;
    s.n_ = n;
    s.mask_ = mask;
    return s;
  }
  static SubsystemSubset none(int n) { return from_mask(n, 0); }
  static SubsystemSubset all(int n) { return from_mask(n, full_mask(n)); }

  int total() const { return n_; }
  std::uint32_t mask() const { return mask_; }
  int size() const { return std::popcount(mask_); }
  bool empty() const { return mask_ == 0; }
  bool contains(int k) const { return k >= 0 && k < n_ && ((mask_ >> k) & 1u); }
  SubsystemSubset complement() const { return from_mask(n_, full_mask(n_) & ~mask_); }

  std::vector<int> members() const {
    std::vector<int> m;
    for (int k = 0; k < n_; ++k)
      if (contains(k)) m.push_back(k);
    return m;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int k : members()) {
      if (!first) s += ",";
      s += std::to_string(k + 1);
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(const SubsystemSubset&, const SubsystemSubset&) = default;
  friend auto operator<=>(const SubsystemSubset& a, const SubsystemSubset& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.mask_ <=> b.mask_;
  }

 private:
  static std::uint32_t full_mask(int n) { return n >= 32 ? ~0u : ((1u << n) - 1u); }
  static void check_n(int n) {
    if (n < 1 || n > kMaxSystems) throw std::invalid_argument("subsystem count must be in [1, 31]");
  }

  int n_ = 0;
  std::uint32_t mask_ = 0;
};

/// Square complex matrix on H_1 (x) ... (x) H_n, tagged with its subsystem dimensions.
class MultipartiteMatrix {
 public:
  MultipartiteMatrix(Dims dims, Matrix entries) : dims_(std::move(dims)), m_(std::move(entries)) {
    const auto total = detail::checked_product(dims_);
    if (m_.rows() != total || m_.cols() != total)
      throw std::invalid_argument("matrix of shape " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()) +
                                  " does not match dims " + detail::dims_to_string(dims_));
    if (!m_.allFinite()) throw std::invalid_argument("matrix entries must be finite");
  }

  static MultipartiteMatrix identity(const Dims& dims) {
    const auto total = detail::checked_product(dims);
    return {dims, Matrix::Identity(total, total)};
  }
  static MultipartiteMatrix zero(const Dims& dims) {
    const auto total = detail::checked_product(dims);
    return {dims, Matrix::Zero(total, total)};
  }
  /// |v><w| on the space with the given dims.
  static MultipartiteMatrix outer(const Dims& dims, const Vector& v, const Vector& w) {
    return {dims, v * w.adjoint()};
  }

  const Dims& dims() const { return dims_; }
  const Matrix& entries() const { return m_; }
  int subsystems() const { return static_cast<int>(dims_.size()); }
  Eigen::Index size() const { return m_.rows(); }
  cplx trace() const { return m_.trace(); }
  MultipartiteMatrix adjoint() const { return {dims_, m_.adjoint()}; }

  friend MultipartiteMatrix operator+(const MultipartiteMatrix& a, const MultipartiteMatrix& b) {
    require_same_dims(a, b);
    return {a.dims_, a.m_ + b.m_};
  }
  friend MultipartiteMatrix operator-(const MultipartiteMatrix& a, const MultipartiteMatrix& b) {
    require_same_dims(a, b);
    return {a.dims_, a.m_ - b.m_};
  }
  friend MultipartiteMatrix operator*(const MultipartiteMatrix& a, const MultipartiteMatrix& b) {
    require_same_dims(a, b);
    return {a.dims_, a.m_ * b.m_};
  }
  friend MultipartiteMatrix operator*(cplx s, const MultipartiteMatrix& a) { return {a.dims_, s * a.m_}; }

 private:
  static void require_same_dims(const MultipartiteMatrix& a, const MultipartiteMatrix& b) {
    if (a.dims_ != b.dims_)
      throw std::invalid_argument("dims mismatch: " + detail::dims_to_string(a.dims_) + " vs " +
                                  detail::dims_to_string(b.dims_));
  }

  Dims dims_;
  Matrix m_;
};

inline Eigen::Index total_dimension(const Dims& dims) { return detail::checked_product(dims); }

/// Kronecker product; dims concatenate.
inline MultipartiteMatrix kron(const MultipartiteMatrix& a, const MultipartiteMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  detail::checked_product(dims);
  const Matrix& A = a.entries();
  const Matrix& B = b.entries();
  const Eigen::Index nb = B.rows();
  Matrix out(A.rows() * nb, A.cols() * nb);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) out.block(i * nb, j * nb, nb, nb) = A(i, j) * B;
  return {std::move(dims), std::move(out)};
}

/// Kronecker product of vectors, same ordering as kron of matrices.
inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline void require_subset_for(const MultipartiteMatrix& c, const SubsystemSubset& j) {
  if (j.total() != c.subsystems())
    throw std::invalid_argument("subset over " + std::to_string(j.total()) + " subsystems applied to matrix with " +
                                std::to_string(c.subsystems()));
}

/// tr_J C.  The result lives on the complement of J; tracing every subsystem
/// yields the 1x1 matrix [tr C] with dims {1}.
inline MultipartiteMatrix partial_trace(const MultipartiteMatrix& c, const SubsystemSubset& traced) {
  require_subset_for(c, traced);
  if (traced.empty()) return c;
  const auto kept_systems = traced.complement().members();
  const auto traced_systems = traced.members();
  const auto kept = detail::radix_offsets(c.dims(), kept_systems);
  const auto summed = detail::radix_offsets(c.dims(), traced_systems);
  const Matrix& m = c.entries();
  const auto nk = static_cast<Eigen::Index>(kept.size());
  Matrix out = Matrix::Zero(nk, nk);
  for (Eigen::Index a = 0; a < nk; ++a)
    for (Eigen::Index b = 0; b < nk; ++b) {
      cplx acc{0.0, 0.0};
      for (Eigen::Index t : summed) acc += m(kept[a] + t, kept[b] + t);
      out(a, b) = acc;
    }
  Dims dims;
  for (int k : kept_systems) dims.push_back(c.dims()[k]);
  if (dims.empty()) dims.push_back(1);
  return {std::move(dims), std::move(out)};
}

/// Adjoint of the partial trace: places `m` (an operator on the complement of
/// J) into the full space with the identity on every subsystem of J.
inline MultipartiteMatrix extend_by_identity(const Matrix& m, const Dims& dims, const SubsystemSubset& identity_on) {
  const int n = static_cast<int>(dims.size());
  if (identity_on.total() != n) throw std::invalid_argument("subset does not match dims");
  const auto total = detail::checked_product(dims);
  const auto kept = detail::radix_offsets(dims, identity_on.complement().members());
  const auto diag = detail::radix_offsets(dims, identity_on.members());
  const auto nk = static_cast<Eigen::Index>(kept.size());
  if (m.rows() != nk || m.cols() != nk) throw std::invalid_argument("operator size does not match kept subsystems");
  Matrix out = Matrix::Zero(total, total);
  for (Eigen::Index a = 0; a < nk; ++a)
    for (Eigen::Index b = 0; b < nk; ++b)
      for (Eigen::Index t : diag) out(kept[a] + t, kept[b] + t) = m(a, b);
  return {dims, std::move(out)};
}

/// Transposes the tensor indices of the subsystems in J only.
inline MultipartiteMatrix partial_transpose(const MultipartiteMatrix& c, const SubsystemSubset& transposed) {
  require_subset_for(c, transposed);
  const auto rest = detail::radix_offsets(c.dims(), transposed.complement().members());
  const auto swp = detail::radix_offsets(c.dims(), transposed.members());
  const Matrix& m = c.entries();
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index a : rest)
    for (Eigen::Index b : rest)
      for (Eigen::Index s : swp)
        for (Eigen::Index t : swp) out(a + t, b + s) = m(a + s, b + t);
  return {c.dims(), std::move(out)};
}

namespace detail {

inline void check_permutation(std::span<const int> perm, std::size_t n) {
  if (perm.size() != n) throw std::invalid_argument("permutation length does not match subsystem count");
  std::vector<bool> seen(n, false);
  for (int k : perm) {
    if (k < 0 || static_cast<std::size_t>(k) >= n || seen[k]) throw std::invalid_argument("not a permutation");
    seen[k] = true;
  }
}

}  // namespace detail

/// Reorders tensor factors: subsystem k of the result is subsystem perm[k] of
/// the input.  Conjugation by the corresponding basis permutation.
inline MultipartiteMatrix permute_systems(const MultipartiteMatrix& c, std::span<const int> perm) {
  detail::check_permutation(perm, c.dims().size());
  const auto map = detail::radix_offsets(c.dims(), perm);
  Dims dims;
  for (int k : perm) dims.push_back(c.dims()[k]);
  const Matrix& m = c.entries();
  const auto total = static_cast<Eigen::Index>(map.size());
  Matrix out(total, total);
  for (Eigen::Index i = 0; i < total; ++i)
    for (Eigen::Index j = 0; j < total; ++j) out(i, j) = m(map[i], map[j]);
  return {std::move(dims), std::move(out)};
}

inline MultipartiteMatrix permute_systems(const MultipartiteMatrix& c, std::initializer_list<int> perm) {
  return permute_systems(c, std::span<const int>(perm.begin(), perm.size()));
}

/// Same reordering applied to a vector on the space with the given dims.
inline Vector permute_vector(const Vector& v, const Dims& dims, std::span<const int> perm) {
  detail::check_permutation(perm, dims.size());
  if (v.size() != detail::checked_product(dims)) throw std::invalid_argument("vector size does not match dims");
  const auto map = detail::radix_offsets(dims, perm);
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(map[i]);
  return out;
}

/// Swap operator F_ij exchanging tensor slots i and j (dims[i] == dims[j]).
inline MultipartiteMatrix flip_pair(const Dims& dims, int i, int j) {
  const int n = static_cast<int>(dims.size());
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("flip_pair index out of range");
  if (dims[i] != dims[j]) throw std::invalid_argument("flip_pair requires equal dimensions on the swapped slots");
  const auto total = detail::checked_product(dims);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[i], perm[j]);
  const auto map = detail::radix_offsets(dims, perm);
  Matrix out = Matrix::Zero(total, total);
  for (Eigen::Index x = 0; x < total; ++x) out(map[x], x) = 1.0;
  return {dims, std::move(out)};
}

/// Flip operator F on C^d (x) C^d: F(x (x) y) = y (x) x.
inline MultipartiteMatrix flip(int d) {
  if (d < 1) throw std::invalid_argument("flip dimension must be >= 1");
  return flip_pair({d, d}, 0, 1);
}

/// Embeds C as the block spanned by the leading basis vectors of each factor
/// of a larger space.  Zero elsewhere.
inline MultipartiteMatrix pad_embed(const MultipartiteMatrix& c, const Dims& target) {
  if (target.size() != c.dims().size()) throw std::invalid_argument("pad_embed target has wrong subsystem count");
  for (std::size_t k = 0; k < target.size(); ++k)
    if (target[k] < c.dims()[k]) throw std::invalid_argument("pad_embed cannot shrink a subsystem");
  const auto total = detail::checked_product(target);
  const auto tstride = detail::strides(target);
  const auto sstride = detail::strides(c.dims());
  const Eigen::Index src = c.size();
  std::vector<Eigen::Index> map(src);
  for (Eigen::Index x = 0; x < src; ++x) {
    Eigen::Index rem = x, y = 0;
    for (std::size_t k = 0; k < target.size(); ++k) {
      y += (rem / sstride[k]) * tstride[k];
      rem %= sstride[k];
    }
    map[x] = y;
  }
  Matrix out = Matrix::Zero(total, total);
  for (Eigen::Index i = 0; i < src; ++i)
    for (Eigen::Index j = 0; j < src; ++j) out(map[i], map[j]) = c.entries()(i, j);
  return {target, std::move(out)};
}

/// Standard basis vector e_k of C^d.
inline Vector basis_vector(Eigen::Index d, Eigen::Index k) {
  Vector e = Vector::Zero(d);
  e(k) = 1.0;
  return e;
}

}  // namespace wernerlab
