#pragma once

// Seeded random matrix ensembles.  Every draw is a pure function of its seed.

#include "wernerlab/spectral.hpp"
#include "wernerlab/tensorspace.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wernerlab {

enum class Field { real, complex };

inline std::string_view to_string(Field f) { return f == Field::real ? "real" : "complex"; }

inline Field parse_field(std::string_view s) {
  if (s == "real") return Field::real;
  if (s == "complex") return Field::complex;
  throw std::invalid_argument("unknown field '" + std::string(s) + "' (expected real|complex)");
}

enum class MatrixKind { ginibre, hermitian, psd, rank_r, density, structured_rank1_plus_normal };

inline MatrixKind parse_matrix_kind(std::string_view s) {
  if (s == "ginibre") return MatrixKind::ginibre;
  if (s == "hermitian") return MatrixKind::hermitian;
  if (s == "psd") return MatrixKind::psd;
  if (s == "rank_r" || s == "rank-r") return MatrixKind::rank_r;
  if (s == "density") return MatrixKind::density;
  if (s == "structured" || s == "structured_rank1_plus_normal") return MatrixKind::structured_rank1_plus_normal;
  throw std::invalid_argument("unknown matrix kind '" + std::string(s) + "'");
}

/// SplitMix64 finaliser.  Seeds for sub-streams are derive_seed(master, i),
/// i = 0, 1, 2, ... in a fixed order documented at each call site.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

/// Standard Gaussian entries; complex entries have E|z|^2 = 1.
inline Vector gaussian_vector(Eigen::Index n, Field field, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (field == Field::real) {
      v(i) = g(rng);
    } else {
      const double re = g(rng), im = g(rng);
      v(i) = cplx(re, im) / std::sqrt(2.0);
    }
  }
  return v;
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Field field, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) m.col(j) = gaussian_vector(rows, field, rng);
  return m;
}

/// Uniform phase on the unit circle (+/-1 over the reals).
inline cplx random_phase(Field field, Rng& rng) {
  if (field == Field::real) return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159265358979323846);
  return std::polar(1.0, u(rng));
}

namespace detail {

inline void orthogonalize_against(Vector& x, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) x -= (b.dot(x) / b.squaredNorm()) * b;
}

}  // namespace detail

/// C = |v_1><w_1| + sum_{i=2}^r eps_i |v_i><v_i| with orthogonal v_2..v_r,
/// unimodular eps_i, and v_1, w_1 orthogonal to every v_i (i >= 2).
inline Matrix structured_rank1_plus_normal(Eigen::Index total, int r, Field field, Rng& rng) {
  if (r < 1 || r > total)
    throw std::invalid_argument("structured ensemble needs r <= D");
  std::vector<Vector> normal_block;
  for (int i = 1; i < r; ++i) {
    Vector x = gaussian_vector(total, field, rng);
    detail::orthogonalize_against(x, normal_block);
    normal_block.push_back(x);
  }
  Vector v1 = gaussian_vector(total, field, rng);
  Vector w1 = gaussian_vector(total, field, rng);
  detail::orthogonalize_against(v1, normal_block);
  detail::orthogonalize_against(w1, normal_block);
  Matrix c = v1 * w1.adjoint();
  for (const auto& x : normal_block) c += random_phase(field, rng) * x * x.adjoint();
  return c;
}

/// One draw from the named ensemble.  `r` is the rank for psd, rank_r,
/// density and structured kinds (r <= 0 means full rank); ignored otherwise.
inline MultipartiteMatrix random_matrix(MatrixKind kind, const Dims& dims, int r, Field field, std::uint64_t seed) {
  const auto total = total_dimension(dims);
  const int rank = r <= 0 ? static_cast<int>(total) : r;
  if (rank > total) throw std::invalid_argument("rank " + std::to_string(rank) + " exceeds dimension " +
                                               std::to_string(total));
  Rng rng(seed);
  switch (kind) {
    case MatrixKind::ginibre:
      return {dims, gaussian_matrix(total, total, field, rng)};
    case MatrixKind::hermitian: {
      const Matrix g = gaussian_matrix(total, total, field, rng);
      return {dims, (g + g.adjoint()) / 2.0};
    }
    case MatrixKind::psd:
    case MatrixKind::density: {
      const Matrix g = gaussian_matrix(total, rank, field, rng);
      Matrix c = g * g.adjoint();
      c = (c + c.adjoint()) / 2.0;
      if (kind == MatrixKind::density) c /= c.trace().real();
      return {dims, c};
    }
    case MatrixKind::rank_r:
    case MatrixKind::structured_rank1_plus_normal: {
      // Redraw on the measure-zero event of a rank drop.
      for (int attempt = 0; attempt < 64; ++attempt) {
        Matrix c = kind == MatrixKind::rank_r
                       ? Matrix(gaussian_matrix(total, rank, field, rng) * gaussian_matrix(total, rank, field, rng).adjoint())
                       : structured_rank1_plus_normal(total, rank, field, rng);
        if (numerical_rank(c).numerical_rank == rank) return {dims, std::move(c)};
      }
      throw std::runtime_error("could not draw a matrix of the requested rank");
    }
  }
  throw std::invalid_argument("unknown matrix kind");
}

}  // namespace wernerlab
