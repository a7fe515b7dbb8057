#pragma once

// JSON matrix files {"dims": [...], "re": [[...]], "im": [[...]]} and JSON
// renderings of search results.  Vectors are stored as one-column matrices.

#include "wernerlab/search.hpp"
#include "wernerlab/tensorspace.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wernerlab {

using json = nlohmann::json;

namespace detail {

inline json real_rows(const Matrix& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix parse_rows(const json& re, const json& im) {
  if (!re.is_array() || re.empty()) throw std::invalid_argument("matrix JSON: 're' must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = static_cast<Eigen::Index>(re.at(0).size());
  if (!im.is_null() && (!im.is_array() || static_cast<Eigen::Index>(im.size()) != rows))
    throw std::invalid_argument("matrix JSON: 'im' must have the same shape as 're'");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = re.at(i);
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols)
      throw std::invalid_argument("matrix JSON: ragged rows in 're'");
    for (Eigen::Index j = 0; j < cols; ++j) {
      double imag = 0.0;
      if (!im.is_null()) {
        const auto& ir = im.at(i);
        if (!ir.is_array() || static_cast<Eigen::Index>(ir.size()) != cols)
          throw std::invalid_argument("matrix JSON: ragged rows in 'im'");
        imag = ir.at(j).get<double>();
      }
      m(i, j) = cplx(r.at(j).get<double>(), imag);
    }
  }
  return m;
}

inline Dims parse_dims(const json& j) {
  if (!j.contains("dims")) throw std::invalid_argument("matrix JSON: missing 'dims'");
  return j.at("dims").get<Dims>();
}

}  // namespace detail

inline json to_json(const MultipartiteMatrix& c) {
  return {{"dims", c.dims()}, {"re", detail::real_rows(c.entries(), false)}, {"im", detail::real_rows(c.entries(), true)}};
}

inline json vector_to_json(const Vector& v, const Dims& dims) {
  return {{"dims", dims}, {"re", detail::real_rows(v, false)}, {"im", detail::real_rows(v, true)}};
}

inline MultipartiteMatrix matrix_from_json(const json& j) {
  try {
    if (!j.is_object()) throw std::invalid_argument("matrix JSON must be an object");
    return {detail::parse_dims(j), detail::parse_rows(j.at("re"), j.contains("im") ? j.at("im") : json())};
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed matrix JSON: ") + e.what());
  }
}

inline Vector vector_from_json(const json& j, Dims* dims_out = nullptr) {
  try {
    const Dims dims = detail::parse_dims(j);
    const Matrix m = detail::parse_rows(j.at("re"), j.contains("im") ? j.at("im") : json());
    if (m.cols() != 1) throw std::invalid_argument("vector JSON must be a single column");
    if (m.rows() != total_dimension(dims)) throw std::invalid_argument("vector JSON length does not match dims");
    if (dims_out) *dims_out = dims;
    return m.col(0);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed vector JSON: ") + e.what());
  }
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_json_text(ss.str());
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

inline MultipartiteMatrix load_matrix(const std::string& path) { return matrix_from_json(read_json_file(path)); }

inline void save_matrix(const MultipartiteMatrix& c, const std::string& path) { write_json_file(to_json(c), path); }

inline json to_json(const FormSpec& s) {
  return {{"v", s.v}, {"p", std::isinf(s.p) ? json("inf") : json(s.p)}, {"gamma", s.gamma}, {"alpha", s.alpha}};
}

inline json to_json(const SearchReport& r) {
  json factors = json::array();
  for (int i = 0; i < r.best_factorization.rank(); ++i)
    factors.push_back({{"v", vector_to_json(r.best_factorization.left[i], r.dims)},
                       {"w", vector_to_json(r.best_factorization.right[i], r.dims)}});
  json trace = json::array();
  for (const auto& s : r.alpha_trace) trace.push_back({{"alpha", s.alpha}, {"best_q", s.best_q}, {"violated", s.violated}});
  return {{"spec", to_json(r.spec)},
          {"dims", r.dims},
          {"rank", r.rank},
          {"field", std::string(to_string(r.field))},
          {"master_seed", r.master_seed},
          {"restarts", r.restarts},
          {"max_iters", r.max_iters},
          {"best_value", r.best_value},
          {"best_restart", r.best_restart},
          {"iterations", r.iterations},
          {"aborted_restarts", r.aborted_restarts},
          {"used_finite_differences", r.used_finite_differences},
          {"violation_threshold", kViolationThreshold},
          {"best_matrix", to_json(r.best_factorization.reconstruct(r.dims))},
          {"best_factorization", factors},
          {"alpha_trace", trace}};
}

inline json to_json(const AlphaEstimate& a) {
  json trace = json::array();
  for (const auto& s : a.trace) trace.push_back({{"alpha", s.alpha}, {"best_q", s.best_q}, {"violated", s.violated}});
  return {{"estimate", a.estimate},
          {"proven_lower", a.proven_lower ? json(*a.proven_lower) : json()},
          {"heuristic_upper_bound", a.heuristic_upper_bound},
          {"bisect_tol", a.bisect_tol},
          {"violation_threshold", kViolationThreshold},
          {"alpha_trace", trace}};
}

}  // namespace wernerlab
