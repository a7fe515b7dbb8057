#pragma once

// Rank-constrained minimisation of q_v(p, gamma, alpha, .), bisection for the
// positivity boundary in alpha, and the (p, gamma) sweep.
//
// Matrices are parametrised as C = sum_{i<r} |v_i><w_i|.  The objective is
// q(C) / ||C||_2^gamma, which is scale free by gamma-homogeneity; the factors
// are rescaled to ||C||_2 = 1 after every accepted step.  Descent is plain
// gradient descent with Armijo backtracking over the real coordinates of all
// factors (real and imaginary parts separately in the complex field).

#include "wernerlab/ensembles.hpp"
#include "wernerlab/forms.hpp"
#include "wernerlab/spectral.hpp"
#include "wernerlab/tensorspace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wernerlab {

/// A form value below this counts as a violation of positivity.
inline constexpr double kViolationThreshold = -1e-9;

struct RankFactorization {
  std::vector<Vector> left;   // v_i
  std::vector<Vector> right;  // w_i
  Field field = Field::complex;

  int rank() const { return static_cast<int>(left.size()); }

  Matrix reconstruct() const {
    if (left.empty()) throw std::invalid_argument("empty factorization");
    Matrix c = Matrix::Zero(left.front().size(), left.front().size());
    for (std::size_t i = 0; i < left.size(); ++i) c += left[i] * right[i].adjoint();
    return c;
  }
  MultipartiteMatrix reconstruct(const Dims& dims) const { return {dims, reconstruct()}; }
};

struct SearchOptions {
  int restarts = 32;
  int max_iters = 400;
  std::uint64_t seed = 0;
  Field field = Field::complex;
  std::optional<double> stop_below;  // a restart ends as soon as its value drops below this
  unsigned threads = 0;              // 0: hardware concurrency
  double fd_step = 1e-6;             // central-difference step, relative to max(1, |theta|_inf)
};

struct AlphaStep {
  double alpha = 0.0;
  double best_q = 0.0;
  bool violated = false;
};

struct SearchReport {
  FormSpec spec;
  Dims dims;
  int rank = 1;
  Field field = Field::complex;
  std::uint64_t master_seed = 0;
  int restarts = 0;
  int max_iters = 0;
  double best_value = std::numeric_limits<double>::infinity();
  int best_restart = -1;
  RankFactorization best_factorization;
  std::vector<int> iterations;        // per restart
  std::vector<int> aborted_restarts;  // restarts that hit a NaN objective
  bool used_finite_differences = false;
  std::vector<AlphaStep> alpha_trace;
};

namespace detail {

/// q_v evaluation on raw matrices with the index tables of every partial
/// trace precomputed.  Used inside the optimiser only.
class FormObjective {
 public:
  FormObjective(const FormSpec& spec, const Dims& dims) : spec_(spec), dims_(dims) {
    spec_.validate_for(dims_);
    total_ = total_dimension(dims_);
    const int n = static_cast<int>(dims_.size());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const auto j = SubsystemSubset::from_mask(n, mask);
      Term t;
      t.coefficient = spec_.coefficient(j);
      t.kept = radix_offsets(dims_, j.complement().members());
      t.summed = radix_offsets(dims_, j.members());
      terms_.push_back(std::move(t));
    }
  }

  const FormSpec& spec() const { return spec_; }

  /// Unnormalised q(C).  `marginal_norms` receives ||tr_J C||_p per term.
  double value(const Matrix& c, std::vector<double>* marginal_norms = nullptr,
               std::vector<Matrix>* marginals = nullptr) const {
    double q = 0.0;
    if (marginal_norms) marginal_norms->clear();
    if (marginals) marginals->clear();
    for (const auto& t : terms_) {
      const Matrix x = marginal(c, t);
      const double nrm = spec_.p == 2.0 ? x.norm() : schatten_norm(x, spec_.p);
      q += t.coefficient * std::pow(nrm, spec_.gamma);
      if (marginal_norms) marginal_norms->push_back(nrm);
      if (marginals) marginals->push_back(x);
    }
    return q;
  }

  /// Gradient of the unnormalised q at C for p = 2 in the convention
  /// dq = Re tr(G^* dC).  Returns false where the form is not differentiable
  /// (a vanishing marginal raised to gamma < 2).
  bool gradient_p2(const Matrix& c, double& q, Matrix& grad) const {
    std::vector<double> norms;
    std::vector<Matrix> xs;
    q = value(c, &norms, &xs);
    grad = Matrix::Zero(total_, total_);
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const auto& t = terms_[k];
      if (t.coefficient == 0.0) continue;
      double scale;
      if (spec_.gamma == 2.0) {
        scale = 2.0;
      } else {
        if (norms[k] < 1e-8) return false;
        scale = spec_.gamma * std::pow(norms[k], spec_.gamma - 2.0);
      }
      const double w = t.coefficient * scale;
      const auto nk = static_cast<Eigen::Index>(t.kept.size());
      for (Eigen::Index a = 0; a < nk; ++a)
        for (Eigen::Index b = 0; b < nk; ++b) {
          const cplx g = w * xs[k](a, b);
          for (Eigen::Index s : t.summed) grad(t.kept[a] + s, t.kept[b] + s) += g;
        }
    }
    return true;
  }

 private:
  struct Term {
    double coefficient = 0.0;
    std::vector<Eigen::Index> kept;
    std::vector<Eigen::Index> summed;
  };

  static Matrix marginal(const Matrix& c, const Term& t) {
    const auto nk = static_cast<Eigen::Index>(t.kept.size());
    Matrix x(nk, nk);
    for (Eigen::Index a = 0; a < nk; ++a)
      for (Eigen::Index b = 0; b < nk; ++b) {
        cplx acc{0.0, 0.0};
        for (Eigen::Index s : t.summed) acc += c(t.kept[a] + s, t.kept[b] + s);
        x(a, b) = acc;
      }
    return x;
  }

  FormSpec spec_;
  Dims dims_;
  Eigen::Index total_ = 0;
  std::vector<Term> terms_;
};

/// Real coordinates of a factorization: for each i, v_i then w_i; complex
/// entries contribute (re, im) pairs.
class Parametrization {
 public:
  Parametrization(Eigen::Index total, int rank, Field field) : total_(total), rank_(rank), field_(field) {}

  Eigen::Index size() const { return 2 * rank_ * total_ * (field_ == Field::complex ? 2 : 1); }

  Eigen::VectorXd pack(const RankFactorization& f) const {
    Eigen::VectorXd theta(size());
    Eigen::Index pos = 0;
    for (int i = 0; i < rank_; ++i) {
      put(theta, pos, f.left[i]);
      put(theta, pos, f.right[i]);
    }
    return theta;
  }

  RankFactorization unpack(const Eigen::VectorXd& theta) const {
    RankFactorization f;
    f.field = field_;
    Eigen::Index pos = 0;
    for (int i = 0; i < rank_; ++i) {
      f.left.push_back(get(theta, pos));
      f.right.push_back(get(theta, pos));
    }
    return f;
  }

  Matrix reconstruct(const Eigen::VectorXd& theta) const { return unpack(theta).reconstruct(); }

  /// Chain rule from a matrix gradient G (dq = Re tr(G^* dC)) to theta.
  Eigen::VectorXd pull_back(const Eigen::VectorXd& theta, const Matrix& g) const {
    const auto f = unpack(theta);
    RankFactorization grad;
    for (int i = 0; i < rank_; ++i) {
      grad.left.push_back(g * f.right[i]);
      grad.right.push_back(g.adjoint() * f.left[i]);
    }
    return pack(grad);
  }

 private:
  void put(Eigen::VectorXd& theta, Eigen::Index& pos, const Vector& x) const {
    for (Eigen::Index k = 0; k < total_; ++k) {
      theta(pos++) = x(k).real();
      if (field_ == Field::complex) theta(pos++) = x(k).imag();
    }
  }
  Vector get(const Eigen::VectorXd& theta, Eigen::Index& pos) const {
    Vector x(total_);
    for (Eigen::Index k = 0; k < total_; ++k) {
      const double re = theta(pos++);
      const double im = field_ == Field::complex ? theta(pos++) : 0.0;
      x(k) = cplx(re, im);
    }
    return x;
  }

  Eigen::Index total_;
  int rank_;
  Field field_;
};

struct RestartOutcome {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd theta;
  int iterations = 0;
  bool aborted = false;
  bool used_finite_differences = false;
};

/// Scale-free objective q(C) / ||C||_2^gamma and its gradient in theta.
class NormalizedObjective {
 public:
  NormalizedObjective(const FormObjective& form, const Parametrization& param, double fd_step)
      : form_(form), param_(param), fd_step_(fd_step) {}

  double value(const Eigen::VectorXd& theta) const {
    const Matrix c = param_.reconstruct(theta);
    const double nrm = c.norm();
    if (!(nrm > 0.0)) return std::nan("");
    return form_.value(c) / std::pow(nrm, form_.spec().gamma);
  }

  /// Returns the value; fills grad.  Sets used_fd when central differences were needed.
  double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad, bool& used_fd) const {
    const Matrix c = param_.reconstruct(theta);
    const double nrm = c.norm();
    if (!(nrm > 0.0)) return std::nan("");
    const double gamma = form_.spec().gamma;
    if (form_.spec().p == 2.0) {
      double q;
      Matrix g;
      if (form_.gradient_p2(c, q, g)) {
        const double ng = std::pow(nrm, gamma);
        const Matrix gn = (g - (gamma * q / (nrm * nrm)) * c) / ng;
        grad = param_.pull_back(theta, gn);
        return q / ng;
      }
    }
    used_fd = true;
    return central_difference(theta, grad);
  }

  double central_difference(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const double h = fd_step_ * std::max(1.0, theta.cwiseAbs().maxCoeff());
    grad.resize(theta.size());
    Eigen::VectorXd probe = theta;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      const double keep = probe(k);
      probe(k) = keep + h;
      const double up = value(probe);
      probe(k) = keep - h;
      const double down = value(probe);
      probe(k) = keep;
      grad(k) = (up - down) / (2.0 * h);
    }
    return value(theta);
  }

 private:
  const FormObjective& form_;
  const Parametrization& param_;
  double fd_step_;
};

/// Rescales every factor by ||C||^{-1/2} so that ||C||_2 = 1.
inline void renormalize(Eigen::VectorXd& theta, const Parametrization& param) {
  const double nrm = param.reconstruct(theta).norm();
  if (nrm > 0.0 && std::isfinite(nrm)) theta /= std::sqrt(nrm);
}

inline RestartOutcome run_restart(const FormObjective& form, const Parametrization& param, const SearchOptions& opt,
                                  int rank, Eigen::Index total, std::uint64_t restart_seed) {
  Rng rng(restart_seed);
  RankFactorization init;
  init.field = opt.field;
  for (int i = 0; i < rank; ++i) {
    init.left.push_back(gaussian_vector(total, opt.field, rng));
    init.right.push_back(gaussian_vector(total, opt.field, rng));
  }
  RestartOutcome out;
  out.theta = param.pack(init);
  renormalize(out.theta, param);

  const NormalizedObjective obj(form, param, opt.fd_step);
  Eigen::VectorXd grad;
  double step = 1.0;
  int stalled = 0;
  double current = obj.value(out.theta);
  for (int it = 0; it < opt.max_iters; ++it) {
    if (std::isnan(current)) {
      out.aborted = true;
      break;
    }
    if (opt.stop_below && current < *opt.stop_below) break;
    current = obj.value_and_gradient(out.theta, grad, out.used_finite_differences);
    const double g2 = grad.squaredNorm();
    if (std::isnan(current) || !std::isfinite(g2)) {
      out.aborted = true;
      break;
    }
    if (g2 < 1e-26) break;
    double t = step;
    Eigen::VectorXd trial;
    double next = current;
    bool accepted = false;
    while (t > 1e-18) {
      trial = out.theta - t * grad;
      next = obj.value(trial);
      if (!std::isnan(next) && next <= current - 1e-4 * t * g2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    out.iterations = it + 1;
    if (!accepted) break;
    renormalize(trial, param);
    out.theta = std::move(trial);
    const double decrease = current - next;
    current = obj.value(out.theta);
    step = 2.0 * t;
    stalled = decrease < 1e-12 * (1.0 + std::abs(current)) ? stalled + 1 : 0;
    if (stalled >= 5) break;
  }
  out.value = current;
  return out;
}

}  // namespace detail

/// Minimises q_v(p, gamma, alpha, C) / ||C||_2^gamma over matrices of rank <= r.
/// Restart i starts from Gaussian factors drawn with derive_seed(seed, i).
/// Restarts run concurrently; the best is the minimum value, ties going to
/// the lower restart index, so the report depends only on the inputs.
inline SearchReport minimize_form(const FormSpec& spec, const Dims& dims, int rank, const SearchOptions& opt) {
  spec.validate_for(dims);
  const auto total = total_dimension(dims);
  if (rank < 1 || rank > total) throw std::invalid_argument("search rank must satisfy 1 <= r <= D");
  if (opt.restarts < 1) throw std::invalid_argument("search needs at least one restart");
  if (opt.max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");

  const detail::FormObjective form(spec, dims);
  const detail::Parametrization param(total, rank, opt.field);

  std::vector<detail::RestartOutcome> outcomes(opt.restarts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < opt.restarts; i = next++)
      outcomes[i] = detail::run_restart(form, param, opt, rank, total, derive_seed(opt.seed, static_cast<std::uint64_t>(i)));
  };
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(opt.restarts));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SearchReport rep;
  rep.spec = spec;
  rep.dims = dims;
  rep.rank = rank;
  rep.field = opt.field;
  rep.master_seed = opt.seed;
  rep.restarts = opt.restarts;
  rep.max_iters = opt.max_iters;
  for (int i = 0; i < opt.restarts; ++i) {
    const auto& o = outcomes[i];
    rep.iterations.push_back(o.iterations);
    rep.used_finite_differences = rep.used_finite_differences || o.used_finite_differences;
    if (o.aborted) {
      rep.aborted_restarts.push_back(i);
      continue;
    }
    if (o.value < rep.best_value) {
      rep.best_value = o.value;
      rep.best_restart = i;
    }
  }
  if (rep.best_restart < 0) throw std::runtime_error("every restart produced a NaN objective");
  Eigen::VectorXd theta = outcomes[rep.best_restart].theta;
  detail::renormalize(theta, param);
  rep.best_factorization = param.unpack(theta);
  // Report the value through the reference evaluation path.
  const auto best = rep.best_factorization.reconstruct(dims);
  rep.best_value = q_form(spec, best) / std::pow(schatten_norm(best, 2.0), spec.gamma);
  return rep;
}

struct AlphaEstimate {
  double estimate = 0.0;               // largest alpha magnitude with no violation found
  std::optional<double> proven_lower;  // 1/max d_i, known for (p, gamma) = (2, 2) only
  bool heuristic_upper_bound = true;   // the search may miss violations
  double bisect_tol = 0.0;
  std::vector<AlphaStep> trace;
};

/// Bisection on a in [0, 1]: a is violated when minimize_form finds a value
/// below kViolationThreshold at alpha = -a or alpha = +a.  Signs whose
/// coefficients are all non-negative are skipped (the form is then trivially
/// non-negative).  The k-th search call uses seed derive_seed(opt.seed, k).
inline AlphaEstimate alpha_opt_estimate(const std::vector<int>& v, double p, double gamma, int rank, const Dims& dims,
                                        double bisect_tol, SearchOptions opt) {
  if (!(bisect_tol > 0.0)) throw std::invalid_argument("bisect_tol must be positive");
  FormSpec spec{v, p, gamma, 0.0};
  spec.validate_for(dims);
  const std::uint64_t master = opt.seed;
  if (!opt.stop_below) opt.stop_below = kViolationThreshold;
  std::uint64_t calls = 0;
  AlphaEstimate out;
  out.bisect_tol = bisect_tol;
  if (p == 2.0 && gamma == 2.0) out.proven_lower = 1.0 / *std::max_element(dims.begin(), dims.end());

  auto violated = [&](double a) {
    bool any = false;
    for (double sign : {-1.0, 1.0}) {
      spec.alpha = sign * a;
      if (spec.trivially_nonnegative()) continue;
      opt.seed = derive_seed(master, calls++);
      const auto rep = minimize_form(spec, dims, rank, opt);
      const bool bad = rep.best_value < kViolationThreshold;
      out.trace.push_back({spec.alpha, rep.best_value, bad});
      if (bad) {
        any = true;
        break;
      }
    }
    return any;
  };

  double lo = 0.0, hi = 1.0;
  if (!violated(hi)) {
    out.estimate = hi;
    return out;
  }
  while (hi - lo > bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (violated(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.estimate = lo;
  return out;
}

struct SweepRow {
  double p = 2.0;
  double gamma = 2.0;
  double estimate = 0.0;
  std::optional<double> proven_lower;
  int rank = 1;
  Dims dims;
  Field field = Field::real;
  int restarts = 0;
  std::uint64_t seed = 0;
};

/// One alpha_opt_estimate per (p, gamma) cell, every cell with the same seed.
inline std::vector<SweepRow> sweep_grid(const std::vector<int>& v, const std::vector<double>& p_values,
                                        const std::vector<double>& gamma_values, int rank, const Dims& dims,
                                        double bisect_tol, const SearchOptions& opt) {
  if (p_values.empty() || gamma_values.empty()) throw std::invalid_argument("sweep grids must be non-empty");
  std::vector<SweepRow> rows;
  for (double p : p_values)
    for (double g : gamma_values) {
      const auto est = alpha_opt_estimate(v, p, g, rank, dims, bisect_tol, opt);
      rows.push_back({p, g, est.estimate, est.proven_lower, rank, dims, opt.field, opt.restarts, opt.seed});
    }
  return rows;
}

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string dims_label(const Dims& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(dims[i]);
  }
  return s;
}

inline constexpr const char* kSweepCsvHeader = "p,gamma,estimate,proven_lower,rank,dims,field,restarts,seed";

inline std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << format_number(r.p) << ',' << format_number(r.gamma) << ',' << format_number(r.estimate) << ','
       << (r.proven_lower ? format_number(*r.proven_lower) : std::string()) << ',' << r.rank << ','
       << dims_label(r.dims) << ',' << to_string(r.field) << ',' << r.restarts << ',' << r.seed << '\n';
  }
  return os.str();
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << format_sweep_csv(rows);
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace wernerlab
