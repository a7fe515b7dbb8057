#include "test_support.hpp"

#include "wernerlab/search.hpp"
#include "wernerlab/werner.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace wltest;

namespace {

SearchOptions quick(std::uint64_t seed, int restarts = 8, int iters = 200) {
  SearchOptions o;
  o.seed = seed;
  o.restarts = restarts;
  o.max_iters = iters;
  o.threads = 1;
  return o;
}

void check_gradient(const FormSpec& spec, const Dims& dims, int rank, Field field) {
  const detail::FormObjective form(spec, dims);
  const detail::Parametrization param(total_dimension(dims), rank, field);
  const detail::NormalizedObjective obj(form, param, 1e-6);
  Rng rng(derive_seed(17, static_cast<std::uint64_t>(rank)));
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd theta(param.size());
    for (auto& x : theta) x = g(rng);
    Eigen::VectorXd analytic, numeric;
    bool fd = false;
    const double v1 = obj.value_and_gradient(theta, analytic, fd);
    ASSERT_FALSE(fd);
    const double v2 = obj.central_difference(theta, numeric);
    EXPECT_TRUE(RelNear(v1, v2, 1e-13));
    const double err = (analytic - numeric).norm() / std::max(1.0, numeric.norm());
    EXPECT_LT(err, 1e-5) << "trial " << t;
  }
}

}  // namespace

TEST(Gradient, AnalyticMatchesCentralDifferences) {
  check_gradient(FormSpec::distillability(2, -0.45), {2, 2}, 2, Field::complex);
  check_gradient({{0, 1}, 2.0, 2.0, 0.3}, {2, 3}, 1, Field::real);
  check_gradient({{1, 1, 1}, 2.0, 2.0, -0.5}, {2, 2, 2}, 2, Field::complex);
  check_gradient({{1, 1}, 2.0, 3.0, -0.4}, {2, 2}, 2, Field::complex);
  check_gradient({{1, 1}, 2.0, 1.5, -0.4}, {2, 2}, 3, Field::real);
}

TEST(Search, BestValueIsReproducedByReferencePath) {
  const auto spec = FormSpec::distillability(2, -0.45);
  const auto rep = minimize_form(spec, {2, 2}, 2, quick(3));
  const auto c = rep.best_factorization.reconstruct(rep.dims);
  EXPECT_NEAR(rep.best_value, q_form(spec, c) / std::pow(schatten_norm(c, 2.0), 2.0), 1e-9);
  EXPECT_NEAR(schatten_norm(c, 2.0), 1.0, 1e-9);
  EXPECT_EQ(rep.iterations.size(), 8u);
  EXPECT_GE(rep.best_restart, 0);
}

TEST(Search, PositiveRegionStaysNonnegative) {
  const auto rep = minimize_form(FormSpec::distillability(2, -0.45), {2, 2}, 2, quick(4));
  EXPECT_GE(rep.best_value, kViolationThreshold);
}

TEST(Search, FindsViolationBeyondOneHalf) {
  const auto spec = FormSpec::distillability(2, -0.55);
  SearchOptions o = quick(1, 32, 400);
  o.field = Field::real;
  const auto rep = minimize_form(spec, {2, 2}, 2, o);
  EXPECT_LT(rep.best_value, 0.0);
  // Re-verify through the partial-trace form and the witness side.
  const auto c = rep.best_factorization.reconstruct(rep.dims);
  EXPECT_LT(q_distillability(-0.55, c), kViolationThreshold);
  const auto eq = q_witness_equivalence(c, -0.55);
  EXPECT_TRUE(RelNear(eq.q_value, eq.witness_value, 1e-9));
  EXPECT_LE(schmidt_rank(psi_from_matrix(c)), 2);
  // Independent certificate at the same alpha.
  EXPECT_NEAR(appendix_counterexample(2, 2, 0.05).q_value, -0.2, 1e-12);
}

TEST(Search, SinglePartyBoundary) {
  // For n = 1, q(-1/r, C) = ||C||^2 - |tr C|^2 / r >= 0 on rank r.
  const int r = 2;
  const auto rep = minimize_form({{1}, 2.0, 2.0, -1.0 / r}, {4}, r, quick(5));
  EXPECT_GE(rep.best_value, -1e-9);
  EXPECT_LT(rep.best_value, 1e-3);
}

TEST(Search, Deterministic) {
  const auto spec = FormSpec::distillability(2, -0.5);
  SearchOptions a = quick(11), b = quick(11);
  b.threads = 4;
  const auto r1 = minimize_form(spec, {2, 2}, 2, a);
  const auto r2 = minimize_form(spec, {2, 2}, 2, b);
  EXPECT_EQ(r1.best_value, r2.best_value);
  EXPECT_EQ(r1.best_restart, r2.best_restart);
  EXPECT_EQ(r1.iterations, r2.iterations);
  EXPECT_EQ(r1.best_factorization.reconstruct(), r2.best_factorization.reconstruct());
}

TEST(Search, MoreRestartsNeverWorse) {
  const auto spec = FormSpec::distillability(2, -0.5);
  const auto few = minimize_form(spec, {2, 2}, 2, quick(21, 8, 100));
  const auto many = minimize_form(spec, {2, 2}, 2, quick(21, 64, 100));
  EXPECT_LE(many.best_value, few.best_value + 1e-12);
}

TEST(Search, FiniteDifferencesForGeneralP) {
  const auto rep = minimize_form({{1, 1}, 3.0, 2.0, -0.2}, {2, 2}, 1, quick(2, 2, 20));
  EXPECT_TRUE(rep.used_finite_differences);
  const auto rep2 = minimize_form(FormSpec::distillability(2, -0.2), {2, 2}, 1, quick(2, 2, 20));
  EXPECT_FALSE(rep2.used_finite_differences);
}

TEST(Search, Errors) {
  const auto spec = FormSpec::distillability(2, -0.5);
  EXPECT_THROW(minimize_form(spec, {2, 2}, 0, quick(1)), std::invalid_argument);
  EXPECT_THROW(minimize_form(spec, {2, 2}, 5, quick(1)), std::invalid_argument);
  EXPECT_THROW(minimize_form(spec, {2, 2}, 1, quick(1, 0)), std::invalid_argument);
  EXPECT_THROW(minimize_form(spec, {2, 2, 2}, 1, quick(1)), std::invalid_argument);
  EXPECT_THROW(alpha_opt_estimate({1, 1}, 2, 2, 1, {2, 2}, 0.0, quick(1)), std::invalid_argument);
}

TEST(AlphaEstimate, RankOne) {
  const auto est = alpha_opt_estimate({1, 1}, 2.0, 2.0, 1, {2, 2}, 0.01, quick(1));
  EXPECT_GE(est.estimate, 0.99);
  EXPECT_LE(est.estimate, 1.0);
  ASSERT_TRUE(est.proven_lower.has_value());
  EXPECT_GE(est.estimate + est.bisect_tol, *est.proven_lower);
}

TEST(AlphaEstimate, RankTwoReal) {
  SearchOptions o = quick(1);
  o.field = Field::real;
  const auto est = alpha_opt_estimate({1, 1}, 2.0, 2.0, 2, {2, 2}, 0.01, o);
  EXPECT_GE(est.estimate, 0.49);
  EXPECT_LE(est.estimate, 0.51);
  EXPECT_DOUBLE_EQ(*est.proven_lower, 0.5);
  EXPECT_GE(est.estimate + est.bisect_tol, *est.proven_lower);
  ASSERT_FALSE(est.trace.empty());
  EXPECT_TRUE(est.trace.front().violated);
  for (const auto& s : est.trace)
    if (s.violated) EXPECT_LT(s.best_q, kViolationThreshold);
}

TEST(AlphaEstimate, NoProvenBoundOffTwoTwo) {
  const auto est = alpha_opt_estimate({1, 1}, 2.0, 3.0, 1, {2, 2}, 0.05, quick(1, 4, 100));
  EXPECT_FALSE(est.proven_lower.has_value());
}

TEST(Sweep, CsvFormatAndDeterminism) {
  SearchOptions o = quick(1, 2, 40);
  o.field = Field::real;
  const auto a = sweep_grid({1, 1}, {2.0, 3.0}, {2.0, 2.5}, 2, {2, 2}, 0.05, o);
  const auto b = sweep_grid({1, 1}, {2.0, 3.0}, {2.0, 2.5}, 2, {2, 2}, 0.05, o);
  const std::string ca = format_sweep_csv(a), cb = format_sweep_csv(b);
  EXPECT_EQ(ca, cb);
  std::istringstream in(ca);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kSweepCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
    EXPECT_NE(line.find(",2x2,real,2,1"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(a[0].p, 2.0);
  EXPECT_EQ(a[0].gamma, 2.0);
  EXPECT_TRUE(a[0].proven_lower.has_value());
  EXPECT_FALSE(a[1].proven_lower.has_value());
}

TEST(Sweep, FileOutput) {
  SearchOptions o = quick(1, 1, 10);
  const auto rows = sweep_grid({1, 1}, {2.0}, {2.0}, 1, {2, 2}, 0.25, o);
  const std::string path = ::testing::TempDir() + "wernerlab_sweep_test.csv";
  write_sweep_csv(rows, path);
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), format_sweep_csv(rows));
  std::remove(path.c_str());
  EXPECT_THROW(write_sweep_csv(rows, "/nonexistent-dir/x.csv"), std::runtime_error);
  EXPECT_THROW(sweep_grid({1, 1}, {}, {2.0}, 1, {2, 2}, 0.1, o), std::invalid_argument);
}

TEST(Sweep, NumberFormatting) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(dims_label({2, 3, 4}), "2x3x4");
}
