#include "test_support.hpp"

#include "wernerlab/io.hpp"

#include <cstdio>
#include <fstream>

using namespace wltest;

TEST(Json, MatrixRoundTrip) {
  const auto c = random_op({2, 3}, 1);
  const auto back = matrix_from_json(parse_json_text(to_json(c).dump()));
  EXPECT_EQ(back.dims(), c.dims());
  EXPECT_EQ((back.entries() - c.entries()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Json, FileRoundTrip) {
  const auto c = random_op({2, 2}, 2);
  const std::string path = ::testing::TempDir() + "wernerlab_io_test.json";
  save_matrix(c, path);
  const auto back = load_matrix(path);
  std::remove(path.c_str());
  EXPECT_EQ(back.entries(), c.entries());
}

TEST(Json, RealOnlyInput) {
  const auto m = matrix_from_json(parse_json_text(R"({"dims":[2],"re":[[1,2],[3,4]]})"));
  EXPECT_EQ(m.entries()(1, 0), cplx(3.0, 0.0));
  EXPECT_EQ(m.dims(), Dims{2});
}

TEST(Json, VectorRoundTrip) {
  const Vector v = random_vec(6, 3);
  Dims dims;
  const Vector back = vector_from_json(vector_to_json(v, {2, 3}), &dims);
  EXPECT_EQ(back, v);
  EXPECT_EQ(dims, (Dims{2, 3}));
}

TEST(Json, MalformedInputs) {
  EXPECT_THROW(parse_json_text("{\"dims\": [2"), std::invalid_argument);
  EXPECT_THROW(matrix_from_json(parse_json_text(R"({"re":[[1]]})")), std::invalid_argument);
  EXPECT_THROW(matrix_from_json(parse_json_text(R"({"dims":[2],"re":[[1,2],[3]]})")), std::invalid_argument);
  EXPECT_THROW(matrix_from_json(parse_json_text(R"({"dims":[3],"re":[[1,2],[3,4]]})")), std::invalid_argument);
  EXPECT_THROW(matrix_from_json(parse_json_text(R"({"dims":[2],"re":[["a",2],[3,4]]})")), std::invalid_argument);
  EXPECT_THROW(matrix_from_json(parse_json_text(R"({"dims":[2],"re":[[1,2],[3,4]],"im":[[0,0]]})")),
               std::invalid_argument);
}

TEST(Json, MissingFile) {
  EXPECT_THROW(load_matrix("/nonexistent-dir/none.json"), std::runtime_error);
  EXPECT_THROW(save_matrix(random_op({2}, 1), "/nonexistent-dir/none.json"), std::runtime_error);
}

TEST(Json, ReportsCarrySettings) {
  SearchOptions o;
  o.restarts = 2;
  o.max_iters = 10;
  o.seed = 4;
  const auto rep = minimize_form(FormSpec::distillability(2, -0.3), {2, 2}, 1, o);
  const auto j = to_json(rep);
  EXPECT_EQ(j.at("restarts"), 2);
  EXPECT_EQ(j.at("master_seed"), 4);
  EXPECT_EQ(j.at("spec").at("p"), 2.0);
  EXPECT_DOUBLE_EQ(j.at("best_value").get<double>(), rep.best_value);
  const auto m = matrix_from_json(j.at("best_matrix"));
  EXPECT_TRUE(MatrixNear(m.entries(), rep.best_factorization.reconstruct(), 0.0));
  EXPECT_EQ(to_json(FormSpec{{1}, kOperatorNorm, 2.0, 0.0}).at("p"), "inf");
}
