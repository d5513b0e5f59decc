// Copyright 2026 The lingmt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ==============================================================================

#include "lingmt/autograd.h"

#include <doctest.h>

#include <cmath>
#include <functional>

#include "lingmt/common.h"
#include "lingmt/oracles.h"

namespace lingmt {
namespace {

Matrix random_matrix(int r, int c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
  return m;
}

// Projects a tensor onto a scalar with fixed random coefficients.
Var project(Var x, const Matrix& coef) {
  std::vector<std::tuple<int, int, double>> e;
  for (int i = 0; i < coef.rows(); ++i)
    for (int j = 0; j < coef.cols(); ++j) e.emplace_back(i, j, coef(i, j));
  return ops::pick_sum(x, e);
}

struct OpCase {
  ModelParams params;
  Rng rng{41};
  Matrix& add(const std::string& name, int r, int c, double scale = 1.0) {
    Matrix& m = params.add(name, r, c);
    m = random_matrix(r, c, rng, scale);
    return m;
  }
  // Checks every entry of every tensor.
  double check(const std::function<Var(Tape&)>& f) {
    // Fixed projection of the op output.
    Tape probe(&params);
    Var out = f(probe);
    Matrix coef = random_matrix(static_cast<int>(out.rows()), static_cast<int>(out.cols()), rng);
    GradientCheckOptions opt;
    opt.samples_per_tensor = 1000;
    auto loss = [&](Tape& t) {
      Var y = f(t);
      return y.rows() == 1 && y.cols() == 1 && coef.size() == 1 ? ops::scale(y, coef(0, 0))
                                                                 : project(y, coef);
    };
    return check_gradients(params, loss, opt).max_error;
  }
};

constexpr double kTol = 1e-6;

TEST_CASE("ops: finite-difference agreement of every operation") {
  OpCase c;
  c.add("a", 3, 4);
  c.add("b", 4, 5);
  c.add("c", 3, 4);
  c.add("d", 5, 4);
  c.add("row", 1, 4);
  c.add("brow", 1, 5);
  auto P = [](Tape& t, const char* n) { return t.param(n); };

  CHECK(c.check([&](Tape& t) { return ops::matmul(P(t, "a"), P(t, "b")); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::matmul_nt(P(t, "a"), P(t, "d")); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::transpose(P(t, "a")); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::add(P(t, "a"), P(t, "c")); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::sub(P(t, "a"), P(t, "c")); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::scale(P(t, "a"), -2.5); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::add_row(P(t, "a"), P(t, "row")); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::linear(P(t, "a"), P(t, "b"), P(t, "brow")); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::gelu(P(t, "a")); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::tanh(P(t, "a")); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::gather_rows(P(t, "a"), {2, 0, 2}); }) < kTol);
  CHECK(c.check([&](Tape& t) { return ops::concat_rows({P(t, "a"), P(t, "row"), P(t, "c")}); }) <
        kTol);
  CHECK(c.check([&](Tape& t) {
          return ops::combine({ops::pick_sum(P(t, "a"), {{0, 0, 1.0}, {2, 3, -0.5}}),
                               ops::pick_sum(P(t, "c"), {{1, 1, 2.0}})},
                              {0.5, 3.0}, 7.0);
        }) < kTol);
  // Reuse of one tensor accumulates into a single gradient.
  CHECK(c.check([&](Tape& t) { return ops::matmul_nt(P(t, "a"), P(t, "a")); }) < kTol);
}

TEST_CASE("ops: layer norm gradient and normalized statistics") {
  OpCase c;
  c.add("x", 4, 8, 3.0);
  c.add("g", 1, 8);
  c.add("b", 1, 8);
  CHECK(c.check([&](Tape& t) { return ops::layer_norm(t.param("x"), t.param("g"), t.param("b")); }) <
        1e-5);
  Tape t(&c.params);
  Var ones = t.constant(Matrix::Ones(1, 8));
  Var zeros = t.constant(Matrix::Zero(1, 8));
  const Matrix y = ops::layer_norm(t.param("x"), ones, zeros).value();
  for (int i = 0; i < 4; ++i) {
    const double mean = y.row(i).mean();
    const double var = (y.row(i).array() - mean).square().mean();
    CHECK(std::fabs(mean) <= 1e-6);
    CHECK(std::fabs(var - 1.0) <= 1e-4);
  }
}

TEST_CASE("ops: attention with masked keys") {
  OpCase c;
  c.add("q", 5, 8);
  c.add("k", 5, 8);
  c.add("v", 5, 8);
  const std::vector<bool> valid = {true, true, false, true, false};
  auto f = [&](Tape& t) { return ops::attention(t.param("q"), t.param("k"), t.param("v"), 2, valid); };
  CHECK(c.check(f) < 1e-6);
  // Masked value rows have no influence.
  Tape a(&c.params);
  const Matrix before = f(a).value();
  c.params.at("v").row(2).setConstant(100.0);
  c.params.at("k").row(4).setConstant(-7.0);
  Tape b(&c.params);
  CHECK((f(b).value() - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ops: fencepost spans and pair block products") {
  OpCase c;
  c.add("p", 6, 6);
  c.add("left", 3, 8);
  c.add("right", 4, 4);
  const std::vector<std::pair<int, int>> spans = {{0, 0}, {0, 3}, {1, 2}, {3, 3}};
  CHECK(c.check([&](Tape& t) { return ops::fence_spans(t.param("p"), spans); }) < kTol);
  Tape t(&c.params);
  const Matrix& p = c.params.at("p");
  const Matrix f = ops::fence_spans(t.param("p"), spans).value();
  // Span (1, 2): forward half p[3] - p[1], backward half p[2] - p[4].
  for (int k = 0; k < 3; ++k) {
    CHECK(f(2, k) == doctest::Approx(p(3, k) - p(1, k)));
    CHECK(f(2, 3 + k) == doctest::Approx(p(2, 3 + k) - p(4, 3 + k)));
  }
  const std::vector<std::pair<int, int>> pairs = {{0, 0}, {2, 3}, {1, 1}, {2, 0}};
  CHECK(c.check([&](Tape& t2) {
          return ops::pair_block_dot(t2.param("left"), t2.param("right"), pairs, 2);
        }) < kTol);
}

TEST_CASE("ops: cross-entropy losses") {
  OpCase c;
  c.add("z", 4, 5);
  c.add("s", 6, 1, 2.0);
  CHECK(c.check([&](Tape& t) { return ops::softmax_cross_entropy(t.param("z"), {1, 0, 4, 4}, 0.25); }) <
        kTol);
  CHECK(c.check([&](Tape& t) {
          return ops::sigmoid_cross_entropy(t.param("s"), {1, 0, 1, 1, 0, 0},
                                            {1, 1, 0.5, 0, 1, 2}, 0.5);
        }) < kTol);

  // Uniform logits: ln(K) per row.
  Tape t(&c.params);
  Var u = t.constant(Matrix::Zero(3, 7));
  CHECK(ops::softmax_cross_entropy(u, {0, 3, 6}, 1.0 / 3).scalar() == doctest::Approx(std::log(7.0)));
  // Large logits remain finite.
  Matrix big(1, 1);
  big(0, 0) = 800.0;
  Var b = t.constant(big);
  CHECK(ops::sigmoid_cross_entropy(b, {0.0}, {1.0}, 1.0).scalar() == doctest::Approx(800.0));
}

TEST_CASE("tape: shape errors and seeded backward") {
  ModelParams p;
  p.add("a", 2, 3).setOnes();
  p.add("b", 2, 2).setOnes();
  Tape t(&p);
  CHECK_THROWS_AS(ops::matmul(t.param("a"), t.param("a")), ShapeError);
  CHECK_THROWS_AS(ops::add(t.param("a"), t.param("b")), ShapeError);
  CHECK_THROWS_AS(t.param("missing"), ShapeError);
  CHECK_THROWS_AS(p.add("a", 1, 1), ShapeError);

  Tape z(&p);
  Var y = ops::matmul(z.param("b"), z.param("a"));
  z.backward({{y, Matrix::Zero(2, 3)}});
  for (const auto& [name, g] : z.parameter_gradients()) CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("params: float32 storage rounding") {
  ModelParams p;
  p.add("x", 1, 1)(0, 0) = 0.1;
  p.round_to_storage();
  CHECK(p.at("x")(0, 0) == static_cast<double>(0.1f));
  CHECK(p.parameter_count() == 1);
}

}  // namespace
}  // namespace lingmt
