#include <cmath>

#include "doctest.h"
#include "rsclf/error.hpp"
#include "rsclf/neural.hpp"

using namespace rsclf;
using doctest::Approx;

namespace {

struct Batch {
  SparseMatrix x;
  std::vector<Label> y;
};

// Dense rows in [-1, 1], labelled by a planted hyperplane.
Batch separable(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(dim);
  for (double& e : w) e = 2.0 * uniform01(rng) - 1.0;
  Batch b{SparseMatrix(dim), {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::uint32_t, double>> row;
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = 2.0 * uniform01(rng) - 1.0;
      row.emplace_back(static_cast<std::uint32_t>(j), v);
      s += v * w[j];
    }
    b.x.push_row(std::move(row));
    b.y.push_back(s >= 0.0 ? 1 : 0);
  }
  return b;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

}  // namespace

TEST_CASE("init_params") {
  const MlpParams a = init_params(100, 7), b = init_params(100, 7);
  CHECK(a == b);
  for (double v : a.b1) CHECK(v == 0.0);
  CHECK(a.b2 == 0.0);
  double s = 0.0, s2 = 0.0;
  for (double v : a.w1) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(a.w1.size());
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(std::abs(var - 2.0 / 100.0) <= 0.2 * (2.0 / 100.0));
  CHECK(init_params(100, 8) != a);
}

TEST_CASE("forward examples") {
  const SparseMatrix x = SparseMatrix::from_dense({{0.3, -2.0}}, 2);
  const auto rows = all_rows(1);
  CHECK(forward(MlpParams::zeros(2), x, rows, Mode::infer).p[0] == 0.5);

  const MlpParams p = init_params(2, 1);
  Rng rng(3);
  CHECK(forward(p, x, rows, Mode::train, 0.0, &rng).p == forward(p, x, rows, Mode::infer).p);

  MlpParams q = MlpParams::zeros(1);
  for (double& w : q.w1) w = 1.0;
  for (double& w : q.w2) w = 1.0 / 512.0;
  const double got = forward(q, SparseMatrix::from_dense({{1.0}}, 1), rows, Mode::infer).p[0];
  CHECK(got == Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-12));
  CHECK(got == Approx(0.731059).epsilon(1e-6));
  CHECK_THROWS_AS(forward(q, x, rows, Mode::infer), DataError);
}

TEST_CASE("forward output stays strictly inside (0, 1)") {
  MlpParams q = MlpParams::zeros(1, 4);
  for (double& w : q.w1) w = 1.0;
  for (double& w : q.w2) w = 1e6;
  const auto rows = all_rows(2);
  const auto p = forward(q, SparseMatrix::from_dense({{1e6}, {-1e6}}, 1), rows, Mode::infer).p;
  for (double v : p) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  q.b2 = -1e9;
  const double lo = forward(q, SparseMatrix::from_dense({{0.0}}, 1), all_rows(1), Mode::infer).p[0];
  CHECK(lo > 0.0);
}

TEST_CASE("dropout masks are inverted") {
  const MlpParams p = init_params(3, 2, 64);
  Rng rng(5);
  const auto c = forward(p, SparseMatrix::from_dense({{1, 1, 1}}, 3), all_rows(1), Mode::train, 0.25, &rng);
  for (double m : c.mask) CHECK((m == 0.0 || m == Approx(1.0 / 0.75)));
}

TEST_CASE("bce examples") {
  CHECK(bce_loss(0.5, 1) == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bce_loss(1.0 - 1e-12, 1) == Approx(0.0).epsilon(1e-9));
  CHECK(bce_loss(0.9, 0) == Approx(-std::log(0.1)).epsilon(1e-9));
  CHECK(std::isfinite(bce_loss(0.0, 1)));
  CHECK(bce_loss(std::vector<double>{0.5, 0.9}, std::vector<Label>{1, 0}) ==
        Approx((std::log(2.0) - std::log(0.1)) / 2.0));
}

TEST_CASE("backward examples") {
  const Batch b = separable(6, 4, 1);
  const MlpParams p = init_params(4, 2, 16);
  const auto rows = all_rows(6);
  const ForwardCache c = forward(p, b.x, rows, Mode::infer);
  const MlpGrads g = backward(p, b.x, b.y, c);
  double db2 = 0.0;
  for (std::size_t i = 0; i < 6; ++i) db2 += c.p[i] - b.y[i];
  CHECK(g.b2 == Approx(db2 / 6.0).epsilon(1e-12));

  SparseMatrix zeros(4);
  for (int i = 0; i < 3; ++i) zeros.push_row({});
  const std::vector<Label> y{1, 0, 1};
  MlpParams shifted = p;
  for (double& v : shifted.b1) v = 0.1;
  const MlpGrads gz = backward(shifted, zeros, y, forward(shifted, zeros, all_rows(3), Mode::infer));
  for (double v : gz.w1) CHECK(v == 0.0);
  bool any = false;
  for (double v : gz.b1) any |= v != 0.0;
  CHECK(any);
}

TEST_CASE("adam first step and elementwise behaviour") {
  AdamConfig cfg;
  cfg.lr = 1e-3;
  std::vector<double> theta{0.0, 0.0, 5.0}, grad{1.0, 1.0, 0.0}, m(3, 0.0), v(3, 0.0);
  adam_update(theta, grad, m, v, 1, cfg);
  for (int i = 0; i < 2; ++i) {
    CHECK(theta[i] < 0.0);
    CHECK(std::abs(theta[i]) >= 0.999 * cfg.lr);
    CHECK(std::abs(theta[i]) <= cfg.lr);
  }
  CHECK(theta[0] == theta[1]);
  CHECK(theta[2] == 5.0);

  MlpParams p = init_params(3, 1, 8);
  const MlpParams before = p;
  AdamState st = AdamState::for_params(p);
  adam_step(p, MlpGrads::zeros(3, 8), st, cfg);
  CHECK(p == before);
  CHECK(st.t == 1);
  MlpGrads bad = MlpGrads::zeros(3, 8);
  bad.b2 = std::nan("");
  CHECK_THROWS_AS(adam_step(p, bad, st, cfg), NumericError);
}

TEST_CASE("training: separable set, zero epochs, determinism") {
  const Batch b = separable(200, 10, 4);
  MlpTrainConfig cfg;
  cfg.hidden = 64;
  cfg.epochs = 40;
  cfg.dropout = 0.0;
  cfg.adam.lr = 1e-2;
  cfg.seed = 2;
  const MlpTrainResult r = train_mlp(b.x, b.y, cfg);
  REQUIRE(r.history.size() == 40);
  MlpModel m{r.params};
  std::size_t correct = 0;
  const auto pred = m.predict(b.x);
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == b.y[i];
  CHECK(static_cast<double>(correct) / 200.0 >= 0.99);
  CHECK(train_mlp(b.x, b.y, cfg).history == r.history);
  CHECK(m.scores(b.x) == m.scores(b.x));

  cfg.epochs = 0;
  const MlpTrainResult none = train_mlp(b.x, b.y, cfg);
  CHECK(none.history.empty());
  CHECK(none.params == init_params(10, cfg.seed, 64));

  cfg.batch_size = 500;
  CHECK_THROWS_AS(train_mlp(b.x, b.y, cfg), DataError);
}

TEST_CASE("gradient check passes on a healthy net and flags corruption") {
  const Batch b = separable(50, 8, 9);
  const MlpParams p = init_params(8, 3, 32);
  GradCheckOptions opts;
  opts.coords_per_block = 64;
  const GradCheckReport ok = gradient_check(p, b.x, b.y, opts);
  CHECK(ok.max_rel_error < 1e-4);
  CHECK(ok.checked > 0);

  opts.mutate = [](MlpGrads& g) {
    for (double& v : g.w2) v *= 2.0;
  };
  CHECK(gradient_check(p, b.x, b.y, opts).max_rel_error > 1e-1);
}

TEST_CASE("gradient check at a zero-gradient point") {
  // p = 0.5 and labels split evenly: the b2 gradient vanishes exactly.
  const MlpParams p = MlpParams::zeros(2, 4);
  const SparseMatrix x = SparseMatrix::from_dense({{1, 0}, {0, 1}}, 2);
  const std::vector<Label> y{0, 1};
  const MlpGrads g = backward(p, x, y, forward(p, x, all_rows(2), Mode::infer));
  CHECK(g.b2 == 0.0);
  CHECK(gradient_check(p, x, y).max_rel_error < 1e-4);
}
