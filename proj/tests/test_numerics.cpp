#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acee/numerics/adam.hpp"
#include "acee/numerics/linalg.hpp"
#include "acee/numerics/mlp.hpp"
#include "acee/numerics/rng.hpp"
#include "support/test_oracles.hpp"

using namespace acee;
using numerics::Matrix;
using numerics::Vector;

TEST_CASE("rng: reproducible per (seed, stream), distinct across streams") {
  numerics::Rng a(42, 3), b(42, 3), c(42, 4);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 64; ++i) {
    const double va = a.normal();
    all_equal = all_equal && va == b.normal();
    any_diff = any_diff || va != c.normal();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("rng: substream derivation ignores consumption") {
  numerics::Rng a(7, 0), b(7, 0);
  for (int i = 0; i < 10; ++i) (void)b.normal();
  numerics::Rng sa = a.substream(5), sb = b.substream(5);
  for (int i = 0; i < 16; ++i) CHECK(sa.next_u64() == sb.next_u64());
}

TEST_CASE("sample_normal: sd=0 gives the mean, negative sd throws") {
  numerics::Rng rng(1, 0);
  const Vector v = numerics::sample_normal(rng, 3.5, 0.0, 10);
  CHECK((v.array() == 3.5).all());
  CHECK_THROWS(numerics::sample_normal(rng, 0.0, -1.0, 3));
}

TEST_CASE("sample_normal: moments at one million draws") {
  numerics::Rng rng(20240901, 0);
  const Vector v = numerics::sample_normal(rng, 0.0, 1.0, 1000000);
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
  CHECK(std::abs(mean) < 0.005);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("svd_truncated: 2x2 diagonal, rank one") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  const auto svd = numerics::svd_truncated(m, 1);
  CHECK(svd.sigma.size() == 1);
  CHECK(svd.sigma[0] == doctest::Approx(2.0));
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 2.0;
  CHECK((svd.reconstruction() - expected).norm() < 1e-12);
}

TEST_CASE("svd_truncated: full rank reconstructs exactly") {
  numerics::Rng rng(5, 0);
  const Matrix m = rng.normal_matrix(5, 3);
  const auto svd = numerics::svd_truncated(m, 3);
  CHECK((svd.reconstruction() - m).norm() < 1e-8);
}

TEST_CASE("svd_truncated: rank-1 outer product recovered at q=1") {
  numerics::Rng rng(6, 0);
  const Vector a = rng.normal_vector(6), b = rng.normal_vector(4);
  const Matrix m = a * b.transpose();
  const auto svd = numerics::svd_truncated(m, 1);
  CHECK((svd.reconstruction() - m).norm() < 1e-8);
}

TEST_CASE("svd_truncated: orthonormal factors, ordered values, sign convention") {
  numerics::Rng rng(7, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix m = rng.normal_matrix(6, 5);
    const auto svd = numerics::svd_truncated(m, 3);
    CHECK((svd.u.transpose() * svd.u - Matrix::Identity(3, 3)).norm() < 1e-8);
    CHECK((svd.v.transpose() * svd.v - Matrix::Identity(3, 3)).norm() < 1e-8);
    CHECK(svd.sigma[0] >= svd.sigma[1]);
    CHECK(svd.sigma[1] >= svd.sigma[2]);
    for (int k = 0; k < 3; ++k) {
      Eigen::Index imax = 0;
      svd.v.col(k).cwiseAbs().maxCoeff(&imax);
      CHECK(svd.v(imax, k) > 0.0);
    }
  }
}

TEST_CASE("svd_truncated: rejects bad input") {
  Matrix m = Matrix::Ones(3, 3);
  CHECK_THROWS(numerics::svd_truncated(m, 0));
  CHECK_THROWS(numerics::svd_truncated(m, 4));
  m(1, 1) = std::nan("");
  CHECK_THROWS(numerics::svd_truncated(m, 1));
}

TEST_CASE("svd_truncated: Eckart-Young against random rank-q candidates") {
  numerics::Rng rng(8, 0);
  for (int rep = 0; rep < 1000; ++rep) {
    const Eigen::Index rows = 2 + static_cast<Eigen::Index>(rng.below(11));
    const Eigen::Index cols = 2 + static_cast<Eigen::Index>(rng.below(11));
    const Eigen::Index q = 1 + static_cast<Eigen::Index>(rng.below(
                                   static_cast<std::uint64_t>(std::min(rows, cols))));
    const Matrix m = rng.normal_matrix(rows, cols);
    const double best = (m - numerics::svd_truncated(m, q).reconstruction()).norm();
    for (int cand = 0; cand < 100; ++cand) {
      const Matrix c = rng.normal_matrix(rows, q) * rng.normal_matrix(cols, q).transpose();
      CHECK(best <= (m - c).norm() + 1e-9);
    }
  }
}

TEST_CASE("mlp: zero parameters give zero output") {
  numerics::Mlp net({3, 4, 2});
  const Vector out = net.forward(Vector::Ones(3));
  CHECK(out.norm() == 0.0);
}

TEST_CASE("mlp: single linear layer is W x + b") {
  numerics::Mlp net({2, 2});
  net.weights()[0] << 1.0, -2.0, 3.0, 0.5;
  net.biases()[0] << 0.25, -0.75;
  const Vector x = (Vector(2) << 2.0, 1.0).finished();
  const Vector out = net.forward(x);
  CHECK(out[0] == doctest::Approx(1.0 * 2.0 - 2.0 * 1.0 + 0.25));
  CHECK(out[1] == doctest::Approx(3.0 * 2.0 + 0.5 * 1.0 - 0.75));
}

TEST_CASE("mlp: two-layer forward pass matches hand evaluation") {
  numerics::Mlp net({2, 2, 1});
  net.weights()[0] << 1.0, -1.0, 0.5, 2.0;
  net.biases()[0] << 0.1, -0.2;
  net.weights()[1] << 1.5, -0.5;
  net.biases()[1] << 0.25;
  const Vector x = (Vector(2) << 1.0, 2.0).finished();
  // pre = (-0.9, 4.3), relu = (0, 4.3), out = -0.5 * 4.3 + 0.25 = -1.9
  CHECK(net.forward(x)[0] == doctest::Approx(-1.9));
}

TEST_CASE("mlp: dimension mismatch throws") {
  numerics::Mlp net({3, 2});
  CHECK_THROWS(net.forward(Vector::Ones(2)));
  CHECK_THROWS(net.backward(Vector::Ones(2), Vector::Ones(2)));
  CHECK_THROWS(net.backward(Vector::Ones(3), Vector::Ones(3)));
}

TEST_CASE("mlp backward: zero output grad, linear outer product") {
  numerics::Rng rng(9, 0);
  numerics::Mlp net({3, 2});
  net.init_random(rng);
  const Vector x = rng.normal_vector(3);

  const auto zero = net.backward(x, Vector::Zero(2));
  CHECK(zero.flat().norm() == 0.0);

  const Vector g = rng.normal_vector(2);
  const auto lin = net.backward(x, g);
  CHECK((lin.dw[0] - g * x.transpose()).norm() < 1e-12);
  CHECK((lin.db[0] - g).norm() < 1e-12);
  CHECK((lin.dinput.row(0).transpose() - net.weights()[0].transpose() * g).norm() < 1e-12);
}

namespace {

// central differences are only trustworthy away from the rectifier kinks:
// reject configurations with a hidden pre-activation within the margin
bool near_relu_kink(const numerics::Mlp& net, const Vector& x, double margin) {
  Vector a = x;
  for (std::size_t l = 0; l + 1 < net.weights().size(); ++l) {
    const Vector pre = net.weights()[l] * a + net.biases()[l];
    if ((pre.cwiseAbs().array() < margin).any()) return true;
    a = pre.cwiseMax(0.0);
  }
  return false;
}

}  // namespace

TEST_CASE("mlp backward: matches central finite differences on random nets") {
  numerics::Rng rng(10, 0);
  double worst = 0.0;
  int tested = 0;
  while (tested < 100) {
    const Eigen::Index h1 = 2 + static_cast<Eigen::Index>(rng.below(4));
    const Eigen::Index h2 = 2 + static_cast<Eigen::Index>(rng.below(4));
    numerics::Mlp net({3, h1, h2, 2});
    net.init_random(rng);
    for (auto& b : net.biases()) b = rng.normal_vector(b.size(), 0.0, 0.3);
    const Vector x = rng.normal_vector(3);
    if (near_relu_kink(net, x, 1e-3)) continue;
    const Vector g = rng.normal_vector(2);
    const Vector grad = net.backward(x, g).flat();
    const Vector fd = test::finite_difference_grad(net, x, g);
    for (Eigen::Index p = 0; p < grad.size(); ++p) {
      const double denom = std::max({std::abs(grad[p]), std::abs(fd[p]), 1e-4});
      worst = std::max(worst, std::abs(grad[p] - fd[p]) / denom);
    }
    ++tested;
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("mlp: batched forward/backward agree with per-example calls") {
  numerics::Rng rng(11, 0);
  numerics::Mlp net({4, 8, 3});
  net.init_random(rng);
  const Matrix xs = rng.normal_matrix(5, 4);
  const Matrix gs = rng.normal_matrix(5, 3);
  const Matrix batch_out = net.forward_batch(xs);
  const auto batch_grad = net.backward_batch(xs, gs);
  Vector acc = Vector::Zero(net.parameter_count());
  for (int i = 0; i < 5; ++i) {
    CHECK((batch_out.row(i).transpose() - net.forward(xs.row(i).transpose())).norm() < 1e-12);
    acc += net.backward(xs.row(i).transpose(), gs.row(i).transpose()).flat();
  }
  CHECK((batch_grad.flat() - acc).norm() < 1e-10);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  numerics::AdamState state(3);
  Vector params = (Vector(3) << 1.0, -2.0, 0.5).finished();
  const Vector before = params;
  CHECK(numerics::adam_step(state, params, Vector::Zero(3), 0.1));
  CHECK((params - before).norm() == 0.0);
}

TEST_CASE("adam: matches a hand-unrolled recursion on constant gradients") {
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8, g = 0.5;
  numerics::AdamState state(1);
  Vector params = Vector::Zero(1);
  Vector grads = (Vector(1) << g).finished();

  double m = 0.0, v = 0.0, p = 0.0;
  for (int t = 1; t <= 25; ++t) {
    CHECK(numerics::adam_step(state, params, grads, lr, b1, b2, eps));
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    p -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
    CHECK(params[0] == doctest::Approx(p).epsilon(1e-12));
  }
  // constant-gradient steps scale like -lr regardless of |g|
  CHECK(params[0] < 0.0);
}

TEST_CASE("adam: non-finite gradient skips the step") {
  numerics::AdamState state(2);
  Vector params = (Vector(2) << 1.0, 2.0).finished();
  Vector grads = (Vector(2) << 0.1, std::nan("")).finished();
  CHECK_FALSE(numerics::adam_step(state, params, grads, 0.1));
  CHECK(params[0] == 1.0);
  CHECK(params[1] == 2.0);
  CHECK(state.t == 0);
}

TEST_CASE("adam: identical runs are bit-identical") {
  auto run = [] {
    numerics::Rng rng(77, 0);
    numerics::Mlp net({2, 4, 1});
    net.init_random(rng);
    numerics::AdamState state(net.parameter_count());
    Vector params = net.params_flat();
    for (int step = 0; step < 30; ++step) {
      const Vector x = rng.normal_vector(2);
      net.set_params_flat(params);
      const auto g = net.backward(x, Vector::Ones(1));
      numerics::adam_step(state, params, g.flat(), 1e-3);
    }
    return params;
  };
  const Vector a = run(), b = run();
  CHECK((a.array() == b.array()).all());
}
