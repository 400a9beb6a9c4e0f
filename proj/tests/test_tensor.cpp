#include <doctest.h>

#include <cmath>

#include "core/adam.hpp"
#include "core/gradcheck.hpp"
#include "core/graph.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"

using namespace xmodal;

TEST_CASE("matmul identity leaves the operand unchanged") {
    Graph g;
    auto I = Tensor::zeros({3, 3});
    for (int i = 0; i < 3; ++i) I(i, i) = 1.0;
    Rng rng(7);
    auto A = Tensor::randu({3, 4}, rng, -1.0, 1.0);
    auto y = g.matmul(g.leaf(I), g.leaf(A));
    for (int64_t i = 0; i < A.numel(); ++i) CHECK(g.val(y)[i] == doctest::Approx(A[i]));
}

TEST_CASE("matmul hand-computed product") {
    Graph g;
    auto a = Tensor::from({2, 2}, {1, 2, 3, 4});
    auto b = Tensor::from({2, 1}, {0, 1});
    auto y = g.matmul(g.leaf(a), g.leaf(b));
    CHECK(g.val(y)[0] == doctest::Approx(2.0));
    CHECK(g.val(y)[1] == doctest::Approx(4.0));
}

TEST_CASE("matmul by zero matrix gives zeros") {
    Graph g;
    Rng rng(3);
    auto A = Tensor::randu({3, 3}, rng, -1.0, 1.0);
    auto y = g.matmul(g.leaf(Tensor::zeros({2, 3})), g.leaf(A));
    for (int64_t i = 0; i < g.val(y).numel(); ++i) CHECK(g.val(y)[i] == 0.0);
}

TEST_CASE("matmul shape mismatch raises a dimension error") {
    Graph g;
    auto a = g.leaf(Tensor::zeros({2, 3}));
    auto b = g.leaf(Tensor::zeros({2, 3}));
    CHECK_THROWS_AS(g.matmul(a, b), DimensionError);
}

TEST_CASE("activations match their pointwise definitions") {
    Graph g;
    auto x = g.leaf(Tensor::from({1, 3}, {-1, 0, 2}));
    auto r = g.relu(x);
    CHECK(g.val(r)[0] == 0.0);
    CHECK(g.val(r)[1] == 0.0);
    CHECK(g.val(r)[2] == 2.0);
    CHECK(g.val(g.tanh(g.leaf(Tensor::scalar(0.0))))[0] == 0.0);
    CHECK(g.val(g.sigmoid(g.leaf(Tensor::scalar(0.0))))[0] == doctest::Approx(0.5));
}

TEST_CASE("softmax of a uniform vector is 1/k and rows always sum to one") {
    Graph g;
    const int k = 7;
    auto u = g.softmax_rows(g.leaf(Tensor::full({1, k}, 0.42)));
    for (int j = 0; j < k; ++j) CHECK(g.val(u)[j] == doctest::Approx(1.0 / k));

    Rng rng(11);
    auto x = g.softmax_rows(g.leaf(Tensor::randu({5, 9}, rng, -4.0, 4.0)));
    for (int i = 0; i < 5; ++i) {
        double s = 0.0;
        for (int j = 0; j < 9; ++j) {
            CHECK(g.val(x)(i, j) >= 0.0);
            s += g.val(x)(i, j);
        }
        CHECK(std::abs(s - 1.0) < 1e-9);
    }
}

TEST_CASE("masked softmax zeroes the padded columns") {
    Graph g;
    Rng rng(5);
    auto x = g.softmax_rows(g.leaf(Tensor::randu({3, 6}, rng, -2.0, 2.0)), 4);
    for (int i = 0; i < 3; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += g.val(x)(i, j);
        CHECK(s == doctest::Approx(1.0));
        CHECK(g.val(x)(i, 4) == 0.0);
        CHECK(g.val(x)(i, 5) == 0.0);
    }
}

TEST_CASE("backward: loss = sum(W x) has outer-product gradient structure") {
    Graph g;
    Rng rng(13);
    ParamT<double> W("W", Tensor::randu({3, 4}, rng, -1.0, 1.0));
    auto x = Tensor::randu({4, 1}, rng, -1.0, 1.0);
    auto loss = g.sum(g.matmul(g.param(W), g.leaf(x)));
    g.backward(loss);
    // d/dW sum(Wx) = 1 * x^T broadcast over rows
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) CHECK(W.grad(i, j) == doctest::Approx(x[j]));
}

TEST_CASE("backward: constant loss leaves all gradients zero") {
    Graph g;
    Rng rng(17);
    ParamT<double> W("W", Tensor::randu({3, 3}, rng, -1.0, 1.0));
    auto loss = g.sum(g.affine(g.param(W), 0.0, 1.0));  // constant w.r.t. W
    g.backward(loss);
    for (int64_t i = 0; i < W.grad.numel(); ++i) CHECK(W.grad[i] == 0.0);
}

TEST_CASE("backward: loss = ||p||^2 has gradient 2p") {
    Graph g;
    Rng rng(19);
    ParamT<double> p("p", Tensor::randu({1, 6}, rng, -2.0, 2.0));
    auto id = g.param(p);
    auto loss = g.sum(g.mul(id, id));
    g.backward(loss);
    for (int64_t i = 0; i < p.value.numel(); ++i)
        CHECK(p.grad[i] == doctest::Approx(2.0 * p.value[i]));
}

TEST_CASE("backward rejects non-scalar loss") {
    Graph g;
    auto x = g.leaf(Tensor::zeros({2, 2}));
    CHECK_THROWS_AS(g.backward(x), UsageError);
}

namespace {

// Gradient-check a scalar graph expression in the entries of a single input.
template <typename Build>
double check_op(Build build, Shape in_shape, uint64_t seed, double eps = 1e-5) {
    Rng rng(seed);
    auto x0 = Tensor::randu(in_shape, rng, -1.5, 1.5);
    Graph g;
    ParamT<double> p("x", x0);
    auto loss = build(g, g.param(p));
    g.backward(loss);
    auto f = [&](std::span<const double> pt) {
        Graph h;
        Tensor t;
        t.shape = in_shape;
        t.data.assign(pt.begin(), pt.end());
        ParamT<double> q("x", t);
        return h.val(build(h, h.param(q))).item();
    };
    return finite_diff_check(f, std::span<const double>(x0.data), std::span<const double>(p.grad.data), eps)
        .max_rel_err;
}

}  // namespace

TEST_CASE("every differentiable op agrees with central differences") {
    Rng seeds(123);
    for (int rep = 0; rep < 3; ++rep) {
        const uint64_t s = seeds.next_u64();
        // unary chains through each activation / shape op
        CHECK(check_op([](Graph& g, Graph::Id x) { return g.sum(g.relu(x)); }, {3, 4}, s) < 1e-4);
        CHECK(check_op([](Graph& g, Graph::Id x) { return g.sum(g.tanh(x)); }, {3, 4}, s) < 1e-4);
        CHECK(check_op([](Graph& g, Graph::Id x) { return g.sum(g.sigmoid(x)); }, {3, 4}, s) <
              1e-4);
        CHECK(check_op([](Graph& g, Graph::Id x) { return g.sum(g.mul(g.softmax_rows(x), x)); },
                       {3, 5}, s) < 1e-4);
        CHECK(check_op(
                  [](Graph& g, Graph::Id x) { return g.sum(g.mul(g.softmax_rows(x, 3), x)); },
                  {3, 5}, s) < 1e-4);
        CHECK(check_op([](Graph& g, Graph::Id x) { return g.sum(g.transpose(x)); }, {2, 5}, s) <
              1e-4);
        CHECK(check_op([](Graph& g, Graph::Id x) { return g.sum(g.slice_cols(x, 1, 3)); }, {3, 4},
                       s) < 1e-4);
        CHECK(check_op([](Graph& g, Graph::Id x) { return g.sum(g.slice_rows(x, 0, 2)); }, {3, 4},
                       s) < 1e-4);
        CHECK(check_op([](Graph& g, Graph::Id x) { return g.sum(g.mean_rows(g.mul(x, x))); },
                       {4, 3}, s) < 1e-4);
        CHECK(check_op(
                  [](Graph& g, Graph::Id x) {
                      return g.sum(g.concat_cols(std::vector<Graph::Id>{x, g.tanh(x)}));
                  },
                  {3, 2}, s) < 1e-4);
        CHECK(check_op(
                  [](Graph& g, Graph::Id x) {
                      return g.sum(g.concat_rows(std::vector<Graph::Id>{x, g.relu(x), x}));
                  },
                  {2, 3}, s) < 1e-4);
        CHECK(check_op([](Graph& g, Graph::Id x) { return g.sum(g.reshape(g.mul(x, x), {6, 2})); },
                       {3, 4}, s) < 1e-4);
        // binary ops against a fixed second operand
        CHECK(check_op(
                  [](Graph& g, Graph::Id x) {
                      Rng r2(99);
                      auto w = g.leaf(Tensor::randu({4, 3}, r2, -1.0, 1.0));
                      return g.sum(g.tanh(g.matmul(x, w)));
                  },
                  {3, 4}, s) < 1e-4);
        CHECK(check_op(
                  [](Graph& g, Graph::Id x) {
                      Rng r2(98);
                      auto b = g.leaf(Tensor::randu({1, 4}, r2, -1.0, 1.0));
                      return g.sum(g.sigmoid(g.add_bias(x, b)));
                  },
                  {3, 4}, s) < 1e-4);
        CHECK(check_op(
                  [](Graph& g, Graph::Id x) {
                      Rng r2(97);
                      auto t = g.leaf(Tensor::randu({3, 4}, r2, -1.0, 1.0));
                      return g.mse_mean(g.tanh(x), t);
                  },
                  {3, 4}, s) < 1e-4);
        CHECK(check_op(
                  [](Graph& g, Graph::Id x) {
                      Rng r2(96);
                      auto t = g.leaf(Tensor::randu({3, 4}, r2, -1.0, 1.0));
                      return g.mse_rowsum_mean(x, t);
                  },
                  {3, 4}, s) < 1e-4);
        CHECK(check_op(
                  [](Graph& g, Graph::Id x) {
                      Tensor onehot = Tensor::zeros({3, 4});
                      onehot(0, 1) = 1.0;
                      onehot(1, 3) = 1.0;
                      onehot(2, 0) = 1.0;
                      return g.softmax_ce_rows(x, g.leaf(onehot));
                  },
                  {3, 4}, s) < 1e-4);
    }
}

TEST_CASE("conv2d and conv2d_transpose agree with central differences") {
    const uint64_t s = 2024;
    // conv: 6x8x2 -> k3 s2 p1 -> 3x4x3
    CHECK(check_op(
              [](Graph& g, Graph::Id x) {
                  Rng r2(55);
                  auto w = g.leaf(Tensor::randu({3 * 3 * 2, 3}, r2, -0.5, 0.5));
                  auto b = g.leaf(Tensor::randu({3}, r2, -0.5, 0.5));
                  return g.sum(g.tanh(g.conv2d(x, w, b, 3, 2, 1)));
              },
              {2, 6, 8, 2}, s) < 1e-4);
    // conv weight gradient
    CHECK(check_op(
              [](Graph& g, Graph::Id w) {
                  Rng r2(56);
                  auto x = g.leaf(Tensor::randu({1, 6, 8, 2}, r2, -1.0, 1.0));
                  auto b = g.leaf(Tensor::randu({3}, r2, -0.5, 0.5));
                  return g.sum(g.tanh(g.conv2d(x, w, b, 3, 2, 1)));
              },
              {3 * 3 * 2, 3}, s) < 1e-4);
    // transpose conv: 3x4x3 -> k3 s2 p1 op1 -> 6x8x2
    CHECK(check_op(
              [](Graph& g, Graph::Id x) {
                  Rng r2(57);
                  auto w = g.leaf(Tensor::randu({3, 3 * 3 * 2}, r2, -0.5, 0.5));
                  auto b = g.leaf(Tensor::randu({2}, r2, -0.5, 0.5));
                  return g.sum(g.tanh(g.conv2d_transpose(x, w, b, 3, 2, 1, 1)));
              },
              {2, 3, 4, 3}, s) < 1e-4);
    CHECK(check_op(
              [](Graph& g, Graph::Id w) {
                  Rng r2(58);
                  auto x = g.leaf(Tensor::randu({1, 3, 4, 3}, r2, -1.0, 1.0));
                  auto b = g.leaf(Tensor::randu({2}, r2, -0.5, 0.5));
                  return g.sum(g.tanh(g.conv2d_transpose(x, w, b, 3, 2, 1, 1)));
              },
              {3, 3 * 3 * 2}, s) < 1e-4);
}

TEST_CASE("conv and transpose-conv shapes invert each other") {
    Graph g;
    Rng rng(42);
    auto x = g.leaf(Tensor::randu({1, 48, 64, 1}, rng, 0.0, 1.0));
    auto w1 = g.leaf(Tensor::randu({9, 4}, rng, -0.1, 0.1));
    auto b1 = g.leaf(Tensor::zeros({4}));
    auto y = g.conv2d(x, w1, b1, 3, 2, 1);
    CHECK(g.val(y).shape == Shape{1, 24, 32, 4});
    auto w2 = g.leaf(Tensor::randu({4, 9 * 1}, rng, -0.1, 0.1));
    auto b2 = g.leaf(Tensor::zeros({1}));
    auto z = g.conv2d_transpose(y, w2, b2, 3, 2, 1, 1);
    CHECK(g.val(z).shape == Shape{1, 48, 64, 1});
}

TEST_CASE("adam: zero gradient from a fresh state leaves parameters unchanged") {
    Rng rng(23);
    ParamT<double> p("p", Tensor::randu({2, 3}, rng, -1.0, 1.0));
    const Tensor before = p.value;
    AdamT<double> opt({&p}, 1e-2);
    p.zero_grad();
    opt.step();
    CHECK(opt.state().step_count == 1);
    for (int64_t i = 0; i < p.value.numel(); ++i) CHECK(p.value[i] == before[i]);
    for (const auto& m : opt.state().first_moment)
        for (double x : m.data) CHECK(x == 0.0);
}

TEST_CASE("adam: zero gradient decays existing moments by beta") {
    ParamT<double> p("p", Tensor::full({1, 2}, 0.5));
    AdamT<double> opt({&p}, 0.0, 0.9, 0.999);  // lr 0: isolate the moment update
    opt.state().first_moment[0].fill(1.0);
    opt.state().second_moment[0].fill(1.0);
    p.zero_grad();
    opt.step();
    CHECK(opt.state().first_moment[0][0] == doctest::Approx(0.9));
    CHECK(opt.state().second_moment[0][0] == doctest::Approx(0.999));
}

TEST_CASE("adam: constant gradient drives the update toward lr * sign(g)") {
    ParamT<double> p("p", Tensor::from({1, 2}, {0.0, 0.0}));
    const double lr = 1e-3;
    AdamT<double> opt({&p}, lr);
    double prev0 = 0.0, prev1 = 0.0;
    double step0 = 0.0, step1 = 0.0;
    for (int t = 0; t < 500; ++t) {
        p.grad[0] = 0.37;   // constant positive gradient
        p.grad[1] = -2.25;  // constant negative gradient
        opt.step();
        step0 = p.value[0] - prev0;
        step1 = p.value[1] - prev1;
        prev0 = p.value[0];
        prev1 = p.value[1];
    }
    // closed-form limit: m_hat -> g, v_hat -> g^2, so the step -> -lr * sign(g)
    CHECK(step0 == doctest::Approx(-lr).epsilon(0.01));
    CHECK(step1 == doctest::Approx(lr).epsilon(0.01));
}

TEST_CASE("adam reports the parameter name on non-finite gradients") {
    ParamT<double> p("fusion.W_token", Tensor::full({1, 1}, 0.5));
    AdamT<double> opt({&p}, 1e-3);
    p.grad[0] = std::numeric_limits<double>::quiet_NaN();
    try {
        opt.step();
        FAIL("expected NumericFault");
    } catch (const NumericFault& e) {
        CHECK(std::string(e.what()).find("fusion.W_token") != std::string::npos);
    }
}

TEST_CASE("finite_diff_check: quadratic and linear reference errors") {
    Rng rng(31);
    auto A = Tensor::randu({4, 4}, rng, -1.0, 1.0);
    std::vector<double> x0 = {0.3, -0.7, 1.1, 0.2};
    // f(x) = x^T A x; grad = (A + A^T) x
    auto f = [&](std::span<const double> x) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) s += x[i] * A(i, j) * x[j];
        return s;
    };
    std::vector<double> grad(4, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) grad[i] += (A(i, j) + A(j, i)) * x0[j];
    CHECK(finite_diff_check(f, x0, grad, 1e-5).max_rel_err < 1e-6);

    auto lin = [&](std::span<const double> x) { return 2.0 * x[0] - 3.0 * x[1] + 0.5 * x[2]; };
    std::vector<double> lgrad = {2.0, -3.0, 0.5, 0.0};
    CHECK(finite_diff_check(lin, x0, lgrad, 1e-5).max_rel_err < 1e-9);
}

TEST_CASE("seeded rng streams are reproducible and splits are stable") {
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c1 = Rng(99).split("module");
    Rng c2 = Rng(99).split("module");
    CHECK(c1.next_u64() == c2.next_u64());
    Rng d = Rng(99).split("other");
    CHECK(Rng(99).split("module").next_u64() != d.next_u64());
}

TEST_CASE("float32 graph instantiation runs forward and backward") {
    GraphF g;
    Rng rng(1);
    ParamT<float> w("w", Tensor::randu({3, 3}, rng, -1.0, 1.0).cast<float>());
    auto x = g.leaf(Tensor::randu({2, 3}, rng, -1.0, 1.0).cast<float>());
    auto loss = g.sum(g.tanh(g.matmul(x, g.param(w))));
    g.backward(loss);
    CHECK(w.grad.all_finite());
    CHECK(std::isfinite(g.val(loss).item()));
}
