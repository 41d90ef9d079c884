#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "brdflab/mlp.hpp"

using namespace brdflab;

namespace {

MLPConfig small_net(int in, int depth, int out, OutputKind head = OutputKind::Linear) {
    MLPConfig cfg;
    cfg.input_dim = in;
    cfg.width = 16;
    cfg.depth = depth;
    cfg.output = {{head, out, 1.0, 1.0}};
    return cfg;
}

void randomize(MLPState &s, uint64_t seed, double scale = 0.5) {
    Rng rng(seed);
    for (auto &w : s.W)
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-scale, scale);
    for (auto &b : s.b)
        for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform(-scale, scale);
}

Matrix random_matrix(int r, int c, uint64_t seed) {
    Matrix m(r, c);
    Rng rng(seed);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
    return m;
}

}  // namespace

TEST_CASE("zero-weight sigmoid head outputs 0.5") {
    auto cfg = small_net(4, 3, 2, OutputKind::Sigmoid);
    auto s = init_mlp(cfg, 1);
    zero_weights(s);
    Matrix x = random_matrix(5, 4, 2);
    Matrix y = mlp_forward(s, cfg, x);
    REQUIRE(y.rows() == 5);
    REQUIRE(y.cols() == 2);
    for (Eigen::Index i = 0; i < y.size(); ++i) CHECK(y.data()[i] == 0.5);
}

TEST_CASE("identity one-layer linear net") {
    auto cfg = small_net(3, 1, 3);
    auto s = init_mlp(cfg, 1);
    s.W[0] = Matrix::Identity(3, 3);
    s.b[0].setZero();
    Matrix x = random_matrix(7, 3, 3);
    Matrix y = mlp_forward(s, cfg, x);
    CHECK((y - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-layer net matches dense matmul oracle") {
    auto cfg = small_net(5, 2, 3);
    auto s = init_mlp(cfg, 10);
    Matrix x = random_matrix(9, 5, 11);
    Matrix y = mlp_forward(s, cfg, x);

    // scalar-loop oracle
    for (int r = 0; r < 9; ++r) {
        std::vector<double> h(16);
        for (int i = 0; i < 16; ++i) {
            double z = s.b[0](i);
            for (int j = 0; j < 5; ++j) z += s.W[0](i, j) * x(r, j);
            h[i] = std::max(0.0, z);
        }
        for (int i = 0; i < 3; ++i) {
            double z = s.b[1](i);
            for (int j = 0; j < 16; ++j) z += s.W[1](i, j) * h[j];
            REQUIRE(y(r, i) == Catch::Approx(z).margin(1e-12));
        }
    }
}

TEST_CASE("forward is deterministic") {
    auto cfg = small_net(4, 3, 2, OutputKind::Softplus);
    auto s = init_mlp(cfg, 77);
    Matrix x = random_matrix(6, 4, 5);
    Matrix y1 = mlp_forward(s, cfg, x);
    Matrix y2 = mlp_forward(s, cfg, x);
    CHECK((y1 - y2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("softplus overflow safety") {
    CHECK(softplus(50.0) == Catch::Approx(50.0).margin(1e-9));
    CHECK(softplus(1000.0) == 1000.0);
    CHECK(softplus(0.0) == Catch::Approx(std::log(2.0)));
    CHECK(softplus(-1000.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(std::isfinite(softplus(700.0)));
}

TEST_CASE("linear net weight gradient is input^T * ones") {
    auto cfg = small_net(4, 1, 2);
    auto s = init_mlp(cfg, 3);
    Matrix x = random_matrix(6, 4, 8);
    MLPTape tape;
    mlp_forward(s, cfg, x, Matrix(), &tape);
    Matrix dout = Matrix::Ones(6, 2);  // loss = sum(output)
    auto g = mlp_backward(s, cfg, tape, dout);
    Matrix expect = dout.transpose() * x;
    CHECK((g.dW[0] - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g.db[0] - Vector::Constant(2, 6.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("relu at exactly zero uses subgradient zero") {
    auto cfg = small_net(1, 2, 1);
    auto s = init_mlp(cfg, 4);
    zero_weights(s);  // z = 0 at the hidden layer exactly
    s.W[1].setOnes();
    Matrix x = Matrix::Constant(1, 1, 3.0);
    MLPTape tape;
    mlp_forward(s, cfg, x, Matrix(), &tape);
    auto g = mlp_backward(s, cfg, tape, Matrix::Ones(1, 1));
    CHECK(g.dW[0].cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.dx(0, 0) == 0.0);
}

namespace {

// FD check helper: random net + quadratic loss sum(y^2)/2. Wide nets keep
// their fan-in-scaled init so activations stay O(1); oversized weights push
// the quadratic loss into the regime where central differences lose accuracy.
void fd_check(const MLPConfig &cfg, uint64_t seed, double tol, int max_per_block = 40,
              bool rerandomize = true) {
    auto s = init_mlp(cfg, seed);
    if (rerandomize) randomize(s, seed + 1);
    Matrix x = random_matrix(8, cfg.input_dim, seed + 2);
    Matrix aux;
    if (cfg.aux_dim > 0) aux = random_matrix(8, cfg.aux_dim, seed + 3);

    auto loss_value = [&]() {
        Matrix y = mlp_forward(s, cfg, x, aux);
        return 0.5 * y.squaredNorm();
    };
    MLPTape tape;
    Matrix y = mlp_forward(s, cfg, x, aux, &tape);
    auto grads = mlp_backward(s, cfg, tape, y);

    auto report = gradient_check(s, cfg, loss_value, grads, tol, max_per_block);
    INFO("max rel error " << report.max_rel_error);
    REQUIRE(report.passed);
}

}  // namespace

TEST_CASE("gradients match finite differences") {
    SECTION("plain linear") { fd_check(small_net(3, 1, 2), 21, 1e-7); }
    SECTION("deep relu with sigmoid head") {
        auto cfg = small_net(5, 4, 3, OutputKind::Sigmoid);
        cfg.skip_layer = 2;
        fd_check(cfg, 22, 1e-4);
    }
    SECTION("aux features at inner layer") {
        auto cfg = small_net(4, 4, 2, OutputKind::Softplus);
        cfg.aux_dim = 3;
        cfg.aux_layer = 2;
        cfg.skip_layer = 1;
        fd_check(cfg, 23, 1e-4);
    }
    SECTION("aux at input plus skip ride-through") {
        auto cfg = small_net(4, 3, 2);
        cfg.aux_dim = 2;
        cfg.aux_layer = 0;
        cfg.skip_layer = 2;
        fd_check(cfg, 24, 1e-4);
    }
    SECTION("full-width 6x128 net with softplus head") {
        MLPConfig cfg;
        cfg.input_dim = 20;
        cfg.width = 128;
        cfg.depth = 6;
        cfg.skip_layer = 2;
        cfg.output = {{OutputKind::Softplus, 3, 0.5, 1.0}};
        fd_check(cfg, 25, 1e-4, 8, false);
    }
    SECTION("mixed output segments") {
        MLPConfig cfg;
        cfg.input_dim = 6;
        cfg.width = 16;
        cfg.depth = 3;
        cfg.output = {{OutputKind::Softplus, 3, 0.5, 1.0}, {OutputKind::Sigmoid, 3, 1.0, 0.5}};
        fd_check(cfg, 26, 1e-4);
    }
}

TEST_CASE("gradient_check flags corrupted gradients") {
    auto cfg = small_net(3, 2, 2);
    auto s = init_mlp(cfg, 31);
    randomize(s, 32);
    Matrix x = random_matrix(4, 3, 33);
    auto loss_value = [&]() {
        Matrix y = mlp_forward(s, cfg, x);
        return 0.5 * y.squaredNorm();
    };
    MLPTape tape;
    Matrix y = mlp_forward(s, cfg, x, Matrix(), &tape);
    auto grads = mlp_backward(s, cfg, tape, y);
    grads.dW[0](0, 0) += 0.5;  // corrupt
    auto report = gradient_check(s, cfg, loss_value, grads, 1e-4, 1000);
    CHECK_FALSE(report.passed);
    CHECK(report.max_rel_error > 1e-4);
}

TEST_CASE("input gradient matches finite differences") {
    auto cfg = small_net(4, 3, 2, OutputKind::Sigmoid);
    cfg.skip_layer = 1;
    auto s = init_mlp(cfg, 41);
    randomize(s, 42);
    Matrix x = random_matrix(3, 4, 43);

    MLPTape tape;
    Matrix y = mlp_forward(s, cfg, x, Matrix(), &tape);
    auto g = mlp_backward(s, cfg, tape, y);

    double h = 1e-5;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) {
            Matrix xp = x, xm = x;
            xp(r, c) += h;
            xm(r, c) -= h;
            double lp = 0.5 * mlp_forward(s, cfg, xp).squaredNorm();
            double lm = 0.5 * mlp_forward(s, cfg, xm).squaredNorm();
            double fd = (lp - lm) / (2 * h);
            REQUIRE(g.dx(r, c) == Catch::Approx(fd).margin(1e-7));
        }
}

TEST_CASE("adam first step moves by about -lr * sign(g)") {
    auto cfg = small_net(2, 1, 1);
    auto s = init_mlp(cfg, 51);
    randomize(s, 52);
    Matrix w0 = s.W[0];
    Vector b0 = s.b[0];
    MLPGrads g;
    g.dW = {Matrix::Constant(1, 2, 0.37)};
    g.db = {Vector::Constant(1, -0.9)};
    AdamConfig ac;
    ac.lr = 1e-3;
    adam_step(s, g, ac);
    CHECK(s.step == 1);
    // first bias-corrected step: -lr * g / (|g| + eps) ~ -lr * sign(g)
    CHECK(s.W[0](0, 0) - w0(0, 0) == Catch::Approx(-1e-3).epsilon(1e-3));
    CHECK(s.b[0](0) - b0(0) == Catch::Approx(1e-3).epsilon(1e-3));
}

TEST_CASE("adam with zero gradient leaves fresh parameters unchanged") {
    auto cfg = small_net(2, 1, 1);
    auto s = init_mlp(cfg, 53);
    randomize(s, 54);
    // first a nonzero step so the moments are nonzero, then verify decay
    MLPGrads g;
    g.dW = {Matrix::Constant(1, 2, 1.0)};
    g.db = {Vector::Constant(1, 1.0)};
    adam_step(s, g, {});
    Matrix m1 = s.mW[0];

    MLPGrads zero;
    zero.dW = {Matrix::Zero(1, 2)};
    zero.db = {Vector::Zero(1)};
    AdamConfig ac;
    adam_step(s, zero, ac);
    CHECK(s.mW[0](0, 0) == Catch::Approx(ac.beta1 * m1(0, 0)));

    // with all-zero moments the zero-grad update is exactly zero
    MLPState fresh = init_mlp(cfg, 55);
    Matrix wf = fresh.W[0];
    adam_step(fresh, zero, ac);
    CHECK((fresh.W[0] - wf).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adam reproduces a scalar two-step trace") {
    // hand-rolled oracle for two iterations on a single parameter
    double g1 = 0.2, g2 = -0.1;
    double lr = 1e-2, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double m = 0, v = 0;
    m = b1 * m + (1 - b1) * g1;
    v = b2 * v + (1 - b2) * g1 * g1;
    double w1 = 0.3 - lr * (m / (1 - b1)) / (std::sqrt(v / (1 - b2)) + eps);
    m = b1 * m + (1 - b1) * g2;
    v = b2 * v + (1 - b2) * g2 * g2;
    double w2 = w1 - lr * (m / (1 - b1 * b1)) / (std::sqrt(v / (1 - b2 * b2)) + eps);

    auto cfg = small_net(1, 1, 1);
    auto s = init_mlp(cfg, 61);
    s.W[0](0, 0) = 0.3;
    MLPGrads ga, gb;
    ga.dW = {Matrix::Constant(1, 1, g1)};
    ga.db = {Vector::Zero(1)};
    gb.dW = {Matrix::Constant(1, 1, g2)};
    gb.db = {Vector::Zero(1)};
    AdamConfig ac{lr, b1, b2, eps};
    adam_step(s, ga, ac);
    CHECK(s.W[0](0, 0) == Catch::Approx(w1).margin(1e-9));
    adam_step(s, gb, ac);
    CHECK(s.W[0](0, 0) == Catch::Approx(w2).margin(1e-9));
}

TEST_CASE("mlp checkpoint round trip") {
    MLPConfig cfg;
    cfg.input_dim = 7;
    cfg.aux_dim = 4;
    cfg.aux_layer = 1;
    cfg.width = 16;
    cfg.depth = 3;
    cfg.skip_layer = 2;
    cfg.output = {{OutputKind::Softplus, 3, 0.5, 1.0}, {OutputKind::Sigmoid, 3, 1.0, 1.0}};
    auto s = init_mlp(cfg, 71);
    randomize(s, 72);
    s.step = 1234;

    std::stringstream buf;
    write_mlp(buf, cfg, s);
    MLPConfig cfg2;
    MLPState s2;
    read_mlp(buf, cfg2, s2);

    CHECK(cfg2.input_dim == cfg.input_dim);
    CHECK(cfg2.skip_layer == cfg.skip_layer);
    CHECK(cfg2.output.size() == 2);
    CHECK(cfg2.output[0].scale == 0.5);
    CHECK(s2.step == 1234);
    for (int k = 0; k < cfg.depth; ++k) {
        REQUIRE((s2.W[k] - s.W[k]).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE((s2.b[k] - s.b[k]).cwiseAbs().maxCoeff() == 0.0);
    }

    Matrix x = random_matrix(4, 7, 73), aux = random_matrix(4, 4, 74);
    CHECK((mlp_forward(s, cfg, x, aux) - mlp_forward(s2, cfg2, x, aux)).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("shape mismatches raise") {
    auto cfg = small_net(4, 2, 2);
    auto s = init_mlp(cfg, 81);
    CHECK_THROWS_AS(mlp_forward(s, cfg, Matrix::Zero(3, 5)), std::invalid_argument);

    MLPTape tape;
    mlp_forward(s, cfg, Matrix::Zero(3, 4), Matrix(), &tape);
    CHECK_THROWS_AS(mlp_backward(s, cfg, tape, Matrix::Zero(3, 7)), std::invalid_argument);

    MLPGrads bad;
    bad.dW = {Matrix::Zero(1, 1), Matrix::Zero(1, 1)};
    bad.db = {Vector::Zero(1), Vector::Zero(1)};
    CHECK_THROWS_AS(adam_step(s, bad, {}), std::invalid_argument);
}

TEST_CASE("parameter count formula") {
    MLPConfig cfg;
    cfg.input_dim = 10;
    cfg.aux_dim = 5;
    cfg.aux_layer = 0;
    cfg.width = 32;
    cfg.depth = 4;
    cfg.skip_layer = 2;
    cfg.output = {{OutputKind::Linear, 7, 1.0, 1.0}};
    auto s = init_mlp(cfg, 91);
    std::int64_t total = 0;
    for (int k = 0; k < cfg.depth; ++k) total += s.W[k].size() + s.b[k].size();
    CHECK(total == cfg.parameter_count());
    // layer widths by hand: L0 in=15, L1 in=32, L2 in=32+15 (skip carries aux), L3 in=32
    CHECK(s.W[0].cols() == 15);
    CHECK(s.W[2].cols() == 47);
    CHECK(s.W[3].rows() == 7);
}
