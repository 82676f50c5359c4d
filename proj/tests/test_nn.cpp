// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference checks of every differentiable op, plus the optimizer,
// parameter store and checkpoint format.

#include <cmath>
#include <fstream>
#include <cstring>
#include <functional>

#include "doctest.h"
#include "remus/error.hpp"
#include "remus/graph_ops.hpp"
#include "remus/hierarchy.hpp"
#include "remus/nn/checkpoint.hpp"
#include "remus/nn/layers.hpp"
#include "remus/nn/mlp.hpp"
#include "remus/nn/optim.hpp"
#include "remus/nn/param_store.hpp"
#include "support.hpp"

using namespace remus;
using namespace remus::nn;

namespace {

using Op = std::function<Var(Tape&, const std::vector<Var>&)>;

// Scalar probe sum(weights .* out), recorded so backward() seeds from it.
Var probe(Tape& tape, const Var& out, const Matrix& weights) {
    Matrix v(1, 1);
    v(0, 0) = out.value().cwiseProduct(weights).sum();
    auto node = out.node();
    return tape.record(std::move(v), {&out}, [node, weights](const Matrix& g) { grad_buffer(*node) += g(0, 0) * weights; });
}

// Max relative error between tape gradients and central differences of the
// probe with respect to every input entry.
double gradient_error(const std::vector<Matrix>& inputs, const Op& op, double step = 1e-6) {
    std::vector<Matrix> grads;
    for (const Matrix& m : inputs) grads.push_back(Matrix::Zero(m.rows(), m.cols()));
    Matrix weights;
    {
        Tape tape(true);
        std::vector<Var> vars;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            Matrix* g = &grads[i];
            vars.push_back(tape.leaf(inputs[i], [g](const Matrix& d) { *g += d; }));
        }
        const Var out = op(tape, vars);
        weights = test::random_matrix(99, out.rows(), out.cols());
        tape.backward(probe(tape, out, weights));
    }
    auto evaluate = [&](const std::vector<Matrix>& in) {
        Tape tape(false);
        std::vector<Var> vars;
        for (const Matrix& m : in) vars.push_back(tape.constant(m));
        return op(tape, vars).value().cwiseProduct(weights).sum();
    };
    double worst = 0.0;
    std::vector<Matrix> work = inputs;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (Eigen::Index k = 0; k < inputs[i].size(); ++k) {
            const double x = inputs[i].data()[k];
            work[i].data()[k] = x + step;
            const double up = evaluate(work);
            work[i].data()[k] = x - step;
            const double down = evaluate(work);
            work[i].data()[k] = x;
            const double fd = (up - down) / (2.0 * step);
            const double an = grads[i].data()[k];
            worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(fd) + std::abs(an)));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("gradients: linear with gathered terms") {
    const auto a = GatherIndex::make({0, 2, 2, 1, 0}, 3);
    const auto b = GatherIndex::make({1, 1, 0, 0, 1}, 2);
    const std::vector<Matrix> in{test::random_matrix(1, 5, 3), test::random_matrix(2, 3, 2), test::random_matrix(3, 2, 4),
                                 test::random_matrix(4, 3, 4), test::random_matrix(5, 2, 4), test::random_matrix(6, 4, 4),
                                 test::random_matrix(7, 1, 4)};
    const double err = gradient_error(in, [&](Tape& t, const std::vector<Var>& v) {
        const LinearTerm terms[] = {{v[0], nullptr, v[3]}, {v[1], a, v[4]}, {v[2], b, v[5]}};
        return linear(t, terms, v[6]);
    });
    CHECK(err < 1e-8);
}

TEST_CASE("linear with gathers equals the explicit concatenation") {
    const auto idx = GatherIndex::make({2, 0, 1, 2}, 3);
    const Matrix x0 = test::random_matrix(1, 4, 2), x1 = test::random_matrix(2, 3, 3);
    const Matrix w = test::random_matrix(3, 5, 6), b = test::random_matrix(4, 1, 6);
    Tape tape(false);
    const LinearTerm terms[] = {{tape.constant(x0), nullptr, tape.constant(w.topRows(2))},
                                {tape.constant(x1), idx, tape.constant(w.bottomRows(3))}};
    const Matrix out = linear(tape, terms, tape.constant(b)).value();
    Matrix cat(4, 5);
    for (int r = 0; r < 4; ++r) {
        cat.row(r).head(2) = x0.row(r);
        cat.row(r).tail(3) = x1.row(idx->index[r]);
    }
    const Matrix ref = (cat * w).rowwise() + b.row(0);
    CHECK(test::max_abs(out - ref) < 1e-13);
}

TEST_CASE("gradients: selu, layer norm and block mean") {
    Matrix x = test::random_matrix(8, 6, 5);
    x(0, 0) = 1e-3;  // near the kink
    CHECK(gradient_error({x}, [](Tape& t, const std::vector<Var>& v) { return selu(t, v[0]); }) < 1e-7);
    const std::vector<Matrix> ln{x, test::random_matrix(9, 1, 5), test::random_matrix(10, 1, 5)};
    CHECK(gradient_error(ln, [](Tape& t, const std::vector<Var>& v) { return layer_norm(t, v[0], v[1], v[2]); }) < 1e-7);
    CHECK(gradient_error({x}, [](Tape& t, const std::vector<Var>& v) { return block_mean(t, v[0], 3); }) < 1e-9);
}

TEST_CASE("selu and layer norm values") {
    CHECK(selu(1.0) == doctest::Approx(kSeluLambda));
    CHECK(selu(-1.0) == doctest::Approx(kSeluLambda * kSeluAlpha * (std::exp(-1.0) - 1.0)));
    const Matrix x = test::random_matrix(11, 7, 9, 3.0);
    const Matrix y = normalize_rows(x, Eigen::RowVectorXd::Ones(9), Eigen::RowVectorXd::Zero(9));
    for (int r = 0; r < 7; ++r) {
        CHECK(std::abs(y.row(r).mean()) < 1e-12);
        const double var = (y.row(r).array() - y.row(r).mean()).square().mean();
        CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
    }
    // Constant rows stay finite.
    const Matrix c = Matrix::Constant(2, 4, 3.0);
    CHECK(normalize_rows(c, Eigen::RowVectorXd::Ones(4), Eigen::RowVectorXd::Zero(4)).allFinite());
}

TEST_CASE("gradients: aggregate, interpolate and project") {
    // Linear ops: a wide step only reduces roundoff.
    const NodeSet nodes = test::random_nodes(12, 40);
    const EdgeSet edges = build_knn_edges(nodes, 5);
    const PinvTable pinv = pinv_blocks(edges);
    const Matrix e = test::random_matrix(13, static_cast<Eigen::Index>(edges.size()), 3);
    CHECK(gradient_error({e}, [&](Tape& t, const std::vector<Var>& v) { return graph::aggregate(t, v[0], pinv); }, 1e-2) < 1e-9);
    const Matrix w = test::random_matrix(14, 40, 6);
    CHECK(gradient_error({w}, [&](Tape& t, const std::vector<Var>& v) { return graph::project(t, v[0], edges); }, 1e-2) < 1e-9);
    const NodeSet coarse = test::random_nodes(15, 12);
    const auto stencils = interp_weights(nodes.coords, coarse.coords);
    const auto plan = graph::InterpPlan::make(stencils, 12);
    const Matrix c = test::random_matrix(16, 12, 4);
    CHECK(gradient_error({c}, [&](Tape& t, const std::vector<Var>& v) { return graph::interpolate(t, v[0], plan); }, 1e-2) < 1e-9);
}

TEST_CASE("mlp forward matches single-vector evaluation and differentiates") {
    ParamStore store;
    const Mlp mlp = Mlp::create(store, "m", {4, 6, 6, 3}, true);
    mlp.initialize(store, 3);
    CHECK(store.size() == 4 * 6 + 6 + 6 * 6 + 6 + 6 * 3 + 3 + 3 + 3);
    const Matrix x = test::random_matrix(17, 5, 4);
    Tape tape(false);
    const Matrix out = mlp.forward(tape, store, tape.constant(x)).value();
    for (int r = 0; r < 5; ++r) {
        const std::vector<double> row(x.row(r).data(), x.row(r).data() + 4);
        const std::vector<double> ref = mlp_forward(mlp, store, row);
        for (int c = 0; c < 3; ++c) CHECK(out(r, c) == doctest::Approx(ref[c]).epsilon(1e-12));
    }

    // Parameter gradients by central differences.
    store.zero_grad();
    const Matrix weights = test::random_matrix(18, 5, 3);
    {
        Tape t(true);
        const Var o = mlp.forward(t, store, t.constant(x));
        t.backward(probe(t, o, weights));
    }
    const std::vector<double> analytic(store.grads().begin(), store.grads().end());
    auto value = [&] {
        Tape t(false);
        return mlp.forward(t, store, t.constant(x)).value().cwiseProduct(weights).sum();
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < store.size(); ++i) {
        double& p = store.values()[i];
        const double keep = p;
        p = keep + 1e-6;
        const double up = value();
        p = keep - 1e-6;
        const double down = value();
        p = keep;
        const double fd = (up - down) / 2e-6;
        worst = std::max(worst, std::abs(fd - analytic[i]) / std::max(1.0, std::abs(fd) + std::abs(analytic[i])));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("mlp initialization is seeded per parameter") {
    ParamStore a, b;
    const Mlp ma = Mlp::create(a, "x", {200, 300, 2}, false);
    const Mlp mb = Mlp::create(b, "x", {200, 300, 2}, false);
    ma.initialize(a, 5);
    mb.initialize(b, 5);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    const auto w = a.values(a.find("x.w0"));
    double sq = 0.0;
    for (double v : w) sq += v * v;
    CHECK(sq / static_cast<double>(w.size()) == doctest::Approx(1.0 / 200).epsilon(0.02));
    for (double v : a.values(a.find("x.b0"))) CHECK(v == 0.0);
    mb.initialize(b, 6);
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST_CASE("adam step matches the bias-corrected update") {
    std::vector<double> p{1.0, -2.0, 0.5};
    const std::vector<double> g{0.1, -0.3, 0.0};
    AdamState s(3, 1e-2);
    adam_step(p, g, s);
    adam_step(p, g, s);
    // Two identical gradients: m_hat = g, v_hat = g^2, so each step moves lr * g / (|g| + eps).
    const std::vector<double> start{1.0, -2.0, 0.5};
    for (int i = 0; i < 3; ++i) {
        const double step = g[i] == 0.0 ? 0.0 : 1e-2 * g[i] / (std::abs(g[i]) + 1e-8);
        CHECK(p[i] == doctest::Approx(start[i] - 2.0 * step).epsilon(1e-12));
    }
    CHECK(s.step == 2);
}

TEST_CASE("gradient clipping rescales to the max norm") {
    std::vector<double> g{3.0, 4.0};
    CHECK(clip_gradients(g, 1.0) == doctest::Approx(5.0));
    CHECK(g[0] == doctest::Approx(0.6));
    CHECK(g[1] == doctest::Approx(0.8));
    std::vector<double> small{0.3, 0.4};
    CHECK(clip_gradients(small, 1.0) == doctest::Approx(0.5));
    CHECK(small[0] == 0.3);
    CHECK(frobenius_norm(small) == doctest::Approx(0.5));
}

TEST_CASE("checkpoint roundtrip and error handling") {
    test::TempDir dir;
    ParamStore store;
    const Mlp mlp = Mlp::create(store, "net", {3, 5, 2}, true);
    mlp.initialize(store, 9);
    store.values()[0] = -0.0;
    store.values()[1] = 1e-310;
    save_checkpoint(dir / "c.remus", store, {{"note", "x"}});
    const Checkpoint ck = load_checkpoint(dir / "c.remus");
    CHECK(ck.header["note"] == "x");
    ParamStore other;
    Mlp::create(other, "net", {3, 5, 2}, true);
    restore(other, ck);
    CHECK(std::memcmp(other.values().data(), store.values().data(), store.size() * sizeof(double)) == 0);

    ParamStore wrong;
    Mlp::create(wrong, "net", {3, 4, 2}, true);
    CHECK_THROWS_AS(restore(wrong, ck), Error);

    std::string bytes;
    {
        std::ifstream in(dir / "c.remus", std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto code_for = [&](const std::string& content) {
        std::ofstream(dir / "bad.remus", std::ios::binary) << content;
        try {
            load_checkpoint(dir / "bad.remus");
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    CHECK(code_for(bytes.substr(0, bytes.size() - 3)) == ErrorCode::ParseError);
    CHECK(code_for("NOTACHECKPOINT") == ErrorCode::ParseError);
    std::string v2 = bytes;
    v2[5] = '2';
    CHECK(code_for(v2) == ErrorCode::VersionMismatch);
}

TEST_CASE("little-endian float helpers") {
    std::vector<char> out;
    write_f64_le(out, 1.0);
    REQUIRE(out.size() == 8);
    CHECK(static_cast<unsigned char>(out[7]) == 0x3f);
    CHECK(static_cast<unsigned char>(out[6]) == 0xf0);
    CHECK(read_f64_le(out.data()) == 1.0);
}

TEST_CASE("non-recording tapes keep nothing") {
    Tape tape(false);
    const Var x = tape.leaf(test::random_matrix(1, 3, 3), [](const Matrix&) {});
    const Var y = selu(tape, x);
    CHECK(tape.size() == 0);
    CHECK_FALSE(y.needs_grad());
}
