// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/nn/layers.hpp"

#include <cmath>
#include <string>

#include "remus/error.hpp"

namespace remus::nn {

std::shared_ptr<const GatherIndex> GatherIndex::make(std::vector<std::uint32_t> index, std::size_t table_rows) {
    auto g = std::make_shared<GatherIndex>();
    g->plan = kernels::ScatterPlan::build(index, table_rows);
    g->index = std::move(index);
    g->table_rows = table_rows;
    return g;
}

Var linear(Tape& tape, std::span<const LinearTerm> terms, const Var& bias) {
    if (terms.empty()) throw Error(ErrorCode::InvalidArgument, "linear layer without inputs");
    const Eigen::Index out_cols = bias.cols();
    const Eigen::Index rows =
        terms[0].gather ? static_cast<Eigen::Index>(terms[0].gather->rows()) : terms[0].input.rows();
    Matrix out = bias.value().replicate(rows, 1);
    for (const LinearTerm& t : terms) {
        if (t.weight.rows() != t.input.cols() || t.weight.cols() != out_cols) {
            throw Error(ErrorCode::InvalidArgument, "linear: input width " + std::to_string(t.input.cols()) +
                                                        " does not match weight " + std::to_string(t.weight.rows()) +
                                                        "x" + std::to_string(t.weight.cols()));
        }
        if (t.gather) {
            if (static_cast<Eigen::Index>(t.gather->rows()) != rows ||
                static_cast<Eigen::Index>(t.gather->table_rows) != t.input.rows()) {
                throw Error(ErrorCode::InvalidArgument, "linear: gather shape mismatch");
            }
            Matrix y = t.input.value() * t.weight.value();
            kernels::active::gather_add(y.data(), static_cast<std::size_t>(out_cols), t.gather->index, out.data());
        } else {
            if (t.input.rows() != rows) throw Error(ErrorCode::InvalidArgument, "linear: row count mismatch");
            out.noalias() += t.input.value() * t.weight.value();
        }
    }

    std::vector<const Var*> parents{&bias};
    for (const LinearTerm& t : terms) {
        parents.push_back(&t.input);
        parents.push_back(&t.weight);
    }
    std::vector<LinearTerm> saved(terms.begin(), terms.end());
    return tape.record(std::move(out), parents, [saved, bias](const Matrix& g) {
        if (bias.needs_grad()) grad_buffer(*bias.node()) += g.colwise().sum();
        for (const LinearTerm& t : saved) {
            if (!t.input.needs_grad() && !t.weight.needs_grad()) continue;
            Matrix scattered;
            const Matrix* dy = &g;
            if (t.gather) {
                scattered = Matrix::Zero(t.input.rows(), g.cols());
                kernels::active::scatter_add(g.data(), static_cast<std::size_t>(g.cols()), t.gather->index,
                                             t.gather->plan, scattered.data());
                dy = &scattered;
            }
            if (t.weight.needs_grad()) grad_buffer(*t.weight.node()).noalias() += t.input.value().transpose() * *dy;
            if (t.input.needs_grad()) grad_buffer(*t.input.node()).noalias() += *dy * t.weight.value().transpose();
        }
    });
}

Var linear(Tape& tape, const Var& x, const Var& weight, const Var& bias) {
    const LinearTerm term{x, nullptr, weight};
    return linear(tape, std::span<const LinearTerm>(&term, 1), bias);
}

double selu(double x) { return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x); }

Var selu(Tape& tape, const Var& x) {
    Matrix out = x.value().unaryExpr([](double v) { return selu(v); });
    return tape.record(std::move(out), {&x}, [x](const Matrix& g) {
        const Matrix& in = x.value();
        Matrix& dx = grad_buffer(*x.node());
        const Eigen::Index n = in.size();
        const double* a = in.data();
        const double* gd = g.data();
        double* d = dx.data();
        for (Eigen::Index i = 0; i < n; ++i) {
            d[i] += gd[i] * (a[i] > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(a[i]));
        }
    });
}

Matrix normalize_rows(const Matrix& x, const Eigen::RowVectorXd& gain, const Eigen::RowVectorXd& shift) {
    const Eigen::Index cols = x.cols();
    Matrix out(x.rows(), cols);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double mean = x.row(r).mean();
        const double var = (x.row(r).array() - mean).square().sum() / static_cast<double>(cols);
        const double inv = 1.0 / std::sqrt(var + kNormEpsilon);
        out.row(r) = ((x.row(r).array() - mean) * inv) * gain.array() + shift.array();
    }
    return out;
}

Var layer_norm(Tape& tape, const Var& x, const Var& gain, const Var& shift) {
    const Eigen::Index rows = x.rows();
    const Eigen::Index cols = x.cols();
    auto xhat = std::make_shared<Matrix>(rows, cols);
    auto inv_std = std::make_shared<Eigen::VectorXd>(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double mean = x.value().row(r).mean();
        const double var = (x.value().row(r).array() - mean).square().sum() / static_cast<double>(cols);
        (*inv_std)(r) = 1.0 / std::sqrt(var + kNormEpsilon);
        xhat->row(r) = (x.value().row(r).array() - mean) * (*inv_std)(r);
    }
    Matrix out = (xhat->array().rowwise() * gain.value().row(0).array()).rowwise() + shift.value().row(0).array();
    return tape.record(std::move(out), {&x, &gain, &shift}, [x, gain, shift, xhat, inv_std](const Matrix& g) {
        if (gain.needs_grad()) grad_buffer(*gain.node()) += (g.array() * xhat->array()).colwise().sum().matrix();
        if (shift.needs_grad()) grad_buffer(*shift.node()) += g.colwise().sum();
        if (!x.needs_grad()) return;
        Matrix& dx = grad_buffer(*x.node());
        const double cols_d = static_cast<double>(g.cols());
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            const Eigen::ArrayXd dxhat = (g.row(r).array() * gain.value().row(0).array()).transpose();
            const Eigen::ArrayXd xh = xhat->row(r).array().transpose();
            const double mean_d = dxhat.sum() / cols_d;
            const double mean_dx = (dxhat * xh).sum() / cols_d;
            dx.row(r).array() += ((dxhat - mean_d - xh * mean_dx) * (*inv_std)(r)).transpose();
        }
    });
}

Var block_mean(Tape& tape, const Var& x, std::size_t block) {
    if (block == 0 || x.rows() % static_cast<Eigen::Index>(block) != 0) {
        throw Error(ErrorCode::InvalidArgument, "block_mean: rows not divisible by block size");
    }
    const Eigen::Index groups = x.rows() / static_cast<Eigen::Index>(block);
    const double scale = 1.0 / static_cast<double>(block);
    Matrix out = Matrix::Zero(groups, x.cols());
    for (Eigen::Index g = 0; g < groups; ++g) {
        for (std::size_t m = 0; m < block; ++m) out.row(g) += x.value().row(g * static_cast<Eigen::Index>(block) + m);
        out.row(g) *= scale;
    }
    return tape.record(std::move(out), {&x}, [x, block, scale](const Matrix& g) {
        Matrix& dx = grad_buffer(*x.node());
        for (Eigen::Index r = 0; r < dx.rows(); ++r) dx.row(r) += scale * g.row(r / static_cast<Eigen::Index>(block));
    });
}

}  // namespace remus::nn
