// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "remus/kernels.hpp"
#include "remus/nn/tape.hpp"

namespace remus::nn {

inline constexpr double kSeluLambda = 1.0507009873554804934193349852946;
inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
/// Added to the variance inside the square root: the std floor is 1e-5.
inline constexpr double kNormEpsilon = 1e-10;

/// Row selection: row r of the gathered table is table[index[r]].
struct GatherIndex {
    std::vector<std::uint32_t> index;
    kernels::ScatterPlan plan;
    std::size_t table_rows = 0;

    static std::shared_ptr<const GatherIndex> make(std::vector<std::uint32_t> index, std::size_t table_rows);
    std::size_t rows() const { return index.size(); }
};

/// One column block of a linear layer's input: gather(input) * weight.
struct LinearTerm {
    Var input;
    std::shared_ptr<const GatherIndex> gather;  // null: rows used as-is
    Var weight;
};

/// sum_s gather_s(X_s) W_s + b. The product X_s W_s is formed before the
/// gather, so a table reused by many rows is multiplied once.
Var linear(Tape& tape, std::span<const LinearTerm> terms, const Var& bias);
Var linear(Tape& tape, const Var& x, const Var& weight, const Var& bias);

Var selu(Tape& tape, const Var& x);

/// Per-row normalization to zero mean and unit variance, then gain * x + shift.
Var layer_norm(Tape& tape, const Var& x, const Var& gain, const Var& shift);

/// Mean over consecutive groups of `block` rows.
Var block_mean(Tape& tape, const Var& x, std::size_t block);

/// Plain evaluation helpers shared with tests.
double selu(double x);
Matrix normalize_rows(const Matrix& x, const Eigen::RowVectorXd& gain, const Eigen::RowVectorXd& shift);

}  // namespace remus::nn
