// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace remus {

/// Row-major dense block; rows are graph items (nodes, edges, angles), columns features.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace remus
