// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/cli.hpp"

int main(int argc, char** argv) { return remus::cli::run(argc, argv); }
