// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

int main(int argc, char** argv) { return seedobj::cli::run(argc, argv); }
