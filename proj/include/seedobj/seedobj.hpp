// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "seedobj/bridge.hpp"
#include "seedobj/error.hpp"
#include "seedobj/eval.hpp"
#include "seedobj/grid.hpp"
#include "seedobj/losses.hpp"
#include "seedobj/objectness.hpp"
#include "seedobj/preprocess.hpp"
#include "seedobj/reference.hpp"
#include "seedobj/synth.hpp"
#include "seedobj/tensor_io.hpp"
#include "seedobj/version.hpp"
