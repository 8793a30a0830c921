// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace seedobj {

inline constexpr const char* version = "0.3.0";

} // namespace seedobj
