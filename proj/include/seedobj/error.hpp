// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace seedobj {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a documented precondition (bad seeds, shape mismatch, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, decoded or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace seedobj
