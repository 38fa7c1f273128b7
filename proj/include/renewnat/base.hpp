// Copyright 2026 The renewnat Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Build-wide scalar selection and error types.
//
// The library is compiled twice: once with 32-bit floats (the default, used
// for training and decoding) and once with RENEWNAT_SCALAR_F64 defined (used
// only by the gradient-checking suites). The two builds live in distinct
// inline namespaces so both can be linked into one binary.

#ifndef RENEWNAT_BASE_HPP_
#define RENEWNAT_BASE_HPP_

#include <stdexcept>
#include <string>

#ifdef RENEWNAT_SCALAR_F64
#define RENEWNAT_NAMESPACE_BEGIN \
  namespace renewnat {           \
  inline namespace f64 {
#else
#define RENEWNAT_NAMESPACE_BEGIN \
  namespace renewnat {           \
  inline namespace f32 {
#endif
#define RENEWNAT_NAMESPACE_END \
  }                            \
  }

RENEWNAT_NAMESPACE_BEGIN

#ifdef RENEWNAT_SCALAR_F64
using Scalar = double;
#else
using Scalar = float;
#endif

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Array dimension mismatch or invalid axis.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A sequence exceeds max_len or an empty sequence where one is required.
class LengthError : public Error {
 public:
  using Error::Error;
};

// Invalid model / training / decoding configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A loss had no contributing positions. Callers treat this as "skip batch".
class DegenerateBatchError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Internal contract broken (e.g. Adam step with missing gradients).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

RENEWNAT_NAMESPACE_END

#endif  // RENEWNAT_BASE_HPP_
