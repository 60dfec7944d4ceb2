// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace saf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an API precondition (bad seed node, wrong feature length...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// The requested kernel or oracle does not provide the needed capability.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed registry, program, dataset or model text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A file was written by an incompatible format version.
class FormatVersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch or similar failure while evaluating a graph node.
class EvalError : public Error {
 public:
  EvalError(std::string node, const std::string& what)
      : Error("node '" + node + "': " + what), node_(std::move(node)) {}

  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

/// Dataset generation could not produce enough samples of every class.
class GenerationError : public Error {
 public:
  GenerationError(std::string kernel, const std::string& what)
      : Error("dataset generation for '" + kernel + "' failed: " + what),
        kernel_(std::move(kernel)) {}

  const std::string& kernel() const noexcept { return kernel_; }

 private:
  std::string kernel_;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace saf
