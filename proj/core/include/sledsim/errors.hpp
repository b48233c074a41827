// Copyright 2026 The sledsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace sledsim {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A density matrix or Bloch vector failed a validity check.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent run or grid configuration (caller error, CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Quadrature, integration or other numerical failure (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A nonlinear least-squares fit did not converge or was rejected.
class FitFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sledsim
