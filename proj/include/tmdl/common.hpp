// Copyright 2026 The tmdl Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace tmdl {

inline constexpr const char* kVersion = "0.1.0";

using Complex = std::complex<double>;

// Default ceiling on the dimension of any matrix we are willing to allocate.
inline constexpr long kDefaultDimCeiling = 20000;

// Base of every error raised by the library. The CLI maps these onto exit
// codes, so keep new error types inside this hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent run configuration.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnknownOperator : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class CutoffTooLarge : public Error {
 public:
  using Error::Error;
};

class CutoffNotConverged : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public SolverError {
 public:
  using SolverError::SolverError;
};

class DegenerateGroundState : public Error {
 public:
  using Error::Error;
};

class BoundaryHit : public Error {
 public:
  using Error::Error;
};

class SamePhase : public Error {
 public:
  using Error::Error;
};

class LabelCheckFailed : public Error {
 public:
  using Error::Error;
};

class SelectionRuleViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace tmdl
