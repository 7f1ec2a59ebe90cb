//
// Copyright 2026 The gradleak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef GRADLEAK_ERRORS_H_
#define GRADLEAK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace gradleak {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// API misuse: bad module key, unreachable gradient target, misaligned views.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Bad data: token id out of range, empty dataset, label out of range.
class InputError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A non-finite value showed up where a finite one is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Every observed gradient block is zero, so there is nothing to match.
class DegenerateTargetError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace gradleak

#endif  // GRADLEAK_ERRORS_H_
