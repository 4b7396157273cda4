// Copyright 2026 The prnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRNN_ERRORS_HPP_
#define PRNN_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prnn {

// Every error raised by the library derives from Error so callers can catch
// at one place and map to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree (gemv, spmv, layer inputs, optimizer buffers).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An argument is outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A pruning threshold was asked to move backwards.
class MonotonicityError : public Error {
 public:
  using Error::Error;
};

// An API was used out of order, e.g. backprop with a cache from a model that
// has since been modified.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed model file. Carries the byte offset at which decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration; `field` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long last_finite_iteration)
      : Error(what), last_finite_iteration_(last_finite_iteration) {}

  long last_finite_iteration() const noexcept { return last_finite_iteration_; }

 private:
  long last_finite_iteration_;
};

}  // namespace prnn

#endif  // PRNN_ERRORS_HPP_
