// Copyright 2026 The medtimeline Authors. All Rights Reserved.
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

#ifndef MEDTL_ERROR_HPP
#define MEDTL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace medtl {

/// Coarse error category. Values double as C API status codes and CLI exit
/// codes, so they must not be renumbered.
enum class ErrorKind : int {
  Usage = 1,
  Data = 2,
  Numeric = 3,
  Verification = 4,
  Internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input text; carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(ErrorKind::Data, line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// Label or tag not in the active tag scheme.
class SchemeError : public Error {
 public:
  explicit SchemeError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// Relation endpoint that does not resolve to a known id.
class LinkError : public Error {
 public:
  explicit LinkError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::Internal, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

}  // namespace medtl

#endif  // MEDTL_ERROR_HPP
