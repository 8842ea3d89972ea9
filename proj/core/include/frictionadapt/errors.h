// Copyright 2026 The frictionadapt Authors
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

#ifndef FRICTIONADAPT_ERRORS_H_
#define FRICTIONADAPT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace frictionadapt {

// Input outside the mathematical domain of an operation (non-finite values,
// v = 0 where a steady state is requested, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Parameters or settings that make an operation ill-posed.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed text input. `field()` names the offending entry.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class VersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// A file or directory could not be created, written or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pipeline stage found one of its inputs missing.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Artifacts on disk disagree with each other or with the config.
class InconsistentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_ERRORS_H_
