// Copyright 2026 The negrec Authors
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

#ifndef NEGREC_ERRORS_HPP_
#define NEGREC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace negrec {

// Bad argument values (sizes, rates, seeds out of range).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Objects that do not fit together: a bid from another domain, a matrix of
// the wrong width, a profile with the wrong number of issues.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violations of the alternating offers protocol.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Feature schema or checkpoint metadata disagree.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Campaign or experiment configuration cannot be satisfied.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Outcome space too large to enumerate; callers should switch to sampling.
class EnumerationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced NaN or infinity.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace negrec

#endif  // NEGREC_ERRORS_HPP_
