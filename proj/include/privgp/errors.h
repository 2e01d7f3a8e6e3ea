//
// Copyright 2026 The privgp Authors
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

#ifndef PRIVGP_ERRORS_H_
#define PRIVGP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace privgp {

// Raised when a factorization that must succeed (e.g. of the regularized
// design matrix) does not.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-order use of a stateful object such as the noisy tree.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Rejection sampling in an environment ran out of attempts.
class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration. `key()` names the offending key when
// there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace privgp

#endif  // PRIVGP_ERRORS_H_
