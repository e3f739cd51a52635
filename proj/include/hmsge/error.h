// Copyright 2026 The HM-SGE Authors.
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

#ifndef HMSGE_ERROR_H_
#define HMSGE_ERROR_H_

#include <stdexcept>
#include <string>

namespace hmsge {

// Invalid input: malformed files, out-of-range parameters, unknown words.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system failures and corrupted containers.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values produced during optimization.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hmsge

#endif  // HMSGE_ERROR_H_
