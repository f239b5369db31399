// Copyright 2026 The glomnet Authors. All Rights Reserved.
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

/// @file error.h
/// @brief Exception types shared across glomnet.
///
/// The command-line tool maps these onto process exit codes:
/// UsageError -> 1, DataError -> 2, NumericError -> 3.

#ifndef GLOMNET_ERROR_H_
#define GLOMNET_ERROR_H_

#include <stdexcept>
#include <string>

namespace glomnet {

/// Bad invocation or configuration (unknown config key, malformed option).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that cannot be processed: unreadable files, bad CSV rows,
/// shape mismatches, violated preconditions on data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values in training or inference.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace glomnet

#endif  // GLOMNET_ERROR_H_
