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

/// @file log.h
/// @brief Diagnostic messages on stderr.

#ifndef GLOMNET_LOG_H_
#define GLOMNET_LOG_H_

#include <string_view>

namespace glomnet {

void log_warning(std::string_view message);
void log_info(std::string_view message);

/// Silences log_info (warnings are always printed).
void set_quiet(bool quiet);

}  // namespace glomnet

#endif  // GLOMNET_LOG_H_
