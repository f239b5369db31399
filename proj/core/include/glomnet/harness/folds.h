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

/// @file folds.h
/// @brief Patient-level k-fold assignment.

#ifndef GLOMNET_HARNESS_FOLDS_H_
#define GLOMNET_HARNESS_FOLDS_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace glomnet {

struct FoldSplit {
  int k = 5;
  std::uint64_t seed = 0;
  std::map<std::string, int, std::less<>> assignment;

  int fold_of(const std::string& patient_id) const;
  std::set<std::string> patients_in(int fold) const;
  std::vector<int> fold_sizes() const;
};

/// Sorts and de-duplicates the ids, shuffles them with the seeded stream,
/// then deals them round-robin into k folds (sizes differ by at most 1).
/// Throws DataError when k < 2 or k exceeds the number of patients.
FoldSplit assign_folds(std::vector<std::string> patient_ids, int k, std::uint64_t seed);

}  // namespace glomnet

#endif  // GLOMNET_HARNESS_FOLDS_H_
