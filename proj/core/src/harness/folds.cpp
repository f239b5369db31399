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

#include "glomnet/harness/folds.h"

#include <algorithm>

#include "glomnet/error.h"
#include "glomnet/random.h"

namespace glomnet {

int FoldSplit::fold_of(const std::string& patient_id) const {
  const auto it = assignment.find(patient_id);
  if (it == assignment.end()) throw DataError("patient " + patient_id + " has no fold");
  return it->second;
}

std::set<std::string> FoldSplit::patients_in(int fold) const {
  std::set<std::string> out;
  for (const auto& [id, f] : assignment) {
    if (f == fold) out.insert(id);
  }
  return out;
}

std::vector<int> FoldSplit::fold_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (const auto& entry : assignment) ++sizes[static_cast<std::size_t>(entry.second)];
  return sizes;
}

FoldSplit assign_folds(std::vector<std::string> patient_ids, int k, std::uint64_t seed) {
  std::sort(patient_ids.begin(), patient_ids.end());
  patient_ids.erase(std::unique(patient_ids.begin(), patient_ids.end()), patient_ids.end());
  if (k < 2) throw DataError("fold count must be >= 2");
  if (static_cast<std::size_t>(k) > patient_ids.size()) {
    throw DataError("fold count " + std::to_string(k) + " exceeds the " +
                    std::to_string(patient_ids.size()) + " patients");
  }
  RandomStream rng(seed, stream_tag(StreamPurpose::kFolds), 0);
  rng.shuffle(std::span<std::string>(patient_ids));
  FoldSplit split;
  split.k = k;
  split.seed = seed;
  for (std::size_t i = 0; i < patient_ids.size(); ++i) {
    split.assignment.emplace(patient_ids[i], static_cast<int>(i % static_cast<std::size_t>(k)));
  }
  return split;
}

}  // namespace glomnet
