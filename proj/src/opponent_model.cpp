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

#include "negrec/opponent_model.hpp"

#include <algorithm>
#include <string>

#include "negrec/errors.hpp"

namespace negrec {

FrequencyModel::FrequencyModel(const Domain& domain)
    : FrequencyModel(domain.values_per_issue()) {}

FrequencyModel::FrequencyModel(std::vector<int> values_per_issue)
    : max_(values_per_issue.size(), 0) {
  counts_.reserve(values_per_issue.size());
  for (int n : values_per_issue) counts_.emplace_back(n, 0);
}

void FrequencyModel::CheckShape(const Bid& bid) const {
  if (bid.size() != counts_.size()) {
    throw StructuralError("bid has " + std::to_string(bid.size()) +
                          " issues, frequency model expects " +
                          std::to_string(counts_.size()));
  }
  for (std::size_t i = 0; i < bid.size(); ++i) {
    if (bid[i] < 0 || bid[i] >= static_cast<int>(counts_[i].size())) {
      throw StructuralError("bid value index out of range on issue " +
                            std::to_string(i));
    }
  }
}

void FrequencyModel::Update(const Bid& bid) {
  CheckShape(bid);
  for (std::size_t i = 0; i < bid.size(); ++i) {
    const std::int64_t c = ++counts_[i][bid[i]];
    max_[i] = std::max(max_[i], c);
  }
  ++observed_;
}

double FrequencyModel::EstimateUtility(const Bid& bid) const {
  CheckShape(bid);
  if (observed_ == 0) return 0.0;
  const double total = static_cast<double>(observed_);
  double weighted = 0.0;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < bid.size(); ++i) {
    const double c_max = static_cast<double>(max_[i]);
    const double w = c_max / total;
    const double e = static_cast<double>(counts_[i][bid[i]]) / c_max;
    weighted += w * e;
    weight_sum += w;
  }
  return weighted / weight_sum;
}

}  // namespace negrec
