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

#ifndef NEGREC_OPPONENT_MODEL_HPP_
#define NEGREC_OPPONENT_MODEL_HPP_

#include <cstdint>
#include <vector>

#include "negrec/domain.hpp"

namespace negrec {

// Frequency-based utility estimate built from the bids an agent has sent.
//
// With C_v the number of received bids that picked value v:
//   w_i = C_i+ / C_i_sum,   e_i(v) = C_v / C_i+,
//   U(bid) = sum_i w_i e_i(bid_i) / sum_i w_i
// where C_i+ and C_i_sum are the maximum and total count over issue i.
class FrequencyModel {
 public:
  explicit FrequencyModel(const Domain& domain);
  explicit FrequencyModel(std::vector<int> values_per_issue);

  // Counts every issue value of `bid`. Throws StructuralError when the bid
  // does not fit the model's shape.
  void Update(const Bid& bid);

  // Zero when no bid has been observed.
  double EstimateUtility(const Bid& bid) const;

  std::int64_t observed() const { return observed_; }
  bool empty() const { return observed_ == 0; }
  std::int64_t count(std::size_t issue, int value) const {
    return counts_[issue][value];
  }
  std::int64_t max_count(std::size_t issue) const { return max_[issue]; }
  // Every issue sums to the number of observed bids.
  std::int64_t sum_count(std::size_t /*issue*/) const { return observed_; }
  std::size_t num_issues() const { return counts_.size(); }

  bool operator==(const FrequencyModel&) const = default;

 private:
  void CheckShape(const Bid& bid) const;

  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<std::int64_t> max_;
  std::int64_t observed_ = 0;
};

}  // namespace negrec

#endif  // NEGREC_OPPONENT_MODEL_HPP_
