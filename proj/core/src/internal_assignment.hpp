// Copyright 2026 The Surplus Auctions Authors
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

#pragma once

#include <vector>

#include "surplus/valuations.hpp"

namespace surplus::internal {

// Clarke payments for a solved assignment: for each matched agent i holding
// item j,  p_i = SW(N\{i}, caps) - SW(N\{i}, caps with one unit of j gone).
// `assigned_item` must be the assignment max_welfare_unit_demand produces on
// the same inputs. The warm path cancels one unit of flow and resumes the
// augmentation instead of re-solving from scratch; `warm=false` re-solves
// both terms fully (kept for cross-checking).
std::vector<double> assignment_clarke_payments(const std::vector<UnitDemand>& profile,
                                               const std::vector<int>& item_caps,
                                               const std::vector<int>& assigned_item,
                                               bool warm);

}  // namespace surplus::internal
