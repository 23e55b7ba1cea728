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

#include <string>

#include "surplus/analysis.hpp"
#include "surplus/vcg.hpp"

namespace surplus {

/// Instance wire format:
///   {"kind": "indivisible"|"divisible", "m": int, "agents": [...]}
/// with one object per agent:
///   {"class": "unit_demand", "weights": [...]}
///   {"class": "multi_unit", "marginals": [...]}
///   {"class": "explicit", "table": {"<mask>": value, ...}}  (decimal keys)
///   {"class": "divisible_separable", "curves": [{"breakpoints": [...],
///                                                "slopes": [...]}]}
std::string instance_json(const Instance& inst);

/// Parses and validates. Instances failing check_class are rejected unless
/// allow_nonstandard is set; structural problems always throw.
Instance parse_instance(const std::string& json_text, bool allow_nonstandard = false);

Instance load_instance(const std::string& path, bool allow_nonstandard = false);
void save_instance(const Instance& inst, const std::string& path);

/// {"allocation": ..., "payments": [...], "welfare": x, "surplus": y}.
/// Set allocations render as arrays of item indices, or [item, copy] pairs
/// when any copy index is nonzero.
std::string outcome_json(const Outcome& outcome);

std::string surplus_report_json(const SurplusReport& report);
std::string audit_report_json(const AuditReport& report);

/// One verifier log line: {"check":..., "instance":..., "lhs":..., "rhs":...,
/// "pass":...}.
std::string check_line_json(const std::string& check, const std::string& digest,
                            const CheckResult& result);

}  // namespace surplus
