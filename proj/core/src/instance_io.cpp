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

#include "surplus/instance_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace surplus {

using nlohmann::json;

namespace {

json valuation_json(const Valuation& v) {
  return std::visit(
      [](const auto& arg) -> json {
        using T = std::decay_t<decltype(arg)>;
        if constexpr (std::is_same_v<T, UnitDemand>) {
          return json{{"class", "unit_demand"}, {"weights", arg.weights}};
        } else if constexpr (std::is_same_v<T, MultiUnit>) {
          return json{{"class", "multi_unit"}, {"marginals", arg.marginals}};
        } else if constexpr (std::is_same_v<T, Explicit>) {
          json table = json::object();
          for (std::uint32_t mask = 0; mask < arg.table.size(); ++mask)
            table[std::to_string(mask)] = arg.table[mask];
          return json{{"class", "explicit"}, {"table", std::move(table)}};
        } else {
          json curves = json::array();
          for (const Curve& c : arg.curves)
            curves.push_back(json{{"breakpoints", c.breakpoints}, {"slopes", c.slopes}});
          return json{{"class", "divisible_separable"}, {"curves", std::move(curves)}};
        }
      },
      v);
}

Valuation parse_valuation(const json& j, int m) {
  const std::string cls = j.at("class").get<std::string>();
  if (cls == "unit_demand") {
    UnitDemand v;
    v.weights = j.at("weights").get<std::vector<double>>();
    return v;
  }
  if (cls == "multi_unit") {
    MultiUnit v;
    v.marginals = j.at("marginals").get<std::vector<double>>();
    return v;
  }
  if (cls == "explicit") {
    if (m > kMaxExplicitItems)
      throw std::invalid_argument("explicit valuation limited to 12 items");
    Explicit v;
    v.items = m;
    v.table.assign(1u << m, 0.0);  // absent masks default to zero
    for (const auto& [key, value] : j.at("table").items()) {
      const unsigned long mask = std::stoul(key);
      if (mask >= v.table.size()) throw std::invalid_argument("table mask out of range");
      v.table[mask] = value.get<double>();
    }
    return v;
  }
  if (cls == "divisible_separable") {
    DivisibleSeparable v;
    for (const json& c : j.at("curves")) {
      v.curves.push_back(make_curve(c.at("breakpoints").get<std::vector<double>>(),
                                    c.at("slopes").get<std::vector<double>>()));
    }
    return v;
  }
  throw std::invalid_argument("unknown valuation class: " + cls);
}

}  // namespace

std::string instance_json(const Instance& inst) {
  json agents = json::array();
  for (const Valuation& v : inst.agents) agents.push_back(valuation_json(v));
  return json{{"kind", inst.kind == Kind::divisible ? "divisible" : "indivisible"},
              {"m", inst.m},
              {"agents", std::move(agents)}}
      .dump();
}

Instance parse_instance(const std::string& json_text, bool allow_nonstandard) {
  Instance inst;
  try {
    const json j = json::parse(json_text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "indivisible") {
      inst.kind = Kind::indivisible;
    } else if (kind == "divisible") {
      inst.kind = Kind::divisible;
    } else {
      throw std::invalid_argument("unknown instance kind: " + kind);
    }
    inst.m = j.at("m").get<int>();
    if (inst.m < 1) throw std::invalid_argument("instance needs at least one item");
    for (const json& a : j.at("agents")) inst.agents.push_back(parse_valuation(a, inst.m));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance JSON: ") + e.what());
  }
  validate_shape(inst);
  if (!allow_nonstandard) {
    for (int i = 0; i < inst.n(); ++i) {
      if (!check_class(inst.agents[i]).ok())
        throw std::invalid_argument("agent " + std::to_string(i) +
                                    " fails class invariants (use allow-nonstandard to load)");
    }
  }
  return inst;
}

Instance load_instance(const std::string& path, bool allow_nonstandard) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_instance(text, allow_nonstandard);
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write instance file: " + path);
  out << instance_json(inst) << "\n";
}

namespace {

json allocation_json(const Allocation& alloc) {
  if (const auto* sets = std::get_if<SetAllocation>(&alloc)) {
    bool any_copy = false;
    for (const auto& bundle : sets->bundles)
      for (const CopiedItem& c : bundle)
        if (c.copy != 0) any_copy = true;
    json out = json::array();
    for (const auto& bundle : sets->bundles) {
      json b = json::array();
      for (const CopiedItem& c : bundle) {
        if (any_copy) {
          b.push_back(json::array({c.item, c.copy}));
        } else {
          b.push_back(c.item);
        }
      }
      out.push_back(std::move(b));
    }
    return out;
  }
  if (const auto* units = std::get_if<UnitAllocation>(&alloc)) return json(units->counts);
  return json(std::get<FractionalAllocation>(alloc).fractions);
}

}  // namespace

std::string outcome_json(const Outcome& outcome) {
  return json{{"allocation", allocation_json(outcome.allocation)},
              {"payments", outcome.payments},
              {"welfare", outcome.welfare},
              {"surplus", outcome.surplus()}}
      .dump();
}

std::string surplus_report_json(const SurplusReport& report) {
  return json{{"expected_welfare", report.expected_welfare},
              {"expected_payments", report.expected_payments},
              {"expected_surplus", report.expected_surplus},
              {"first_best", report.first_best},
              {"ratio", report.ratio}}
      .dump();
}

std::string audit_report_json(const AuditReport& report) {
  return json{{"mechanism", report.mechanism_id},
              {"instance", report.instance_digest},
              {"deviations", report.deviations_tried},
              {"max_gain", report.max_gain},
              {"pass", report.pass}}
      .dump();
}

std::string check_line_json(const std::string& check, const std::string& digest,
                            const CheckResult& result) {
  return json{{"check", check},
              {"instance", digest},
              {"lhs", result.lhs},
              {"rhs", result.rhs},
              {"pass", result.pass}}
      .dump();
}

}  // namespace surplus
