// Copyright 2026 The pass-dcc Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include <passdcc/model/enums.hpp>
#include <passdcc/model/types.hpp>

namespace passdcc::eligibility {

// Inputs a rule may test. CORE_FRACTION is derived: positive_cores / total_cores.
enum class CriterionField {
	DrePalpable,
	HistologyAggressive,
	GleasonScore,
	PsaNgMl,
	PositiveCores,
	TotalCores,
	CoreFraction,
};

enum class Comparison { Eq, Le, Lt, Ge, Gt };

using RuleConstant = std::variant<bool, std::int64_t, double>;

struct Rule {
	std::string name;
	CriterionField field {CriterionField::DrePalpable};
	Comparison op {Comparison::Eq};
	RuleConstant constant {false};

	bool operator==(const Rule &) const = default;
};

struct RuleSet {
	std::string version;
	std::vector<Rule> rules;

	bool operator==(const RuleSet &) const = default;
};

struct NextSteps {
	std::string eligible;
	std::string ineligible;

	const std::string &for_overall(Overall overall) const {
		return overall == Overall::Eligible ? eligible : ineligible;
	}
};

// Everything loaded from one rule config document. Physician validation
// uses `physician_rules` when the document provides one, else the same
// set as self-screening.
struct EligibilityConfig {
	RuleSet self_screen;
	RuleSet physician;
	NextSteps next_steps;

	const RuleSet &rules_for(AssessmentKind kind) const {
		return kind == AssessmentKind::SelfScreen ? self_screen : physician;
	}
};

std::string_view field_name(CriterionField field);
std::optional<CriterionField> parse_field(std::string_view name);
std::string_view operator_symbol(Comparison op);
std::optional<Comparison> parse_operator(std::string_view symbol);

// Semantic checks shared by the loader and evaluate(): unique names, at
// least one rule, constants type-compatible with their field. Throws
// Error(Configuration) naming the offending rule.
void check_ruleset(const RuleSet &rules);

// Parses the "rules" document (JSON). Parse failures carry line and
// column in the error detail.
RuleSet load_ruleset(std::string_view document);
EligibilityConfig load_config(std::string_view document);
EligibilityConfig load_config_file(const std::string &path);

nlohmann::json ruleset_json(const RuleSet &rules);

} // namespace passdcc::eligibility
