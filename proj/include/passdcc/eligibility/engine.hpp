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

#include <optional>
#include <string>
#include <vector>

#include <passdcc/eligibility/rules.hpp>
#include <passdcc/model/types.hpp>

namespace passdcc::eligibility {

// Value a criterion field takes for `inputs`, as a bool or a number.
std::variant<bool, double> field_value(const CriterionInputs &inputs, CriterionField field);

bool rule_passes(const Rule &rule, const CriterionInputs &inputs);

// Identity and time of the assessment being produced; kept out of the
// evaluation so that evaluate() stays a pure function of its inputs.
struct AssessmentStamp {
	AssessmentId id;
	Timestamp at {};
};

// One verdict per rule, combined by conjunction. Throws
// Error(Precondition) for invalid inputs or a physician validation
// without an assessor, Error(Configuration) for an unusable rule set.
EligibilityAssessment evaluate(
	const CriterionInputs &inputs,
	const RuleSet &rules,
	AssessmentKind kind,
	std::optional<AccountId> assessor,
	AssessmentStamp stamp);

// Names of failing rules in rule-set order.
std::vector<std::string> failed_rules(const EligibilityAssessment &assessment, const RuleSet &rules);

} // namespace passdcc::eligibility
