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

#include <passdcc/eligibility/engine.hpp>

#include <algorithm>

#include <passdcc/model/error.hpp>
#include <passdcc/model/validate.hpp>

namespace passdcc::eligibility {

std::variant<bool, double> field_value(const CriterionInputs &in, CriterionField field) {
	switch (field) {
	case CriterionField::DrePalpable:
		return in.dre_palpable;
	case CriterionField::HistologyAggressive:
		return in.histology_aggressive;
	case CriterionField::GleasonScore:
		return static_cast<double>(in.gleason_score);
	case CriterionField::PsaNgMl:
		return in.psa_ng_ml;
	case CriterionField::PositiveCores:
		return static_cast<double>(in.positive_cores);
	case CriterionField::TotalCores:
		return static_cast<double>(in.total_cores);
	case CriterionField::CoreFraction:
		return static_cast<double>(in.positive_cores) / static_cast<double>(in.total_cores);
	}
	return false;
}

bool rule_passes(const Rule &rule, const CriterionInputs &inputs) {
	auto value = field_value(inputs, rule.field);
	if (const bool *b = std::get_if<bool>(&value)) {
		return *b == std::get<bool>(rule.constant);
	}
	double x = std::get<double>(value);
	double c = std::holds_alternative<std::int64_t>(rule.constant)
				   ? static_cast<double>(std::get<std::int64_t>(rule.constant))
				   : std::get<double>(rule.constant);
	switch (rule.op) {
	case Comparison::Eq:
		return x == c;
	case Comparison::Le:
		return x <= c;
	case Comparison::Lt:
		return x < c;
	case Comparison::Ge:
		return x >= c;
	case Comparison::Gt:
		return x > c;
	}
	return false;
}

EligibilityAssessment evaluate(
	const CriterionInputs &inputs,
	const RuleSet &rules,
	AssessmentKind kind,
	std::optional<AccountId> assessor,
	AssessmentStamp stamp) {
	check_ruleset(rules);
	if (auto violations = validate(inputs); !violations.empty()) {
		throw Error(ErrorCode::Precondition, "invalid criterion inputs", violations_json(violations));
	}
	if (kind == AssessmentKind::PhysicianValidation && (!assessor || assessor->empty())) {
		throw Error(ErrorCode::Precondition, "physician validation requires an assessor");
	}

	EligibilityAssessment out;
	out.assessment_id = std::move(stamp.id);
	out.kind = kind;
	out.inputs = inputs;
	out.assessed_at = stamp.at;
	out.assessor = std::move(assessor);
	out.ruleset_version = rules.version;
	bool all_pass = true;
	for (const auto &rule : rules.rules) {
		bool pass = rule_passes(rule, inputs);
		out.verdicts[rule.name] = pass ? Verdict::Pass : Verdict::Fail;
		all_pass = all_pass && pass;
	}
	out.overall = all_pass ? Overall::Eligible : Overall::Ineligible;
	return out;
}

std::vector<std::string> failed_rules(const EligibilityAssessment &assessment, const RuleSet &rules) {
	std::vector<std::string> out;
	for (const auto &rule : rules.rules) {
		auto it = assessment.verdicts.find(rule.name);
		if (it != assessment.verdicts.end() && it->second == Verdict::Fail) {
			out.push_back(rule.name);
		}
	}
	// Verdicts from a rule set that has since changed still get reported.
	for (const auto &[name, verdict] : assessment.verdicts) {
		if (verdict == Verdict::Fail
			&& std::find(out.begin(), out.end(), name) == out.end()) {
			out.push_back(name);
		}
	}
	return out;
}

} // namespace passdcc::eligibility
