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

#include <gtest/gtest.h>

#include <passdcc/eligibility/engine.hpp>
#include <passdcc/eligibility/rules.hpp>
#include <passdcc/model/codec.hpp>

#include "oracles.hpp"
#include "world.hpp"

using namespace passdcc;
using namespace passdcc::eligibility;

namespace {

const EligibilityConfig &defaults() {
	static const auto config = load_config_file(fixture::config_file("eligibility.default.json"));
	return config;
}

EligibilityAssessment self_screen(const CriterionInputs &in) {
	return evaluate(in, defaults().self_screen, AssessmentKind::SelfScreen, std::nullopt, {AssessmentId {"A"}, fixture::fixed_start()});
}

std::string configuration_message(const std::string &document) {
	try {
		load_config(document);
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::Configuration);
		return e.what();
	}
	ADD_FAILURE() << "accepted: " << document;
	return {};
}

} // namespace

TEST(Evaluate, PalpableDreIsIneligible) {
	auto in = fixture::eligible_inputs();
	in.dre_palpable = true;
	auto a = self_screen(in);
	EXPECT_EQ(a.overall, Overall::Ineligible);
	EXPECT_EQ(a.verdicts.at("non_palpable_dre"), Verdict::Fail);
	EXPECT_EQ(failed_rules(a, defaults().self_screen), std::vector<std::string> {"non_palpable_dre"});
}

TEST(Evaluate, AggressiveHistologyIsIneligible) {
	auto in = fixture::eligible_inputs();
	in.histology_aggressive = true;
	EXPECT_EQ(self_screen(in).overall, Overall::Ineligible);
}

TEST(Evaluate, AllPassingIsEligibleWithEveryVerdictPass) {
	auto a = self_screen(fixture::eligible_inputs());
	EXPECT_EQ(a.overall, Overall::Eligible);
	EXPECT_EQ(a.verdicts.size(), 5u);
	for (const auto &[name, verdict] : a.verdicts) {
		EXPECT_EQ(verdict, Verdict::Pass) << name;
	}
	EXPECT_EQ(a.ruleset_version, "default-1");
}

TEST(Evaluate, BoundariesAreInclusive) {
	CriterionInputs in {false, false, 6, 10.0, 17, 50};
	EXPECT_EQ(self_screen(in).overall, Overall::Eligible);
	in.psa_ng_ml = 10.01;
	EXPECT_EQ(self_screen(in).overall, Overall::Ineligible);
	in = {false, false, 7, 1.0, 0, 10};
	EXPECT_EQ(self_screen(in).overall, Overall::Ineligible);
	in = {false, false, 6, 1.0, 18, 50};
	EXPECT_EQ(self_screen(in).verdicts.at("core_fraction_max"), Verdict::Fail);
}

TEST(Evaluate, PhysicianKindNeedsAssessor) {
	try {
		evaluate(fixture::eligible_inputs(), defaults().physician, AssessmentKind::PhysicianValidation, std::nullopt, {AssessmentId {"A"}, fixture::fixed_start()});
		FAIL();
	} catch (const Error &e) {
		EXPECT_EQ(e.code(), ErrorCode::Precondition);
	}
	auto a = evaluate(fixture::eligible_inputs(), defaults().physician, AssessmentKind::PhysicianValidation, AccountId {"doc"}, {AssessmentId {"A"}, fixture::fixed_start()});
	EXPECT_EQ(a.assessor, AccountId {"doc"});
}

TEST(Evaluate, InvalidInputsAreRejected) {
	CriterionInputs in {false, false, 6, 4.0, 5, 3};
	EXPECT_THROW(self_screen(in), Error);
}

TEST(Evaluate, MatchesIndependentOracle) {
	std::mt19937_64 rng(11);
	int eligible = 0;
	for (int i = 0; i < 2000; ++i) {
		auto in = fixture::random_inputs(rng);
		bool expected = fixture::low_risk(in);
		eligible += expected;
		ASSERT_EQ(self_screen(in).overall == Overall::Eligible, expected) << json(in).dump();
	}
	EXPECT_GT(eligible, 100);
	EXPECT_LT(eligible, 1900);
}

TEST(Evaluate, SingleFlipsAreMonotone) {
	std::mt19937_64 rng(12);
	for (int i = 0; i < 500; ++i) {
		auto in = fixture::random_inputs(rng);
		bool base = self_screen(in).overall == Overall::Eligible;
		for (const auto &[flipped, direction] : fixture::single_flips(in)) {
			bool after = self_screen(flipped).overall == Overall::Eligible;
			if (direction < 0) {
				ASSERT_FALSE(!base && after) << json(in).dump() << " -> " << json(flipped).dump();
			} else {
				ASSERT_FALSE(base && !after) << json(in).dump() << " -> " << json(flipped).dump();
			}
		}
	}
}

TEST(Rules, DefaultDocumentLoadsExactly) {
	const auto &rules = defaults().self_screen;
	std::vector<std::string> names;
	for (const auto &r : rules.rules) {
		names.push_back(r.name);
	}
	EXPECT_EQ(names, (std::vector<std::string> {"non_palpable_dre", "non_aggressive_histology", "gleason_max", "psa_max", "core_fraction_max"}));
	EXPECT_EQ(rules.rules[2].field, CriterionField::GleasonScore);
	EXPECT_EQ(rules.rules[2].op, Comparison::Le);
	EXPECT_EQ(rules.rules[2].constant, RuleConstant {std::int64_t {6}});
	EXPECT_EQ(rules.rules[4].constant, RuleConstant {0.34});
	EXPECT_EQ(defaults().physician, defaults().self_screen);
	EXPECT_FALSE(defaults().next_steps.eligible.empty());
}

TEST(Rules, JsonRoundTrip) {
	auto text = ruleset_json(defaults().self_screen).dump();
	EXPECT_EQ(load_ruleset(text), defaults().self_screen);
}

TEST(Rules, EmptyRuleListIsRejected) {
	EXPECT_NE(configuration_message(R"({"version": "x", "rules": []})").find("at least one rule"), std::string::npos);
}

TEST(Rules, UnknownFieldIsNamed) {
	auto msg = configuration_message(R"({"rules": [{"name": "d", "field": "psa_density", "operator": "<=", "constant": 0.15}]})");
	EXPECT_NE(msg.find("psa_density"), std::string::npos);
}

TEST(Rules, OtherSemanticErrors) {
	configuration_message(R"({"rules": [{"name": "a", "field": "dre_palpable", "operator": "<=", "constant": false}]})");
	configuration_message(R"({"rules": [{"name": "a", "field": "gleason_score", "operator": "<=", "constant": 6.5}]})");
	configuration_message(R"({"rules": [{"name": "a", "field": "gleason_score", "operator": "~", "constant": 6}]})");
	configuration_message(R"({"rules": [{"name": "a", "field": "psa_ng_ml", "operator": "<=", "constant": 10},
	                                    {"name": "a", "field": "psa_ng_ml", "operator": "<=", "constant": 10}]})");
	configuration_message(R"({"rules": [{"name": "a", "field": "psa_ng_ml", "operator": "<=", "constant": 10, "extra": 1}]})");
	configuration_message(R"({"rules": [{"name": "a", "field": "psa_ng_ml", "operator": "<="}]})");
	configuration_message(R"({"rules": [], "flavour": 1})");
	configuration_message("[1, 2");
}

TEST(Rules, PhysicianRulesMayDiffer) {
	auto config = load_config(R"({"rules": [{"name": "a", "field": "psa_ng_ml", "operator": "<=", "constant": 10}],
	                              "physician_rules": [{"name": "b", "field": "psa_ng_ml", "operator": "<", "constant": 5}]})");
	EXPECT_EQ(config.rules_for(AssessmentKind::PhysicianValidation).rules.at(0).name, "b");
	EXPECT_EQ(config.rules_for(AssessmentKind::SelfScreen).rules.at(0).name, "a");
}
