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

#include <passdcc/workflow/machine.hpp>

#include <algorithm>

#include <json.hpp>

#include <passdcc/model/error.hpp>

namespace passdcc::workflow {

namespace {

using S = WorkflowState;
using R = Role;

std::vector<Transition> build_table() {
	std::vector<Transition> t = {
		{std::nullopt, S::SelfScreened, Op::RegisterProspect, Outcome::Eligible, {R::Coordinator}, "self_screen_eligible"},
		{std::nullopt, S::Ineligible, Op::RegisterProspect, Outcome::Ineligible, {R::Coordinator}, "self_screen_ineligible"},
		{S::SelfScreened, S::Consulted, Op::RecordConsultation, Outcome::Default, {R::Coordinator}, "same_site"},
		{S::Consulted, S::PhysicianValidated, Op::PhysicianValidate, Outcome::Eligible, {R::Investigator}, "validation_eligible"},
		{S::Consulted, S::Ineligible, Op::PhysicianValidate, Outcome::Ineligible, {R::Investigator}, "validation_ineligible"},
		{S::PhysicianValidated, S::Credentialed, Op::IssueCredentials, Outcome::Default, {R::Coordinator}, "username_unused"},
		{S::Credentialed, S::EnrollmentInProgress, Op::PatientFirstLogin, Outcome::Default, {R::Patient}, "temporary_password_rotated"},
		{S::EnrollmentInProgress, S::EnrollmentInProgress, Op::WriteForm, Outcome::Default, {R::Patient, R::Coordinator}, "fields_match_schema"},
		{S::EnrollmentInProgress, S::Enrolled, Op::SubmitEnrollment, Outcome::Default, {R::Patient}, "all_forms_complete"},
		{S::Enrolled, S::Enrolled, Op::RegisterSpecimen, Outcome::Default, {R::Coordinator}, "same_site"},
	};
	for (auto from : {S::SelfScreened, S::Consulted, S::PhysicianValidated, S::Credentialed, S::EnrollmentInProgress, S::Enrolled}) {
		t.push_back({from, S::Withdrawn, Op::Withdraw, Outcome::Default, {R::Coordinator, R::Patient}, "reason_given"});
	}
	return t;
}

} // namespace

const std::vector<Transition> &transition_table() {
	static const std::vector<Transition> table = build_table();
	return table;
}

const Transition *find_transition(std::optional<WorkflowState> from, Op op, Outcome outcome) {
	for (const auto &t : transition_table()) {
		if (t.from == from && t.op == op && (t.outcome == outcome || t.outcome == Outcome::Default)) {
			return &t;
		}
	}
	return nullptr;
}

std::vector<WorkflowState> allowed_sources(Op op) {
	std::vector<WorkflowState> out;
	for (const auto &t : transition_table()) {
		if (t.op == op && t.from && std::find(out.begin(), out.end(), *t.from) == out.end()) {
			out.push_back(*t.from);
		}
	}
	return out;
}

WorkflowState next_state(std::optional<WorkflowState> from, Op op, Outcome outcome) {
	if (const auto *t = find_transition(from, op, outcome)) {
		return t->to;
	}
	nlohmann::json allowed = nlohmann::json::array();
	for (auto s : allowed_sources(op)) {
		allowed.push_back(to_string(s));
	}
	std::string current = from ? std::string(to_string(*from)) : "NONE";
	nlohmann::json detail = {{"op", to_string(op)}, {"state", current}, {"allowed_from", allowed}};
	if (op == Op::RegisterSpecimen) {
		throw Error(ErrorCode::Precondition, "specimens can only be registered for ENROLLED patients", detail);
	}
	throw Error(
		ErrorCode::Transition,
		std::string(to_string(op)) + " is not allowed in state " + current + " (allowed from " + allowed.dump() + ")",
		detail);
}

bool role_may(Role role, const Transition &transition) {
	return std::find(transition.roles.begin(), transition.roles.end(), role) != transition.roles.end();
}

} // namespace passdcc::workflow
