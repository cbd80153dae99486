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
#include <span>
#include <string_view>
#include <vector>

#include <passdcc/model/enums.hpp>
#include <passdcc/model/types.hpp>

namespace passdcc::workflow {

enum class Op {
	RegisterProspect,
	RecordConsultation,
	PhysicianValidate,
	IssueCredentials,
	PatientFirstLogin,
	WriteForm,
	SubmitEnrollment,
	Withdraw,
	RegisterSpecimen,
};

// Branch taken by operations whose target depends on an assessment.
enum class Outcome { Default, Eligible, Ineligible };

// One whitelisted row. Rows with from == to are guarded operations that
// leave the state alone (form writes, specimen registration).
// RegisterProspect rows have no source state.
struct Transition {
	std::optional<WorkflowState> from;
	WorkflowState to;
	Op op;
	Outcome outcome;
	std::vector<Role> roles;
	std::string_view guard;
};

} // namespace passdcc::workflow

namespace passdcc {
PASSDCC_ENUM_NAMES(
	workflow::Op,
	{workflow::Op::RegisterProspect, "register_prospect"},
	{workflow::Op::RecordConsultation, "record_consultation"},
	{workflow::Op::PhysicianValidate, "physician_validate"},
	{workflow::Op::IssueCredentials, "issue_credentials"},
	{workflow::Op::PatientFirstLogin, "patient_first_login"},
	{workflow::Op::WriteForm, "write_form"},
	{workflow::Op::SubmitEnrollment, "submit_enrollment"},
	{workflow::Op::Withdraw, "withdraw"},
	{workflow::Op::RegisterSpecimen, "register_specimen"});
} // namespace passdcc

namespace passdcc::workflow {

const std::vector<Transition> &transition_table();

// Whitelisted row for (from, op, outcome), or nullptr.
const Transition *find_transition(std::optional<WorkflowState> from, Op op, Outcome outcome = Outcome::Default);

// States `op` may start from.
std::vector<WorkflowState> allowed_sources(Op op);

// Target state, or Error(Transition) naming the allowed source states.
// Specimen registration outside ENROLLED is a precondition failure
// rather than a transition error.
WorkflowState next_state(std::optional<WorkflowState> from, Op op, Outcome outcome = Outcome::Default);

bool role_may(Role role, const Transition &transition);

} // namespace passdcc::workflow
