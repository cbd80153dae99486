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

#include <json.hpp>

#include <passdcc/model/types.hpp>
#include <passdcc/workflow/context.hpp>
#include <passdcc/workflow/machine.hpp>

namespace passdcc::workflow {

struct IssuedCredentials {
	PatientRecord record;
	UserAccount account;
	std::string temporary_password;  // returned once, never stored
};

struct FormWriteResult {
	CaseReportForm form;
	std::int64_t state_version {0};
};

struct SelfCheckResult {
	EligibilityAssessment assessment;
	std::vector<std::string> failed;
	std::string next_steps;
};

// The enrollment procedure. Every mutating operation is authorized,
// checked against the transition table and committed as one batch
// together with its audit events. `expected_version`, when given, must
// equal the stored state_version or the call fails with Error(Conflict).
class EnrollmentService {
public:
	explicit EnrollmentService(ServiceContext ctx);

	SelfCheckResult self_check(const CriterionInputs &inputs);

	PatientRecord register_prospect(
		const UserAccount &actor,
		const SiteId &site,
		const CriterionInputs &self_screen,
		AssessmentKind kind = AssessmentKind::SelfScreen);

	PatientRecord record_consultation(const UserAccount &actor, const PatientId &patient, std::optional<std::int64_t> expected_version = {});

	PatientRecord physician_validate(
		const UserAccount &actor,
		const PatientId &patient,
		const CriterionInputs &inputs,
		AssessmentKind kind = AssessmentKind::PhysicianValidation,
		std::optional<std::int64_t> expected_version = {});

	IssuedCredentials issue_credentials(
		const UserAccount &actor,
		const PatientId &patient,
		const std::string &username,
		std::optional<std::int64_t> expected_version = {});

	// Password check with lockout. Throws Error(AuthFailure) on bad
	// credentials and Error(Locked) once the account is disabled.
	UserAccount authenticate(const std::string &username, const std::string &password);

	// Rotates the password. A patient account still in CREDENTIALED moves
	// to ENROLLMENT_IN_PROGRESS in the same commit.
	UserAccount change_password(const AccountId &account, const std::string &current, const std::string &replacement);

	UserAccount patient_first_login(const std::string &username, const std::string &temporary, const std::string &replacement);

	FormWriteResult write_form(
		const UserAccount &actor,
		const PatientId &patient,
		FormName form,
		const nlohmann::json &fields,
		std::optional<std::int64_t> expected_version = {});

	PatientRecord submit_enrollment(const UserAccount &actor, const PatientId &patient, std::optional<std::int64_t> expected_version = {});

	PatientRecord withdraw(
		const UserAccount &actor,
		const PatientId &patient,
		const std::string &reason,
		std::optional<std::int64_t> expected_version = {});

	BiospecimenRecord register_specimen(
		const UserAccount &actor,
		const PatientId &patient,
		SpecimenKind kind,
		std::optional<Timestamp> collected_at = {},
		std::optional<std::string> notes = {});

	PatientRecord read_patient(const UserAccount &actor, const PatientId &patient);

	std::vector<PatientRecord> list_patients(
		const UserAccount &actor,
		const std::optional<SiteId> &site = {},
		const std::optional<WorkflowState> &state = {});

	const ServiceContext &context() const {
		return ctx_;
	}

private:
	PatientRecord load(const PatientId &patient) const;
	void check_version(const PatientRecord &record, const std::optional<std::int64_t> &expected) const;
	void check_role(const UserAccount &actor, const std::optional<WorkflowState> &from, Op op, Outcome outcome) const;
	EligibilityAssessment assess(const CriterionInputs &inputs, AssessmentKind kind, std::optional<AccountId> assessor);
	AuditEvent transition_event(const UserAccount &actor, std::optional<WorkflowState> from, const PatientRecord &after, Op op) const;
	[[noreturn]] void login_failed(UserAccount account, const std::string &why);

	ServiceContext ctx_;
};

// Workflow state of every patient, rebuilt from STATE_TRANSITION events.
std::map<PatientId, WorkflowState> replay_states(const std::vector<AuditEvent> &events);

} // namespace passdcc::workflow
