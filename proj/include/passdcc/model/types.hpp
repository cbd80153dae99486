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
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <passdcc/model/enums.hpp>
#include <passdcc/model/ids.hpp>
#include <passdcc/model/time.hpp>

namespace passdcc {

struct Site {
	SiteId site_id;
	std::string name;
	std::string contact_email;
	bool active {true};
	std::int64_t revision {0};

	bool operator==(const Site &) const = default;
};

struct CriterionInputs {
	bool dre_palpable {false};
	bool histology_aggressive {false};
	std::int64_t gleason_score {6};
	double psa_ng_ml {0.0};
	std::int64_t positive_cores {0};
	std::int64_t total_cores {1};

	bool operator==(const CriterionInputs &) const = default;
};

struct EligibilityAssessment {
	AssessmentId assessment_id;
	AssessmentKind kind {AssessmentKind::SelfScreen};
	CriterionInputs inputs;
	std::map<std::string, Verdict> verdicts;
	Overall overall {Overall::Ineligible};
	Timestamp assessed_at {};
	std::optional<AccountId> assessor;
	std::string ruleset_version;

	bool operator==(const EligibilityAssessment &) const = default;
};

// Text, date and enum fields travel as strings; the form schema decides
// which one a field is.
using FieldValue = std::variant<std::string, std::int64_t, double>;

struct CaseReportForm {
	FormName form_name {FormName::Demographics};
	std::map<std::string, FieldValue> fields;
	FormStatus status {FormStatus::Empty};
	std::optional<AccountId> last_edited_by;
	std::optional<Timestamp> last_edited_at;

	bool operator==(const CaseReportForm &) const = default;
};

struct BiospecimenRecord {
	SpecimenId specimen_id;
	PatientId patient_id;
	SpecimenKind kind {SpecimenKind::Urine};
	Timestamp collected_at {};
	AccountId collected_by;
	std::optional<std::string> notes;

	bool operator==(const BiospecimenRecord &) const = default;
};

// Forms as they stood at the moment of enrollment submission.
struct BaselineSnapshot {
	Timestamp captured_at {};
	std::map<FormName, CaseReportForm> forms;

	bool operator==(const BaselineSnapshot &) const = default;
};

struct PatientRecord {
	PatientId patient_id;
	SiteId site_id;
	WorkflowState workflow_state {WorkflowState::SelfScreened};
	std::int64_t state_version {0};
	Timestamp created_at {};
	Timestamp updated_at {};
	std::optional<AccountId> account_id;
	std::vector<EligibilityAssessment> assessments;
	std::map<FormName, CaseReportForm> forms;
	std::vector<BiospecimenRecord> specimens;
	std::optional<BaselineSnapshot> baseline;

	bool operator==(const PatientRecord &) const = default;
};

struct UserAccount {
	AccountId account_id;
	std::string username;
	std::string password_hash;
	bool must_change_password {true};
	Role role {Role::Patient};
	std::optional<SiteId> site_id;
	std::optional<PatientId> patient_id;
	bool disabled {false};
	std::int64_t failed_logins {0};
	std::int64_t revision {0};

	bool operator==(const UserAccount &) const = default;
};

struct AuditSubject {
	SubjectType type {SubjectType::None};
	std::string id;

	bool operator==(const AuditSubject &) const = default;

	static AuditSubject patient(const PatientId &id) {
		return {SubjectType::Patient, id.str()};
	}
	static AuditSubject site(const SiteId &id) {
		return {SubjectType::Site, id.str()};
	}
	static AuditSubject account(const AccountId &id) {
		return {SubjectType::Account, id.str()};
	}
};

inline constexpr std::string_view kAnonymousActor = "anonymous";

struct AuditEvent {
	std::int64_t seq {0};
	Timestamp at {};
	std::string actor;
	AuditAction action {AuditAction::Read};
	AuditSubject subject;
	nlohmann::json detail = nlohmann::json::object();
	// Hex SHA-256 of the predecessor's `hash` (all zeros for seq 1) and of
	// this event's canonical encoding. Assigned by the store.
	std::string prev_hash;
	std::string hash;

	bool operator==(const AuditEvent &) const = default;
};

struct Notification {
	NotificationId notification_id;
	PatientId patient_id;
	std::string recipient;
	NotificationTemplate template_name {NotificationTemplate::EnrollmentSubmitted};
	NotificationStatus status {NotificationStatus::Pending};
	std::int64_t attempts {0};
	Timestamp created_at {};
	std::optional<Timestamp> sent_at;
	std::optional<Timestamp> next_attempt_at;
	std::optional<Timestamp> claimed_until;
	std::optional<std::string> last_error;
	std::int64_t revision {0};

	bool operator==(const Notification &) const = default;
};

inline bool is_terminal(WorkflowState s) {
	return s == WorkflowState::Ineligible || s == WorkflowState::Withdrawn
		   || s == WorkflowState::Enrolled;
}

} // namespace passdcc
