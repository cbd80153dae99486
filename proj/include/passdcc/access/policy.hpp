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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include <passdcc/model/enums.hpp>
#include <passdcc/model/types.hpp>

namespace passdcc::access {

enum class Action {
	RegisterProspect,
	RecordConsultation,
	PhysicianValidate,
	IssueCredentials,
	WriteForm,
	SubmitEnrollment,
	Withdraw,
	RegisterSpecimen,
	ReadPatient,
	ListPatients,
	Export,
	ManageSites,
	ManageUsers,
	ReadAudit,
};

enum class Scope { OwnRecord, OwnSite, AllSites };

} // namespace passdcc::access

namespace passdcc {

PASSDCC_ENUM_NAMES(
	access::Action,
	{access::Action::RegisterProspect, "REGISTER_PROSPECT"},
	{access::Action::RecordConsultation, "RECORD_CONSULTATION"},
	{access::Action::PhysicianValidate, "PHYSICIAN_VALIDATE"},
	{access::Action::IssueCredentials, "ISSUE_CREDENTIALS"},
	{access::Action::WriteForm, "WRITE_FORM"},
	{access::Action::SubmitEnrollment, "SUBMIT_ENROLLMENT"},
	{access::Action::Withdraw, "WITHDRAW"},
	{access::Action::RegisterSpecimen, "REGISTER_SPECIMEN"},
	{access::Action::ReadPatient, "READ_PATIENT"},
	{access::Action::ListPatients, "LIST_PATIENTS"},
	{access::Action::Export, "EXPORT"},
	{access::Action::ManageSites, "MANAGE_SITES"},
	{access::Action::ManageUsers, "MANAGE_USERS"},
	{access::Action::ReadAudit, "READ_AUDIT"});

PASSDCC_ENUM_NAMES(
	access::Scope,
	{access::Scope::OwnRecord, "OWN_RECORD"},
	{access::Scope::OwnSite, "OWN_SITE"},
	{access::Scope::AllSites, "ALL_SITES"});

} // namespace passdcc

namespace passdcc::access {

// What the action touches. A missing site means "the actor's own site"
// for site-scoped roles (e.g. listing without a site filter).
struct Subject {
	std::optional<SiteId> site;
	std::optional<PatientId> patient;

	static Subject of_patient(const PatientRecord &record) {
		return {record.site_id, record.patient_id};
	}
	static Subject of_site(SiteId site) {
		return {std::move(site), std::nullopt};
	}
};

namespace reason {
inline constexpr std::string_view kAccountDisabled = "account_disabled";
inline constexpr std::string_view kUnknownAction = "unknown_action";
inline constexpr std::string_view kNotPermitted = "not_permitted";
inline constexpr std::string_view kCrossSite = "cross_site";
inline constexpr std::string_view kOwnRecordOnly = "own_record_only";
inline constexpr std::string_view kNoSite = "no_site";
} // namespace reason

struct Decision {
	bool allowed {false};
	std::string reason;          // empty on ALLOW
	std::optional<Scope> scope;  // scope the ALLOW was granted under
	bool cross_site {false};     // ALLOW on a subject outside the actor's site

	explicit operator bool() const {
		return allowed;
	}
};

// Role x action -> scope (or deny). Loaded from a data file; the loader
// rejects any document that leaves a pair unspecified.
class CapabilityMatrix {
public:
	static CapabilityMatrix load(std::string_view document);
	static CapabilityMatrix load_file(const std::string &path);

	std::optional<Scope> lookup(Role role, Action action) const;
	const std::string &version() const {
		return version_;
	}

private:
	std::string version_;
	std::map<std::pair<Role, Action>, std::optional<Scope>> entries_;
};

class Policy {
public:
	explicit Policy(CapabilityMatrix matrix);

	Decision authorize(const UserAccount &actor, Action action, const Subject &subject) const;
	// Action by wire name; names outside the Action enum are denied.
	Decision authorize(const UserAccount &actor, std::string_view action, const Subject &subject) const;

	const CapabilityMatrix &matrix() const {
		return matrix_;
	}

private:
	CapabilityMatrix matrix_;
};

} // namespace passdcc::access
