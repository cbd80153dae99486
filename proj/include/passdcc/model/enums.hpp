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
#include <optional>
#include <string_view>
#include <utility>

namespace passdcc {

// Each domain enum specializes EnumNames with its UPPER_SNAKE wire names.
template <typename E>
struct EnumNames;

template <typename E>
constexpr std::string_view to_string(E value)
	requires requires { EnumNames<E>::values; }
{
	for (const auto &[v, name] : EnumNames<E>::values) {
		if (v == value) {
			return name;
		}
	}
	return "?";
}

template <typename E>
constexpr std::optional<E> enum_from_string(std::string_view text) {
	for (const auto &[v, name] : EnumNames<E>::values) {
		if (name == text) {
			return v;
		}
	}
	return std::nullopt;
}

template <typename E>
constexpr auto all_values() {
	std::array<E, EnumNames<E>::values.size()> out {};
	for (std::size_t i = 0; i < out.size(); ++i) {
		out[i] = EnumNames<E>::values[i].first;
	}
	return out;
}

#define PASSDCC_ENUM_NAMES(E, ...)                                                   \
	template <>                                                                      \
	struct EnumNames<E> {                                                            \
		static constexpr auto values = std::to_array<std::pair<E, std::string_view>>({ \
			__VA_ARGS__});                                                           \
	}

enum class Role { Patient, Coordinator, Investigator, Researcher, DccAdmin };
PASSDCC_ENUM_NAMES(
	Role,
	{Role::Patient, "PATIENT"},
	{Role::Coordinator, "COORDINATOR"},
	{Role::Investigator, "INVESTIGATOR"},
	{Role::Researcher, "RESEARCHER"},
	{Role::DccAdmin, "DCC_ADMIN"});

enum class WorkflowState {
	SelfScreened,
	Consulted,
	PhysicianValidated,
	Credentialed,
	EnrollmentInProgress,
	Enrolled,
	Ineligible,
	Withdrawn,
};
PASSDCC_ENUM_NAMES(
	WorkflowState,
	{WorkflowState::SelfScreened, "SELF_SCREENED"},
	{WorkflowState::Consulted, "CONSULTED"},
	{WorkflowState::PhysicianValidated, "PHYSICIAN_VALIDATED"},
	{WorkflowState::Credentialed, "CREDENTIALED"},
	{WorkflowState::EnrollmentInProgress, "ENROLLMENT_IN_PROGRESS"},
	{WorkflowState::Enrolled, "ENROLLED"},
	{WorkflowState::Ineligible, "INELIGIBLE"},
	{WorkflowState::Withdrawn, "WITHDRAWN"});

enum class AssessmentKind { SelfScreen, PhysicianValidation };
PASSDCC_ENUM_NAMES(
	AssessmentKind,
	{AssessmentKind::SelfScreen, "SELF_SCREEN"},
	{AssessmentKind::PhysicianValidation, "PHYSICIAN_VALIDATION"});

enum class Verdict { Pass, Fail };
PASSDCC_ENUM_NAMES(Verdict, {Verdict::Pass, "PASS"}, {Verdict::Fail, "FAIL"});

enum class Overall { Eligible, Ineligible };
PASSDCC_ENUM_NAMES(Overall, {Overall::Eligible, "ELIGIBLE"}, {Overall::Ineligible, "INELIGIBLE"});

enum class FormName { Demographics, PsaHistory, Biopsy, Dre };
PASSDCC_ENUM_NAMES(
	FormName,
	{FormName::Demographics, "DEMOGRAPHICS"},
	{FormName::PsaHistory, "PSA_HISTORY"},
	{FormName::Biopsy, "BIOPSY"},
	{FormName::Dre, "DRE"});

enum class FormStatus { Empty, InProgress, Complete };
PASSDCC_ENUM_NAMES(
	FormStatus,
	{FormStatus::Empty, "EMPTY"},
	{FormStatus::InProgress, "IN_PROGRESS"},
	{FormStatus::Complete, "COMPLETE"});

enum class SpecimenKind { Urine, Serum };
PASSDCC_ENUM_NAMES(SpecimenKind, {SpecimenKind::Urine, "URINE"}, {SpecimenKind::Serum, "SERUM"});

enum class AuditAction {
	StateTransition,
	FormWrite,
	Read,
	Login,
	Logout,
	LoginFailed,
	CredentialIssued,
	PasswordChanged,
	NotifySent,
	Export,
	AdminChange,
	AccessDenied,
	SelfCheck,
	SpecimenRegistered,
};
PASSDCC_ENUM_NAMES(
	AuditAction,
	{AuditAction::StateTransition, "STATE_TRANSITION"},
	{AuditAction::FormWrite, "FORM_WRITE"},
	{AuditAction::Read, "READ"},
	{AuditAction::Login, "LOGIN"},
	{AuditAction::Logout, "LOGOUT"},
	{AuditAction::LoginFailed, "LOGIN_FAILED"},
	{AuditAction::CredentialIssued, "CREDENTIAL_ISSUED"},
	{AuditAction::PasswordChanged, "PASSWORD_CHANGED"},
	{AuditAction::NotifySent, "NOTIFY_SENT"},
	{AuditAction::Export, "EXPORT"},
	{AuditAction::AdminChange, "ADMIN_CHANGE"},
	{AuditAction::AccessDenied, "ACCESS_DENIED"},
	{AuditAction::SelfCheck, "SELF_CHECK"},
	{AuditAction::SpecimenRegistered, "SPECIMEN_REGISTERED"});

enum class SubjectType { None, Patient, Site, Account, Notification };
PASSDCC_ENUM_NAMES(
	SubjectType,
	{SubjectType::None, "NONE"},
	{SubjectType::Patient, "PATIENT"},
	{SubjectType::Site, "SITE"},
	{SubjectType::Account, "ACCOUNT"},
	{SubjectType::Notification, "NOTIFICATION"});

enum class NotificationStatus { Pending, Sent, Failed };
PASSDCC_ENUM_NAMES(
	NotificationStatus,
	{NotificationStatus::Pending, "PENDING"},
	{NotificationStatus::Sent, "SENT"},
	{NotificationStatus::Failed, "FAILED"});

enum class NotificationTemplate { EnrollmentSubmitted };
PASSDCC_ENUM_NAMES(NotificationTemplate, {NotificationTemplate::EnrollmentSubmitted, "ENROLLMENT_SUBMITTED"});

} // namespace passdcc
