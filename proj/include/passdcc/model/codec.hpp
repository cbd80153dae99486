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

// Canonical JSON encoding: snake_case keys, RFC 3339 timestamps,
// UPPER_SNAKE enums, absent optionals as null. This is both the wire and
// the storage format.

#include <optional>
#include <string>

#include <json.hpp>

#include <passdcc/model/error.hpp>
#include <passdcc/model/types.hpp>

namespace nlohmann {

template <>
struct adl_serializer<passdcc::Timestamp> {
	static void to_json(json &j, passdcc::Timestamp t);
	static void from_json(const json &j, passdcc::Timestamp &t);
};

template <>
struct adl_serializer<passdcc::FieldValue> {
	static void to_json(json &j, const passdcc::FieldValue &v);
	static void from_json(const json &j, passdcc::FieldValue &v);
};

template <typename T>
struct adl_serializer<std::optional<T>> {
	static void to_json(json &j, const std::optional<T> &v) {
		if (v) {
			j = *v;
		} else {
			j = nullptr;
		}
	}
	static void from_json(const json &j, std::optional<T> &v) {
		if (j.is_null()) {
			v.reset();
		} else {
			v = j.get<T>();
		}
	}
};

} // namespace nlohmann

namespace passdcc {

using json = nlohmann::json;

template <typename Tag>
void to_json(json &j, const Id<Tag> &id) {
	j = id.str();
}
template <typename Tag>
void from_json(const json &j, Id<Tag> &id) {
	id = Id<Tag> {j.get<std::string>()};
}

#define PASSDCC_DECLARE_CODEC(T)      \
	void to_json(json &j, const T &v); \
	void from_json(const json &j, T &v)

PASSDCC_DECLARE_CODEC(Role);
PASSDCC_DECLARE_CODEC(WorkflowState);
PASSDCC_DECLARE_CODEC(AssessmentKind);
PASSDCC_DECLARE_CODEC(Verdict);
PASSDCC_DECLARE_CODEC(Overall);
PASSDCC_DECLARE_CODEC(FormName);
PASSDCC_DECLARE_CODEC(FormStatus);
PASSDCC_DECLARE_CODEC(SpecimenKind);
PASSDCC_DECLARE_CODEC(AuditAction);
PASSDCC_DECLARE_CODEC(SubjectType);
PASSDCC_DECLARE_CODEC(NotificationStatus);
PASSDCC_DECLARE_CODEC(NotificationTemplate);

PASSDCC_DECLARE_CODEC(Site);
PASSDCC_DECLARE_CODEC(CriterionInputs);
PASSDCC_DECLARE_CODEC(EligibilityAssessment);
PASSDCC_DECLARE_CODEC(CaseReportForm);
PASSDCC_DECLARE_CODEC(BiospecimenRecord);
PASSDCC_DECLARE_CODEC(BaselineSnapshot);
PASSDCC_DECLARE_CODEC(PatientRecord);
PASSDCC_DECLARE_CODEC(UserAccount);
PASSDCC_DECLARE_CODEC(AuditSubject);
PASSDCC_DECLARE_CODEC(AuditEvent);
PASSDCC_DECLARE_CODEC(Notification);

#undef PASSDCC_DECLARE_CODEC

// Decodes with library exceptions mapped to Error(Validation).
template <typename T>
T decode(const json &j) {
	try {
		return j.get<T>();
	} catch (const json::exception &e) {
		throw Error(ErrorCode::Validation, std::string("malformed document: ") + e.what());
	}
}

template <typename T>
std::string encode(const T &value) {
	return json(value).dump();
}

// Account view safe for responses and exports: no password_hash.
json public_view(const UserAccount &account);

} // namespace passdcc
