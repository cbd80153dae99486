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

#include <passdcc/model/codec.hpp>

namespace nlohmann {

void adl_serializer<passdcc::Timestamp>::to_json(json &j, passdcc::Timestamp t) {
	j = passdcc::format_rfc3339(t);
}

void adl_serializer<passdcc::Timestamp>::from_json(const json &j, passdcc::Timestamp &t) {
	auto parsed = passdcc::parse_rfc3339(j.get<std::string>());
	if (!parsed) {
		throw passdcc::Error(
			passdcc::ErrorCode::Validation, "invalid RFC 3339 timestamp: " + j.get<std::string>());
	}
	t = *parsed;
}

void adl_serializer<passdcc::FieldValue>::to_json(json &j, const passdcc::FieldValue &v) {
	std::visit([&j](const auto &x) { j = x; }, v);
}

void adl_serializer<passdcc::FieldValue>::from_json(const json &j, passdcc::FieldValue &v) {
	if (j.is_string()) {
		v = j.get<std::string>();
	} else if (j.is_number_integer()) {
		v = j.get<std::int64_t>();
	} else if (j.is_number_float()) {
		v = j.get<double>();
	} else {
		throw passdcc::Error(passdcc::ErrorCode::Validation, "field value must be a string or number");
	}
}

} // namespace nlohmann

namespace passdcc {

namespace {

template <typename E>
void enum_to_json(json &j, E v) {
	j = std::string(to_string(v));
}

template <typename E>
void enum_from_json(const json &j, E &v, std::string_view what) {
	auto text = j.get<std::string>();
	auto parsed = enum_from_string<E>(text);
	if (!parsed) {
		throw Error(ErrorCode::Validation, "unknown " + std::string(what) + " '" + text + "'");
	}
	v = *parsed;
}

template <typename T>
void get_opt(const json &j, const char *key, std::optional<T> &out) {
	auto it = j.find(key);
	if (it == j.end() || it->is_null()) {
		out.reset();
	} else {
		out = it->get<T>();
	}
}

json forms_to_json(const std::map<FormName, CaseReportForm> &forms) {
	json out = json::object();
	for (const auto &[name, form] : forms) {
		out[std::string(to_string(name))] = form;
	}
	return out;
}

std::map<FormName, CaseReportForm> forms_from_json(const json &j) {
	std::map<FormName, CaseReportForm> out;
	for (const auto &[key, value] : j.items()) {
		auto name = enum_from_string<FormName>(key);
		if (!name) {
			throw Error(ErrorCode::Validation, "unknown form '" + key + "'");
		}
		auto form = value.get<CaseReportForm>();
		if (form.form_name != *name) {
			throw Error(ErrorCode::Validation, "form key '" + key + "' does not match form_name");
		}
		out.emplace(*name, std::move(form));
	}
	return out;
}

} // namespace

#define PASSDCC_ENUM_CODEC(E, what)               \
	void to_json(json &j, const E &v) {            \
		enum_to_json(j, v);                        \
	}                                              \
	void from_json(const json &j, E &v) {          \
		enum_from_json(j, v, what);                \
	}

PASSDCC_ENUM_CODEC(Role, "role")
PASSDCC_ENUM_CODEC(WorkflowState, "workflow state")
PASSDCC_ENUM_CODEC(AssessmentKind, "assessment kind")
PASSDCC_ENUM_CODEC(Verdict, "verdict")
PASSDCC_ENUM_CODEC(Overall, "overall verdict")
PASSDCC_ENUM_CODEC(FormName, "form name")
PASSDCC_ENUM_CODEC(FormStatus, "form status")
PASSDCC_ENUM_CODEC(SpecimenKind, "specimen kind")
PASSDCC_ENUM_CODEC(AuditAction, "audit action")
PASSDCC_ENUM_CODEC(SubjectType, "subject type")
PASSDCC_ENUM_CODEC(NotificationStatus, "notification status")
PASSDCC_ENUM_CODEC(NotificationTemplate, "notification template")

#undef PASSDCC_ENUM_CODEC

void to_json(json &j, const Site &v) {
	j = json {
		{"site_id", v.site_id},
		{"name", v.name},
		{"contact_email", v.contact_email},
		{"active", v.active},
		{"revision", v.revision},
	};
}

void from_json(const json &j, Site &v) {
	v.site_id = j.at("site_id").get<SiteId>();
	v.name = j.at("name").get<std::string>();
	v.contact_email = j.at("contact_email").get<std::string>();
	v.active = j.at("active").get<bool>();
	v.revision = j.value("revision", std::int64_t {0});
}

void to_json(json &j, const CriterionInputs &v) {
	j = json {
		{"dre_palpable", v.dre_palpable},
		{"histology_aggressive", v.histology_aggressive},
		{"gleason_score", v.gleason_score},
		{"psa_ng_ml", v.psa_ng_ml},
		{"positive_cores", v.positive_cores},
		{"total_cores", v.total_cores},
	};
}

void from_json(const json &j, CriterionInputs &v) {
	v.dre_palpable = j.at("dre_palpable").get<bool>();
	v.histology_aggressive = j.at("histology_aggressive").get<bool>();
	v.gleason_score = j.at("gleason_score").get<std::int64_t>();
	v.psa_ng_ml = j.at("psa_ng_ml").get<double>();
	v.positive_cores = j.at("positive_cores").get<std::int64_t>();
	v.total_cores = j.at("total_cores").get<std::int64_t>();
}

void to_json(json &j, const EligibilityAssessment &v) {
	j = json {
		{"assessment_id", v.assessment_id},
		{"kind", v.kind},
		{"inputs", v.inputs},
		{"verdicts", v.verdicts},
		{"overall", v.overall},
		{"assessed_at", v.assessed_at},
		{"assessor", v.assessor},
		{"ruleset_version", v.ruleset_version},
	};
}

void from_json(const json &j, EligibilityAssessment &v) {
	v.assessment_id = j.at("assessment_id").get<AssessmentId>();
	v.kind = j.at("kind").get<AssessmentKind>();
	v.inputs = j.at("inputs").get<CriterionInputs>();
	v.verdicts = j.at("verdicts").get<std::map<std::string, Verdict>>();
	v.overall = j.at("overall").get<Overall>();
	v.assessed_at = j.at("assessed_at").get<Timestamp>();
	get_opt(j, "assessor", v.assessor);
	v.ruleset_version = j.value("ruleset_version", std::string {});
}

void to_json(json &j, const CaseReportForm &v) {
	j = json {
		{"form_name", v.form_name},
		{"fields", v.fields},
		{"status", v.status},
		{"last_edited_by", v.last_edited_by},
		{"last_edited_at", v.last_edited_at},
	};
}

void from_json(const json &j, CaseReportForm &v) {
	v.form_name = j.at("form_name").get<FormName>();
	v.fields = j.at("fields").get<std::map<std::string, FieldValue>>();
	v.status = j.at("status").get<FormStatus>();
	get_opt(j, "last_edited_by", v.last_edited_by);
	get_opt(j, "last_edited_at", v.last_edited_at);
}

void to_json(json &j, const BiospecimenRecord &v) {
	j = json {
		{"specimen_id", v.specimen_id},
		{"patient_id", v.patient_id},
		{"kind", v.kind},
		{"collected_at", v.collected_at},
		{"collected_by", v.collected_by},
		{"notes", v.notes},
	};
}

void from_json(const json &j, BiospecimenRecord &v) {
	v.specimen_id = j.at("specimen_id").get<SpecimenId>();
	v.patient_id = j.at("patient_id").get<PatientId>();
	v.kind = j.at("kind").get<SpecimenKind>();
	v.collected_at = j.at("collected_at").get<Timestamp>();
	v.collected_by = j.at("collected_by").get<AccountId>();
	get_opt(j, "notes", v.notes);
}

void to_json(json &j, const BaselineSnapshot &v) {
	j = json {{"captured_at", v.captured_at}, {"forms", forms_to_json(v.forms)}};
}

void from_json(const json &j, BaselineSnapshot &v) {
	v.captured_at = j.at("captured_at").get<Timestamp>();
	v.forms = forms_from_json(j.at("forms"));
}

void to_json(json &j, const PatientRecord &v) {
	j = json {
		{"patient_id", v.patient_id},
		{"site_id", v.site_id},
		{"workflow_state", v.workflow_state},
		{"state_version", v.state_version},
		{"created_at", v.created_at},
		{"updated_at", v.updated_at},
		{"account_id", v.account_id},
		{"assessments", v.assessments},
		{"forms", forms_to_json(v.forms)},
		{"specimens", v.specimens},
		{"baseline", v.baseline},
	};
}

void from_json(const json &j, PatientRecord &v) {
	v.patient_id = j.at("patient_id").get<PatientId>();
	v.site_id = j.at("site_id").get<SiteId>();
	v.workflow_state = j.at("workflow_state").get<WorkflowState>();
	v.state_version = j.at("state_version").get<std::int64_t>();
	v.created_at = j.at("created_at").get<Timestamp>();
	v.updated_at = j.at("updated_at").get<Timestamp>();
	get_opt(j, "account_id", v.account_id);
	v.assessments = j.at("assessments").get<std::vector<EligibilityAssessment>>();
	v.forms = forms_from_json(j.at("forms"));
	v.specimens = j.at("specimens").get<std::vector<BiospecimenRecord>>();
	get_opt(j, "baseline", v.baseline);
}

void to_json(json &j, const UserAccount &v) {
	j = json {
		{"account_id", v.account_id},
		{"username", v.username},
		{"password_hash", v.password_hash},
		{"must_change_password", v.must_change_password},
		{"role", v.role},
		{"site_id", v.site_id},
		{"patient_id", v.patient_id},
		{"disabled", v.disabled},
		{"failed_logins", v.failed_logins},
		{"revision", v.revision},
	};
}

void from_json(const json &j, UserAccount &v) {
	v.account_id = j.at("account_id").get<AccountId>();
	v.username = j.at("username").get<std::string>();
	v.password_hash = j.at("password_hash").get<std::string>();
	v.must_change_password = j.at("must_change_password").get<bool>();
	v.role = j.at("role").get<Role>();
	get_opt(j, "site_id", v.site_id);
	get_opt(j, "patient_id", v.patient_id);
	v.disabled = j.at("disabled").get<bool>();
	v.failed_logins = j.value("failed_logins", std::int64_t {0});
	v.revision = j.value("revision", std::int64_t {0});
}

void to_json(json &j, const AuditSubject &v) {
	j = json {{"type", v.type}, {"id", v.id}};
}

void from_json(const json &j, AuditSubject &v) {
	v.type = j.at("type").get<SubjectType>();
	v.id = j.at("id").get<std::string>();
}

void to_json(json &j, const AuditEvent &v) {
	j = json {
		{"seq", v.seq},
		{"at", v.at},
		{"actor", v.actor},
		{"action", v.action},
		{"subject", v.subject},
		{"detail", v.detail},
		{"prev_hash", v.prev_hash},
		{"hash", v.hash},
	};
}

void from_json(const json &j, AuditEvent &v) {
	v.seq = j.at("seq").get<std::int64_t>();
	v.at = j.at("at").get<Timestamp>();
	v.actor = j.at("actor").get<std::string>();
	v.action = j.at("action").get<AuditAction>();
	v.subject = j.at("subject").get<AuditSubject>();
	v.detail = j.at("detail");
	v.prev_hash = j.value("prev_hash", std::string {});
	v.hash = j.value("hash", std::string {});
}

void to_json(json &j, const Notification &v) {
	j = json {
		{"notification_id", v.notification_id},
		{"patient_id", v.patient_id},
		{"recipient", v.recipient},
		{"template", v.template_name},
		{"status", v.status},
		{"attempts", v.attempts},
		{"created_at", v.created_at},
		{"sent_at", v.sent_at},
		{"next_attempt_at", v.next_attempt_at},
		{"claimed_until", v.claimed_until},
		{"last_error", v.last_error},
		{"revision", v.revision},
	};
}

void from_json(const json &j, Notification &v) {
	v.notification_id = j.at("notification_id").get<NotificationId>();
	v.patient_id = j.at("patient_id").get<PatientId>();
	v.recipient = j.at("recipient").get<std::string>();
	v.template_name = j.at("template").get<NotificationTemplate>();
	v.status = j.at("status").get<NotificationStatus>();
	v.attempts = j.at("attempts").get<std::int64_t>();
	v.created_at = j.at("created_at").get<Timestamp>();
	get_opt(j, "sent_at", v.sent_at);
	get_opt(j, "next_attempt_at", v.next_attempt_at);
	get_opt(j, "claimed_until", v.claimed_until);
	get_opt(j, "last_error", v.last_error);
	v.revision = j.value("revision", std::int64_t {0});
}

json public_view(const UserAccount &account) {
	json j = account;
	j.erase("password_hash");
	return j;
}

} // namespace passdcc
