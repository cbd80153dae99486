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

#include <passdcc/model/validate.hpp>

#include <cmath>

#include <passdcc/model/codec.hpp>

namespace passdcc {

namespace {

bool looks_like_email(const std::string &s) {
	auto at = s.find('@');
	return at != std::string::npos && at > 0 && s.find('.', at) != std::string::npos
		   && s.back() != '.';
}

bool is_hex_digest(const std::string &s) {
	if (s.size() != 64) {
		return false;
	}
	for (char c : s) {
		if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
			return false;
		}
	}
	return true;
}

void prefixed(Violations &out, const std::string &prefix, const Violations &inner) {
	for (const auto &v : inner) {
		out.push_back({prefix + v.field, v.rule});
	}
}

bool past_credentialing(WorkflowState s) {
	return s == WorkflowState::Credentialed || s == WorkflowState::EnrollmentInProgress
		   || s == WorkflowState::Enrolled;
}

} // namespace

Violations validate(const Site &site) {
	Violations out;
	if (site.site_id.empty()) {
		out.push_back({"site_id", "site_id required"});
	}
	if (site.name.empty()) {
		out.push_back({"name", "name required"});
	}
	if (!looks_like_email(site.contact_email)) {
		out.push_back({"contact_email", "contact_email must be an email address"});
	}
	return out;
}

Violations validate(const CriterionInputs &in) {
	Violations out;
	if (in.gleason_score < 2 || in.gleason_score > 10) {
		out.push_back({"gleason_score", "2 <= gleason_score <= 10"});
	}
	if (!(in.psa_ng_ml >= 0.0) || !std::isfinite(in.psa_ng_ml)) {
		out.push_back({"psa_ng_ml", "psa_ng_ml >= 0"});
	}
	if (in.positive_cores < 0) {
		out.push_back({"positive_cores", "positive_cores >= 0"});
	}
	if (in.total_cores < 1) {
		out.push_back({"total_cores", "total_cores >= 1"});
	}
	if (in.positive_cores > in.total_cores) {
		out.push_back({"positive_cores", "positive_cores <= total_cores"});
	}
	return out;
}

Violations validate(const EligibilityAssessment &a) {
	Violations out;
	if (a.assessment_id.empty()) {
		out.push_back({"assessment_id", "assessment_id required"});
	}
	prefixed(out, "inputs.", validate(a.inputs));
	if (a.verdicts.empty()) {
		out.push_back({"verdicts", "at least one verdict"});
	}
	bool all_pass = true;
	for (const auto &[_, v] : a.verdicts) {
		all_pass = all_pass && v == Verdict::Pass;
	}
	if ((a.overall == Overall::Eligible) != all_pass) {
		out.push_back({"overall", "overall == ELIGIBLE iff every verdict is PASS"});
	}
	if (a.kind == AssessmentKind::PhysicianValidation && (!a.assessor || a.assessor->empty())) {
		out.push_back({"assessor", "assessor required for PHYSICIAN_VALIDATION"});
	}
	return out;
}

Violations validate(const CaseReportForm &form, const FormSchema &schema) {
	Violations out;
	if (form.form_name != schema.form) {
		out.push_back({"form_name", "form_name must match schema"});
	}
	for (const auto &[name, value] : form.fields) {
		const auto *spec = schema.find(name);
		if (!spec) {
			out.push_back({"fields." + name, "unknown field"});
		} else if (auto problem = check_field(*spec, value)) {
			out.push_back({"fields." + name, *problem});
		}
	}
	if (form.status != compute_status(form.fields, schema)) {
		out.push_back({"status", "status == COMPLETE iff every required field has a valid value"});
	}
	if (!form.fields.empty() && (!form.last_edited_by || !form.last_edited_at)) {
		out.push_back({"last_edited_by", "edited form must record its editor"});
	}
	return out;
}

Violations validate(const BiospecimenRecord &s) {
	Violations out;
	if (s.specimen_id.empty()) {
		out.push_back({"specimen_id", "specimen_id required"});
	}
	if (s.patient_id.empty()) {
		out.push_back({"patient_id", "patient_id required"});
	}
	if (s.collected_by.empty()) {
		out.push_back({"collected_by", "collected_by required"});
	}
	return out;
}

Violations validate(const UserAccount &a) {
	Violations out;
	if (a.account_id.empty()) {
		out.push_back({"account_id", "account_id required"});
	}
	if (a.username.empty()) {
		out.push_back({"username", "username required"});
	}
	if (a.role != Role::DccAdmin && (!a.site_id || a.site_id->empty())) {
		out.push_back({"site_id", "site_id required"});
	}
	if (a.role == Role::Patient && (!a.patient_id || a.patient_id->empty())) {
		out.push_back({"patient_id", "PATIENT account must reference a patient record"});
	}
	if (a.role != Role::Patient && a.patient_id) {
		out.push_back({"patient_id", "only PATIENT accounts reference a patient record"});
	}
	if (a.password_hash.rfind("pbkdf2-sha256$", 0) != 0) {
		out.push_back({"password_hash", "password must be stored as a digest"});
	}
	if (a.failed_logins < 0) {
		out.push_back({"failed_logins", "failed_logins >= 0"});
	}
	return out;
}

Violations validate(const PatientRecord &r, const FormCatalog *catalog) {
	Violations out;
	if (r.patient_id.empty()) {
		out.push_back({"patient_id", "patient_id required"});
	}
	if (r.site_id.empty()) {
		out.push_back({"site_id", "site_id required"});
	}
	if (r.state_version < 1) {
		out.push_back({"state_version", "state_version >= 1"});
	}
	if (r.updated_at < r.created_at) {
		out.push_back({"updated_at", "updated_at >= created_at"});
	}
	bool has_account = r.account_id.has_value();
	if (past_credentialing(r.workflow_state) && !has_account) {
		out.push_back({"account_id", "account_id required once CREDENTIALED"});
	}
	if (!past_credentialing(r.workflow_state) && r.workflow_state != WorkflowState::Withdrawn
		&& has_account) {
		out.push_back({"account_id", "account_id must be absent before CREDENTIALED"});
	}
	for (std::size_t i = 0; i < r.assessments.size(); ++i) {
		prefixed(out, "assessments[" + std::to_string(i) + "].", validate(r.assessments[i]));
	}
	bool enrolled_once = r.workflow_state == WorkflowState::Enrolled
						 || (r.workflow_state == WorkflowState::Withdrawn && r.baseline);
	if (!r.specimens.empty() && !enrolled_once) {
		out.push_back({"specimens", "specimens attach only to ENROLLED patients"});
	}
	for (std::size_t i = 0; i < r.specimens.size(); ++i) {
		const auto &s = r.specimens[i];
		std::string prefix = "specimens[" + std::to_string(i) + "].";
		prefixed(out, prefix, validate(s));
		if (s.patient_id != r.patient_id) {
			out.push_back({prefix + "patient_id", "specimen must reference its owning patient"});
		}
	}
	if (r.workflow_state == WorkflowState::Enrolled && !r.baseline) {
		out.push_back({"baseline", "ENROLLED record carries its baseline snapshot"});
	}
	if (catalog) {
		for (const auto &[name, form] : r.forms) {
			prefixed(
				out,
				"forms." + std::string(to_string(name)) + ".",
				validate(form, catalog->schema(name)));
		}
	}
	return out;
}

Violations validate(const AuditEvent &e) {
	Violations out;
	if (e.seq < 1) {
		out.push_back({"seq", "seq >= 1"});
	}
	if (e.actor.empty()) {
		out.push_back({"actor", "actor required"});
	}
	if (!e.detail.is_object()) {
		out.push_back({"detail", "detail must be an object"});
	}
	if (!is_hex_digest(e.prev_hash)) {
		out.push_back({"prev_hash", "prev_hash must be a hex SHA-256 digest"});
	}
	if (!is_hex_digest(e.hash)) {
		out.push_back({"hash", "hash must be a hex SHA-256 digest"});
	}
	return out;
}

Violations validate(const Notification &n) {
	Violations out;
	if (n.notification_id.empty()) {
		out.push_back({"notification_id", "notification_id required"});
	}
	if (n.patient_id.empty()) {
		out.push_back({"patient_id", "patient_id required"});
	}
	if (!looks_like_email(n.recipient)) {
		out.push_back({"recipient", "recipient must be an email address"});
	}
	if (n.attempts < 0) {
		out.push_back({"attempts", "attempts >= 0"});
	}
	if (n.status == NotificationStatus::Sent && !n.sent_at) {
		out.push_back({"sent_at", "SENT notification records sent_at"});
	}
	return out;
}

json violations_json(const Violations &violations) {
	json out = json::array();
	for (const auto &v : violations) {
		out.push_back({{"field", v.field}, {"message", v.rule}});
	}
	return out;
}

} // namespace passdcc
