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

#include <passdcc/access/deidentify.hpp>

#include <passdcc/model/codec.hpp>
#include <passdcc/security/crypto.hpp>

namespace passdcc::access {

namespace {

json form_view(const CaseReportForm &form, const FormSchema &schema) {
	json fields = json::object();
	for (const auto &[name, value] : form.fields) {
		const auto *spec = schema.find(name);
		if (!spec || spec->type == FieldType::Text) {
			continue;
		}
		if (spec->type == FieldType::Date) {
			const auto &text = std::get<std::string>(value);
			fields[name] = text.substr(0, 7);
		} else {
			fields[name] = value;
		}
	}
	return {{"status", form.status}, {"fields", fields}};
}

json forms_view(const std::map<FormName, CaseReportForm> &forms, const FormCatalog &catalog) {
	json out = json::object();
	for (const auto &[name, form] : forms) {
		out[std::string(to_string(name))] = form_view(form, catalog.schema(name));
	}
	return out;
}

} // namespace

std::string pseudonym(const PatientId &patient, std::string_view salt) {
	return security::sha256_hex(std::string(salt) + ":" + patient.str()).substr(0, 24);
}

json deidentify(const PatientRecord &record, const FormCatalog &catalog, std::string_view salt) {
	json assessments = json::array();
	for (const auto &a : record.assessments) {
		assessments.push_back({
			{"kind", a.kind},
			{"inputs", a.inputs},
			{"verdicts", a.verdicts},
			{"overall", a.overall},
			{"assessed_month", month_of(a.assessed_at)},
			{"ruleset_version", a.ruleset_version},
		});
	}
	json specimens = json::array();
	for (const auto &s : record.specimens) {
		specimens.push_back({{"kind", s.kind}, {"collected_month", month_of(s.collected_at)}});
	}
	json out {
		{"subject_ref", pseudonym(record.patient_id, salt)},
		{"site_id", record.site_id},
		{"workflow_state", record.workflow_state},
		{"created_month", month_of(record.created_at)},
		{"updated_month", month_of(record.updated_at)},
		{"assessments", assessments},
		{"forms", forms_view(record.forms, catalog)},
		{"specimens", specimens},
		{"baseline", nullptr},
	};
	if (record.baseline) {
		out["baseline"] = {
			{"captured_month", month_of(record.baseline->captured_at)},
			{"forms", forms_view(record.baseline->forms, catalog)},
		};
	}
	return out;
}

} // namespace passdcc::access
