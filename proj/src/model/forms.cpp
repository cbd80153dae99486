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

#include <passdcc/model/forms.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <passdcc/model/codec.hpp>

namespace passdcc {

namespace {

Error config_error(std::string message, json detail = nullptr) {
	return Error(ErrorCode::Configuration, std::move(message), std::move(detail));
}

FieldSpec parse_field(const json &j, const std::string &form) {
	static const std::set<std::string> kKeys {"name", "type", "required", "min", "max", "choices", "label"};
	for (const auto &[key, _] : j.items()) {
		if (!kKeys.count(key)) {
			throw config_error("form " + form + ": unknown field attribute '" + key + "'");
		}
	}
	FieldSpec spec;
	spec.name = j.at("name").get<std::string>();
	auto type = enum_from_string<FieldType>(j.at("type").get<std::string>());
	if (!type) {
		throw config_error(
			"form " + form + ": field '" + spec.name + "' has unknown type '"
			+ j.at("type").get<std::string>() + "'");
	}
	spec.type = *type;
	spec.required = j.value("required", false);
	if (j.contains("min")) {
		spec.min = j.at("min").get<double>();
	}
	if (j.contains("max")) {
		spec.max = j.at("max").get<double>();
	}
	if (j.contains("choices")) {
		spec.choices = j.at("choices").get<std::vector<std::string>>();
	}
	spec.label = j.value("label", spec.name);
	if (spec.type == FieldType::Enum && spec.choices.empty()) {
		throw config_error("form " + form + ": enum field '" + spec.name + "' has no choices");
	}
	return spec;
}

} // namespace

const FieldSpec *FormSchema::find(std::string_view name) const {
	auto it = std::find_if(fields.begin(), fields.end(), [&](const FieldSpec &f) {
		return f.name == name;
	});
	return it == fields.end() ? nullptr : &*it;
}

std::optional<std::string> check_field(const FieldSpec &spec, const FieldValue &value) {
	auto in_range = [&](double x) -> std::optional<std::string> {
		if (!std::isfinite(x)) {
			return "must be finite";
		}
		if (spec.min && x < *spec.min) {
			return "must be >= " + json(*spec.min).dump();
		}
		if (spec.max && x > *spec.max) {
			return "must be <= " + json(*spec.max).dump();
		}
		return std::nullopt;
	};
	switch (spec.type) {
	case FieldType::Text:
		if (!std::holds_alternative<std::string>(value)) {
			return "must be text";
		}
		return std::nullopt;
	case FieldType::Date:
		if (!std::holds_alternative<std::string>(value)
			|| !is_valid_date(std::get<std::string>(value))) {
			return "must be a date YYYY-MM-DD";
		}
		return std::nullopt;
	case FieldType::Enum: {
		const auto *s = std::get_if<std::string>(&value);
		if (!s || std::find(spec.choices.begin(), spec.choices.end(), *s) == spec.choices.end()) {
			return "must be one of the listed choices";
		}
		return std::nullopt;
	}
	case FieldType::Integer:
		if (!std::holds_alternative<std::int64_t>(value)) {
			return "must be an integer";
		}
		return in_range(static_cast<double>(std::get<std::int64_t>(value)));
	case FieldType::Decimal:
		if (!std::holds_alternative<double>(value)) {
			return "must be a decimal number";
		}
		return in_range(std::get<double>(value));
	}
	return "unsupported field type";
}

std::optional<FieldValue> coerce_field(const FieldSpec &spec, const json &value) {
	switch (spec.type) {
	case FieldType::Text:
	case FieldType::Date:
	case FieldType::Enum:
		if (value.is_string()) {
			return FieldValue {value.get<std::string>()};
		}
		return std::nullopt;
	case FieldType::Integer:
		if (value.is_number_integer()) {
			return FieldValue {value.get<std::int64_t>()};
		}
		if (value.is_number_float()) {
			double d = value.get<double>();
			if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) < 9.0e15) {
				return FieldValue {static_cast<std::int64_t>(d)};
			}
		}
		return std::nullopt;
	case FieldType::Decimal:
		if (value.is_number()) {
			return FieldValue {value.get<double>()};
		}
		return std::nullopt;
	}
	return std::nullopt;
}

FormStatus compute_status(const std::map<std::string, FieldValue> &fields, const FormSchema &schema) {
	if (fields.empty()) {
		return FormStatus::Empty;
	}
	for (const auto &spec : schema.fields) {
		if (!spec.required) {
			continue;
		}
		auto it = fields.find(spec.name);
		if (it == fields.end() || check_field(spec, it->second)) {
			return FormStatus::InProgress;
		}
	}
	return FormStatus::Complete;
}

FormCatalog FormCatalog::load(std::string_view document) {
	json doc;
	try {
		doc = json::parse(document);
	} catch (const json::parse_error &e) {
		throw config_error(std::string("form schema parse error: ") + e.what(), {{"byte", e.byte}});
	}
	FormCatalog catalog;
	try {
		for (const auto &[key, value] : doc.at("forms").items()) {
			auto name = enum_from_string<FormName>(key);
			if (!name) {
				throw config_error("unknown form '" + key + "'");
			}
			FormSchema schema;
			schema.form = *name;
			schema.title = value.value("title", key);
			std::set<std::string> seen;
			for (const auto &f : value.at("fields")) {
				auto spec = parse_field(f, key);
				if (!seen.insert(spec.name).second) {
					throw config_error("form " + key + ": duplicate field '" + spec.name + "'");
				}
				schema.fields.push_back(std::move(spec));
			}
			catalog.schemas_.emplace(*name, std::move(schema));
		}
	} catch (const json::exception &e) {
		throw config_error(std::string("form schema document malformed: ") + e.what());
	}
	for (auto form : all_values<FormName>()) {
		if (!catalog.schemas_.count(form)) {
			throw config_error("form schema missing for " + std::string(to_string(form)));
		}
	}
	return catalog;
}

FormCatalog FormCatalog::load_file(const std::string &path) {
	std::ifstream in(path);
	if (!in) {
		throw config_error("cannot read form schema file " + path);
	}
	std::stringstream buf;
	buf << in.rdbuf();
	return load(buf.str());
}

const FormSchema &FormCatalog::schema(FormName form) const {
	return schemas_.at(form);
}

json FormCatalog::to_json() const {
	json forms = json::object();
	for (const auto &[name, schema] : schemas_) {
		json fields = json::array();
		for (const auto &f : schema.fields) {
			json jf {
				{"name", f.name},
				{"type", std::string(passdcc::to_string(f.type))},
				{"required", f.required},
				{"label", f.label},
			};
			if (f.min) {
				jf["min"] = *f.min;
			}
			if (f.max) {
				jf["max"] = *f.max;
			}
			if (!f.choices.empty()) {
				jf["choices"] = f.choices;
			}
			fields.push_back(std::move(jf));
		}
		forms[std::string(passdcc::to_string(name))] = {{"title", schema.title}, {"fields", fields}};
	}
	return {{"forms", forms}};
}

} // namespace passdcc
