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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <passdcc/model/types.hpp>

namespace passdcc {

enum class FieldType { Text, Integer, Decimal, Date, Enum };
PASSDCC_ENUM_NAMES(
	FieldType,
	{FieldType::Text, "TEXT"},
	{FieldType::Integer, "INTEGER"},
	{FieldType::Decimal, "DECIMAL"},
	{FieldType::Date, "DATE"},
	{FieldType::Enum, "ENUM"});

struct FieldSpec {
	std::string name;
	FieldType type {FieldType::Text};
	bool required {false};
	std::optional<double> min;
	std::optional<double> max;
	std::vector<std::string> choices;  // Enum only
	std::string label;
};

struct FormSchema {
	FormName form {FormName::Demographics};
	std::string title;
	std::vector<FieldSpec> fields;

	const FieldSpec *find(std::string_view name) const;
};

// Problem with one submitted field value, or empty when the value fits.
std::optional<std::string> check_field(const FieldSpec &spec, const FieldValue &value);

// Coerces a JSON scalar to the field's stored representation (integral
// numbers for DECIMAL become double, 4.0 for INTEGER becomes 4). Returns
// nullopt when the JSON kind cannot represent the field type.
std::optional<FieldValue> coerce_field(const FieldSpec &spec, const nlohmann::json &value);

FormStatus compute_status(const std::map<std::string, FieldValue> &fields, const FormSchema &schema);

// Required-field schemas for every CRF. Loaded from a data file; every
// FormName must be present.
class FormCatalog {
public:
	static FormCatalog load(std::string_view document);
	static FormCatalog load_file(const std::string &path);

	const FormSchema &schema(FormName form) const;
	const std::map<FormName, FormSchema> &schemas() const {
		return schemas_;
	}
	// Served verbatim at GET /api/v1/schemas.
	nlohmann::json to_json() const;

private:
	std::map<FormName, FormSchema> schemas_;
};

} // namespace passdcc
