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

#include <passdcc/eligibility/rules.hpp>

#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <passdcc/model/error.hpp>

namespace passdcc::eligibility {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<CriterionField, std::string_view>, 7> kFields {{
	{CriterionField::DrePalpable, "dre_palpable"},
	{CriterionField::HistologyAggressive, "histology_aggressive"},
	{CriterionField::GleasonScore, "gleason_score"},
	{CriterionField::PsaNgMl, "psa_ng_ml"},
	{CriterionField::PositiveCores, "positive_cores"},
	{CriterionField::TotalCores, "total_cores"},
	{CriterionField::CoreFraction, "core_fraction"},
}};

constexpr std::array<std::pair<Comparison, std::string_view>, 5> kOperators {{
	{Comparison::Eq, "=="},
	{Comparison::Le, "<="},
	{Comparison::Lt, "<"},
	{Comparison::Ge, ">="},
	{Comparison::Gt, ">"},
}};

enum class FieldKind { Boolean, Integer, Decimal };

FieldKind kind_of(CriterionField f) {
	switch (f) {
	case CriterionField::DrePalpable:
	case CriterionField::HistologyAggressive:
		return FieldKind::Boolean;
	case CriterionField::GleasonScore:
	case CriterionField::PositiveCores:
	case CriterionField::TotalCores:
		return FieldKind::Integer;
	case CriterionField::PsaNgMl:
	case CriterionField::CoreFraction:
		return FieldKind::Decimal;
	}
	return FieldKind::Decimal;
}

Error semantic(const std::string &rule, std::string message, json extra = json::object()) {
	extra["rule"] = rule;
	return Error(ErrorCode::Configuration, "rule '" + rule + "': " + message, std::move(extra));
}

std::pair<std::size_t, std::size_t> line_column(std::string_view doc, std::size_t byte) {
	std::size_t line = 1;
	std::size_t col = 1;
	for (std::size_t i = 0; i + 1 < byte && i < doc.size(); ++i) {
		if (doc[i] == '\n') {
			++line;
			col = 1;
		} else {
			++col;
		}
	}
	return {line, col};
}

json parse_document(std::string_view document) {
	try {
		return json::parse(document);
	} catch (const json::parse_error &e) {
		auto [line, col] = line_column(document, e.byte);
		throw Error(
			ErrorCode::Configuration,
			"parse error at line " + std::to_string(line) + ", column " + std::to_string(col),
			{{"line", line}, {"column", col}});
	}
}

Rule parse_rule(const json &j, std::size_t index) {
	std::string name = j.contains("name") && j["name"].is_string()
						   ? j["name"].get<std::string>()
						   : "#" + std::to_string(index);
	if (!j.is_object()) {
		throw semantic(name, "rule must be an object");
	}
	static const std::set<std::string> kKeys {"name", "field", "operator", "constant"};
	for (const auto &[key, _] : j.items()) {
		if (!kKeys.count(key)) {
			throw semantic(name, "unknown attribute '" + key + "'");
		}
	}
	for (const char *key : {"name", "field", "operator", "constant"}) {
		if (!j.contains(key)) {
			throw semantic(name, std::string("missing '") + key + "'");
		}
	}
	if (!j["name"].is_string() || j["name"].get<std::string>().empty()) {
		throw semantic(name, "name must be a non-empty string");
	}
	if (!j["field"].is_string()) {
		throw semantic(name, "field must be a string");
	}
	auto field_text = j["field"].get<std::string>();
	auto field = parse_field(field_text);
	if (!field) {
		throw semantic(name, "unknown field '" + field_text + "'", {{"field", field_text}});
	}
	if (!j["operator"].is_string()) {
		throw semantic(name, "operator must be a string");
	}
	auto op_text = j["operator"].get<std::string>();
	auto op = parse_operator(op_text);
	if (!op) {
		throw semantic(name, "unknown operator '" + op_text + "'", {{"operator", op_text}});
	}
	const auto &c = j["constant"];
	RuleConstant constant;
	if (c.is_boolean()) {
		constant = c.get<bool>();
	} else if (c.is_number_integer()) {
		constant = c.get<std::int64_t>();
	} else if (c.is_number_float()) {
		constant = c.get<double>();
	} else {
		throw semantic(name, "constant must be a boolean or a number");
	}
	return Rule {name, *field, *op, constant};
}

RuleSet parse_rules(const json &array, const std::string &version) {
	if (!array.is_array()) {
		throw Error(ErrorCode::Configuration, "'rules' must be a list");
	}
	RuleSet set;
	set.version = version;
	for (std::size_t i = 0; i < array.size(); ++i) {
		set.rules.push_back(parse_rule(array[i], i));
	}
	check_ruleset(set);
	return set;
}

} // namespace

std::string_view field_name(CriterionField field) {
	for (const auto &[f, name] : kFields) {
		if (f == field) {
			return name;
		}
	}
	return "?";
}

std::optional<CriterionField> parse_field(std::string_view name) {
	for (const auto &[f, n] : kFields) {
		if (n == name) {
			return f;
		}
	}
	return std::nullopt;
}

std::string_view operator_symbol(Comparison op) {
	for (const auto &[o, s] : kOperators) {
		if (o == op) {
			return s;
		}
	}
	return "?";
}

std::optional<Comparison> parse_operator(std::string_view symbol) {
	for (const auto &[o, s] : kOperators) {
		if (s == symbol) {
			return o;
		}
	}
	return std::nullopt;
}

void check_ruleset(const RuleSet &rules) {
	if (rules.rules.empty()) {
		throw Error(ErrorCode::Configuration, "rule set must contain at least one rule");
	}
	std::set<std::string> names;
	for (const auto &rule : rules.rules) {
		if (rule.name.empty()) {
			throw Error(ErrorCode::Configuration, "rule name must be non-empty");
		}
		if (!names.insert(rule.name).second) {
			throw semantic(rule.name, "duplicate rule name");
		}
		if (field_name(rule.field) == "?") {
			throw semantic(rule.name, "unknown field");
		}
		switch (kind_of(rule.field)) {
		case FieldKind::Boolean:
			if (!std::holds_alternative<bool>(rule.constant)) {
				throw semantic(rule.name, "boolean field needs a boolean constant");
			}
			if (rule.op != Comparison::Eq) {
				throw semantic(rule.name, "boolean field supports only ==");
			}
			break;
		case FieldKind::Integer:
			if (!std::holds_alternative<std::int64_t>(rule.constant)) {
				throw semantic(rule.name, "integer field needs an integer constant");
			}
			break;
		case FieldKind::Decimal:
			if (std::holds_alternative<bool>(rule.constant)) {
				throw semantic(rule.name, "decimal field needs a numeric constant");
			}
			break;
		}
	}
}

RuleSet load_ruleset(std::string_view document) {
	return load_config(document).self_screen;
}

EligibilityConfig load_config(std::string_view document) {
	json doc = parse_document(document);
	if (!doc.is_object()) {
		throw Error(ErrorCode::Configuration, "rule config must be an object");
	}
	static const std::set<std::string> kKeys {"version", "rules", "physician_rules", "next_steps"};
	for (const auto &[key, _] : doc.items()) {
		if (!kKeys.count(key)) {
			throw Error(ErrorCode::Configuration, "unknown top-level key '" + key + "'");
		}
	}
	if (!doc.contains("rules")) {
		throw Error(ErrorCode::Configuration, "rule set must contain at least one rule");
	}
	std::string version = doc.value("version", std::string("unversioned"));
	EligibilityConfig config;
	config.self_screen = parse_rules(doc["rules"], version);
	config.physician = doc.contains("physician_rules") ? parse_rules(doc["physician_rules"], version)
													   : config.self_screen;
	if (doc.contains("next_steps")) {
		const auto &ns = doc["next_steps"];
		config.next_steps.eligible = ns.value("ELIGIBLE", std::string {});
		config.next_steps.ineligible = ns.value("INELIGIBLE", std::string {});
	}
	return config;
}

EligibilityConfig load_config_file(const std::string &path) {
	std::ifstream in(path);
	if (!in) {
		throw Error(ErrorCode::Configuration, "cannot read rule config " + path);
	}
	std::stringstream buf;
	buf << in.rdbuf();
	return load_config(buf.str());
}

json ruleset_json(const RuleSet &rules) {
	json out = json::array();
	for (const auto &r : rules.rules) {
		json c;
		std::visit([&c](auto v) { c = v; }, r.constant);
		out.push_back({
			{"name", r.name},
			{"field", std::string(field_name(r.field))},
			{"operator", std::string(operator_symbol(r.op))},
			{"constant", c},
		});
	}
	return {{"version", rules.version}, {"rules", out}};
}

} // namespace passdcc::eligibility
