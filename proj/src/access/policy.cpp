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

#include <passdcc/access/policy.hpp>

#include <fstream>
#include <sstream>

#include <passdcc/model/error.hpp>

namespace passdcc::access {

using nlohmann::json;

namespace {

Decision deny(std::string_view why) {
	return Decision {false, std::string(why), std::nullopt, false};
}

} // namespace

CapabilityMatrix CapabilityMatrix::load(std::string_view document) {
	json doc;
	try {
		doc = json::parse(document);
	} catch (const json::parse_error &e) {
		throw Error(
			ErrorCode::Configuration,
			std::string("capability matrix parse error: ") + e.what(),
			{{"byte", e.byte}});
	}
	if (!doc.is_object() || !doc.contains("capabilities") || !doc["capabilities"].is_object()) {
		throw Error(ErrorCode::Configuration, "capability matrix needs a 'capabilities' object");
	}
	for (const auto &[key, _] : doc.items()) {
		if (key != "version" && key != "capabilities") {
			throw Error(ErrorCode::Configuration, "unknown top-level key '" + key + "'");
		}
	}
	CapabilityMatrix m;
	m.version_ = doc.value("version", std::string("unversioned"));
	for (const auto &[role_name, actions] : doc["capabilities"].items()) {
		auto role = enum_from_string<Role>(role_name);
		if (!role) {
			throw Error(ErrorCode::Configuration, "unknown role '" + role_name + "'");
		}
		if (!actions.is_object()) {
			throw Error(ErrorCode::Configuration, "role " + role_name + ": expected an object");
		}
		for (const auto &[action_name, scope_value] : actions.items()) {
			auto action = enum_from_string<Action>(action_name);
			if (!action) {
				throw Error(ErrorCode::Configuration, "role " + role_name + ": unknown action '" + action_name + "'");
			}
			if (!scope_value.is_string()) {
				throw Error(ErrorCode::Configuration, "role " + role_name + ": scope must be a string");
			}
			auto scope_text = scope_value.get<std::string>();
			std::optional<Scope> scope;
			if (scope_text != "DENY") {
				scope = enum_from_string<Scope>(scope_text);
				if (!scope) {
					throw Error(
						ErrorCode::Configuration,
						"role " + role_name + ": unknown scope '" + scope_text + "' for " + action_name);
				}
			}
			m.entries_[{*role, *action}] = scope;
		}
	}
	for (auto role : all_values<Role>()) {
		for (auto action : all_values<Action>()) {
			if (!m.entries_.count({role, action})) {
				throw Error(
					ErrorCode::Configuration,
					"capability matrix does not cover " + std::string(to_string(role)) + " x "
						+ std::string(to_string(action)),
					{{"role", to_string(role)}, {"action", to_string(action)}});
			}
		}
	}
	return m;
}

CapabilityMatrix CapabilityMatrix::load_file(const std::string &path) {
	std::ifstream in(path);
	if (!in) {
		throw Error(ErrorCode::Configuration, "cannot read capability matrix " + path);
	}
	std::stringstream buf;
	buf << in.rdbuf();
	return load(buf.str());
}

std::optional<Scope> CapabilityMatrix::lookup(Role role, Action action) const {
	auto it = entries_.find({role, action});
	return it == entries_.end() ? std::nullopt : it->second;
}

Policy::Policy(CapabilityMatrix matrix) :
	matrix_(std::move(matrix)) {
}

Decision Policy::authorize(const UserAccount &actor, Action action, const Subject &subject) const {
	if (actor.disabled) {
		return deny(reason::kAccountDisabled);
	}
	auto scope = matrix_.lookup(actor.role, action);
	if (!scope) {
		return deny(reason::kNotPermitted);
	}
	switch (*scope) {
	case Scope::AllSites: {
		bool cross = actor.site_id && subject.site && *actor.site_id != *subject.site;
		return Decision {true, {}, scope, cross};
	}
	case Scope::OwnSite:
		if (!actor.site_id) {
			return deny(reason::kNoSite);
		}
		if (subject.site && *subject.site != *actor.site_id) {
			return deny(reason::kCrossSite);
		}
		return Decision {true, {}, scope, false};
	case Scope::OwnRecord:
		if (!actor.patient_id || !subject.patient || *subject.patient != *actor.patient_id) {
			return deny(reason::kOwnRecordOnly);
		}
		if (subject.site && actor.site_id && *subject.site != *actor.site_id) {
			return deny(reason::kCrossSite);
		}
		return Decision {true, {}, scope, false};
	}
	return deny(reason::kNotPermitted);
}

Decision Policy::authorize(const UserAccount &actor, std::string_view action, const Subject &subject) const {
	if (actor.disabled) {
		return deny(reason::kAccountDisabled);
	}
	auto parsed = enum_from_string<Action>(action);
	if (!parsed) {
		return deny(reason::kUnknownAction);
	}
	return authorize(actor, *parsed, subject);
}

} // namespace passdcc::access
