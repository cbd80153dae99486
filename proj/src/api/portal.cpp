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

#include <passdcc/api/portal.hpp>

#include <algorithm>
#include <cctype>

#include <passdcc/model/codec.hpp>
#include <passdcc/model/validate.hpp>
#include <passdcc/security/crypto.hpp>

namespace passdcc::api {

namespace {

Response reply(int status, json body) {
	return Response {status, std::move(body), {}};
}

Response error_reply(int status, std::string_view code, const std::string &message, const json &detail = nullptr) {
	json body = {{"error", code}, {"message", message}};
	if (!detail.is_null()) {
		body["detail"] = detail;
	}
	return reply(status, std::move(body));
}

Error bad_field(const std::string &field, const std::string &rule) {
	return Error(ErrorCode::Validation, field + ": " + rule, {{"violations", violations_json({{field, rule}})}});
}

std::string required_string(const json &body, const std::string &name) {
	auto it = body.find(name);
	if (it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
		throw bad_field(name, "non-empty string required");
	}
	return it->get<std::string>();
}

std::optional<std::string> optional_string(const json &body, const std::string &name) {
	auto it = body.find(name);
	if (it == body.end() || it->is_null()) {
		return std::nullopt;
	}
	if (!it->is_string()) {
		throw bad_field(name, "string expected");
	}
	return it->get<std::string>();
}

std::optional<std::int64_t> expected_version(const json &body) {
	auto it = body.find("expected_version");
	if (it == body.end() || it->is_null()) {
		return std::nullopt;
	}
	if (!it->is_number_integer()) {
		throw bad_field("expected_version", "integer expected");
	}
	return it->get<std::int64_t>();
}

template <typename E>
E parse_enum(const std::string &field, std::string text) {
	std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::toupper(c); });
	std::replace(text.begin(), text.end(), '-', '_');
	auto value = enum_from_string<E>(text);
	if (!value) {
		json choices = json::array();
		for (auto v : all_values<E>()) {
			choices.push_back(to_string(v));
		}
		throw bad_field(field, "one of " + choices.dump());
	}
	return *value;
}

std::optional<std::size_t> parse_limit(const std::map<std::string, std::string> &query) {
	auto it = query.find("limit");
	if (it == query.end()) {
		return std::nullopt;
	}
	try {
		long long v = std::stoll(it->second);
		if (v < 0) {
			throw bad_field("limit", "non-negative integer expected");
		}
		return static_cast<std::size_t>(v);
	} catch (const std::logic_error &) {
		throw bad_field("limit", "non-negative integer expected");
	}
}

std::int64_t parse_from(const std::map<std::string, std::string> &query) {
	auto it = query.find("from");
	if (it == query.end()) {
		return 1;
	}
	try {
		return std::max<std::int64_t>(1, std::stoll(it->second));
	} catch (const std::logic_error &) {
		throw bad_field("from", "integer expected");
	}
}

std::vector<std::string> split_path(std::string_view path) {
	std::vector<std::string> out;
	std::size_t pos = 0;
	while (pos <= path.size()) {
		auto slash = path.find('/', pos);
		auto piece = path.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos);
		if (!piece.empty()) {
			out.emplace_back(piece);
		}
		if (slash == std::string_view::npos) {
			break;
		}
		pos = slash + 1;
	}
	return out;
}

bool match(const std::string &pattern, const std::string &path, std::map<std::string, std::string> &params) {
	auto want = split_path(pattern);
	auto got = split_path(path);
	if (want.size() != got.size()) {
		return false;
	}
	std::map<std::string, std::string> found;
	for (std::size_t i = 0; i < want.size(); ++i) {
		if (want[i].size() > 2 && want[i].front() == '{' && want[i].back() == '}') {
			found[want[i].substr(1, want[i].size() - 2)] = got[i];
		} else if (want[i] != got[i]) {
			return false;
		}
	}
	params = std::move(found);
	return true;
}

json patient_json(const PatientRecord &record) {
	return json(record);
}

bool is_mutation(const std::string &method) {
	return method == "POST" || method == "PUT" || method == "PATCH" || method == "DELETE";
}

} // namespace

CriterionInputs parse_criterion_inputs(const json &body) {
	if (!body.is_object()) {
		throw Error(ErrorCode::Validation, "criterion inputs must be a JSON object", {{"violations", violations_json({{"", "object expected"}})}});
	}
	Violations problems;
	CriterionInputs in;
	auto boolean = [&](const char *name, bool &out) {
		auto it = body.find(name);
		if (it == body.end()) {
			problems.push_back({name, "required"});
		} else if (!it->is_boolean()) {
			problems.push_back({name, "boolean expected"});
		} else {
			out = it->get<bool>();
		}
	};
	auto integer = [&](const char *name, std::int64_t &out) {
		auto it = body.find(name);
		if (it == body.end()) {
			problems.push_back({name, "required"});
		} else if (!it->is_number_integer()) {
			problems.push_back({name, "integer expected"});
		} else {
			out = it->get<std::int64_t>();
		}
	};
	boolean("dre_palpable", in.dre_palpable);
	boolean("histology_aggressive", in.histology_aggressive);
	integer("gleason_score", in.gleason_score);
	integer("positive_cores", in.positive_cores);
	integer("total_cores", in.total_cores);
	auto psa = body.find("psa_ng_ml");
	if (psa == body.end()) {
		problems.push_back({"psa_ng_ml", "required"});
	} else if (!psa->is_number()) {
		problems.push_back({"psa_ng_ml", "number expected"});
	} else {
		in.psa_ng_ml = psa->get<double>();
	}
	static const std::vector<std::string> known = {"dre_palpable", "histology_aggressive", "gleason_score", "psa_ng_ml", "positive_cores", "total_cores"};
	for (const auto &[key, _] : body.items()) {
		if (std::find(known.begin(), known.end(), key) == known.end()) {
			problems.push_back({key, "unknown field"});
		}
	}
	if (problems.empty()) {
		problems = validate(in);
	}
	if (!problems.empty()) {
		throw Error(ErrorCode::Validation, "invalid criterion inputs", {{"violations", violations_json(problems)}});
	}
	return in;
}

int status_for(ErrorCode code) {
	switch (code) {
	case ErrorCode::Validation:
	case ErrorCode::Precondition:
	case ErrorCode::Submission:
		return 422;
	case ErrorCode::Transition:
	case ErrorCode::Conflict:
		return 409;
	case ErrorCode::Authorization:
		return 403;
	case ErrorCode::NotFound:
		return 404;
	case ErrorCode::AuthFailure:
		return 401;
	case ErrorCode::Locked:
		return 423;
	case ErrorCode::Io:
		return 503;
	case ErrorCode::Configuration:
	case ErrorCode::ContractViolation:
	case ErrorCode::Integrity:
		return 500;
	}
	return 500;
}

Portal::Portal(workflow::ServiceContext ctx, notify::Transport *transport, PortalOptions options) :
	ctx_(ctx),
	transport_(transport),
	options_(options),
	enrollment_(ctx),
	admin_(ctx),
	outbox_(ctx.store, ctx.clock, options.outbox),
	sessions_(ctx.clock, options.session_ttl) {
	using A = Auth;
	auto patient_id = [](Call &c) {
		return PatientId {c.params.at("id")};
	};

	routes_ = {
		{"GET", "/api/v1/spec", A::Anonymous, "Route manifest", [](Portal &p, Call &) {
			 return reply(200, p.route_manifest());
		 }},
		{"GET", "/api/v1/schemas", A::Anonymous, "Case report form schemas", [](Portal &p, Call &) {
			 return reply(200, p.ctx_.forms.to_json());
		 }},
		{"POST", "/api/v1/eligibility/self-check", A::Anonymous, "Anonymous eligibility self-check", [](Portal &p, Call &c) {
			 auto result = p.enrollment_.self_check(parse_criterion_inputs(c.body));
			 return reply(
				 200,
				 {{"overall", to_string(result.assessment.overall)},
				  {"verdicts", result.assessment.verdicts},
				  {"failed", result.failed},
				  {"next_steps", result.next_steps},
				  {"ruleset_version", result.assessment.ruleset_version}});
		 }},
		{"POST", "/api/v1/auth/login", A::Anonymous, "Password login; returns a session token", [](Portal &p, Call &c) {
			 auto account = p.enrollment_.authenticate(required_string(c.body, "username"), required_string(c.body, "password"));
			 auto session = p.sessions_.create(account.account_id);
			 return reply(
				 200,
				 {{"token", session.token},
				  {"expires_at", format_rfc3339(session.expires_at)},
				  {"must_change_password", account.must_change_password},
				  {"account", public_view(account)}});
		 }},
		{"POST", "/api/v1/auth/password", A::Optional, "Rotate the password (required after a temporary password)", [](Portal &p, Call &c) {
			 auto current = required_string(c.body, "current_password");
			 auto replacement = required_string(c.body, "new_password");
			 UserAccount account;
			 if (c.actor) {
				 account = p.enrollment_.change_password(c.actor->account_id, current, replacement);
				 p.sessions_.revoke_account(account.account_id, c.session->token);
			 } else {
				 account = p.enrollment_.patient_first_login(required_string(c.body, "username"), current, replacement);
				 p.sessions_.revoke_account(account.account_id);
			 }
			 return reply(200, {{"account", public_view(account)}, {"must_change_password", account.must_change_password}});
		 }},
		{"POST", "/api/v1/auth/logout", A::Restricted, "End the session", [](Portal &p, Call &c) {
			 p.sessions_.revoke(c.session->token);
			 p.ctx_.store.append_audit({p.ctx_.event(c.actor->account_id.str(), AuditAction::Logout, AuditSubject::account(c.actor->account_id))});
			 return reply(200, {{"ok", true}});
		 }},
		{"GET", "/api/v1/me", A::Restricted, "Current account", [](Portal &, Call &c) {
			 return reply(200, public_view(*c.actor));
		 }},
		{"POST", "/api/v1/sites", A::Full, "Add a site", [](Portal &p, Call &c) {
			 auto site = p.admin_.add_site(*c.actor, required_string(c.body, "name"), required_string(c.body, "contact_email"));
			 return reply(201, site);
		 }},
		{"GET", "/api/v1/sites", A::Full, "List sites", [](Portal &p, Call &c) {
			 return reply(200, {{"sites", p.admin_.list_sites(*c.actor)}});
		 }},
		{"POST", "/api/v1/sites/{id}/deactivation", A::Full, "Deactivate a site", [](Portal &p, Call &c) {
			 return reply(200, p.admin_.deactivate_site(*c.actor, SiteId {c.params.at("id")}));
		 }},
		{"POST", "/api/v1/users", A::Full, "Add a staff account", [](Portal &p, Call &c) {
			 auto site = optional_string(c.body, "site_id");
			 auto issued = p.admin_.add_user(
				 *c.actor,
				 required_string(c.body, "username"),
				 parse_enum<Role>("role", required_string(c.body, "role")),
				 site ? std::optional<SiteId>(SiteId {*site}) : std::nullopt);
			 return reply(201, {{"account", public_view(issued.account)}, {"temporary_password", issued.temporary_password}});
		 }},
		{"POST", "/api/v1/users/{username}/disable", A::Full, "Disable an account", [](Portal &p, Call &c) {
			 auto account = p.admin_.disable_user(*c.actor, c.params.at("username"));
			 p.sessions_.revoke_account(account.account_id);
			 return reply(200, public_view(account));
		 }},
		{"POST", "/api/v1/users/{username}/password-reset", A::Full, "Issue a new temporary password", [](Portal &p, Call &c) {
			 auto issued = p.admin_.reset_password(*c.actor, c.params.at("username"));
			 p.sessions_.revoke_account(issued.account.account_id);
			 return reply(200, {{"account", public_view(issued.account)}, {"temporary_password", issued.temporary_password}});
		 }},
		{"POST", "/api/v1/patients", A::Full, "Register a prospect from a self-screen", [](Portal &p, Call &c) {
			 auto inputs = c.body.find("self_screen");
			 if (inputs == c.body.end()) {
				 throw bad_field("self_screen", "required");
			 }
			 AssessmentKind kind = AssessmentKind::SelfScreen;
			 if (auto k = optional_string(*inputs, "kind")) {
				 kind = parse_enum<AssessmentKind>("self_screen.kind", *k);
			 }
			 json body = *inputs;
			 if (body.is_object()) {
				 body.erase("kind");
			 }
			 auto record = p.enrollment_.register_prospect(*c.actor, SiteId {required_string(c.body, "site_id")}, parse_criterion_inputs(body), kind);
			 return reply(201, patient_json(record));
		 }},
		{"GET", "/api/v1/patients", A::Full, "List patients (?site=&state=)", [](Portal &p, Call &c) {
			 std::optional<SiteId> site;
			 std::optional<WorkflowState> state;
			 if (auto it = c.request.query.find("site"); it != c.request.query.end() && !it->second.empty()) {
				 site = SiteId {it->second};
			 }
			 if (auto it = c.request.query.find("state"); it != c.request.query.end() && !it->second.empty()) {
				 state = parse_enum<WorkflowState>("state", it->second);
			 }
			 json rows = json::array();
			 for (const auto &r : p.enrollment_.list_patients(*c.actor, site, state)) {
				 rows.push_back(patient_json(r));
			 }
			 return reply(200, {{"patients", rows}});
		 }},
		{"GET", "/api/v1/patients/{id}", A::Full, "Read one patient", [patient_id](Portal &p, Call &c) {
			 return reply(200, patient_json(p.enrollment_.read_patient(*c.actor, patient_id(c))));
		 }},
		{"POST", "/api/v1/patients/{id}/consultation", A::Full, "Record the initial consultation", [patient_id](Portal &p, Call &c) {
			 return reply(200, patient_json(p.enrollment_.record_consultation(*c.actor, patient_id(c), expected_version(c.body))));
		 }},
		{"POST", "/api/v1/patients/{id}/validation", A::Full, "Physician eligibility validation", [patient_id](Portal &p, Call &c) {
			 auto inputs = c.body.find("inputs");
			 if (inputs == c.body.end()) {
				 throw bad_field("inputs", "required");
			 }
			 AssessmentKind kind = AssessmentKind::PhysicianValidation;
			 if (auto k = optional_string(c.body, "kind")) {
				 kind = parse_enum<AssessmentKind>("kind", *k);
			 }
			 auto record = p.enrollment_.physician_validate(*c.actor, patient_id(c), parse_criterion_inputs(*inputs), kind, expected_version(c.body));
			 return reply(200, patient_json(record));
		 }},
		{"POST", "/api/v1/patients/{id}/credentials", A::Full, "Create the patient account", [patient_id](Portal &p, Call &c) {
			 auto issued = p.enrollment_.issue_credentials(*c.actor, patient_id(c), required_string(c.body, "username"), expected_version(c.body));
			 return reply(
				 201,
				 {{"patient", patient_json(issued.record)},
				  {"account", public_view(issued.account)},
				  {"temporary_password", issued.temporary_password}});
		 }},
		{"PUT", "/api/v1/patients/{id}/forms/{form}", A::Full, "Write case report form fields", [patient_id](Portal &p, Call &c) {
			 auto form = parse_enum<FormName>("form", c.params.at("form"));
			 auto fields = c.body.find("fields");
			 if (fields == c.body.end()) {
				 throw bad_field("fields", "required");
			 }
			 auto result = p.enrollment_.write_form(*c.actor, patient_id(c), form, *fields, expected_version(c.body));
			 return reply(200, {{"form", result.form}, {"state_version", result.state_version}});
		 }},
		{"POST", "/api/v1/patients/{id}/enrollment", A::Full, "Submit enrollment", [patient_id](Portal &p, Call &c) {
			 auto record = p.enrollment_.submit_enrollment(*c.actor, patient_id(c), expected_version(c.body));
			 if (p.options_.drain_after_submit && p.transport_) {
				 try {
					 p.outbox_.drain(*p.transport_);
				 } catch (const std::exception &) {
					 // The periodic drain retries.
				 }
			 }
			 return reply(200, patient_json(record));
		 }},
		{"POST", "/api/v1/patients/{id}/withdrawal", A::Full, "Withdraw from the study", [patient_id](Portal &p, Call &c) {
			 return reply(200, patient_json(p.enrollment_.withdraw(*c.actor, patient_id(c), required_string(c.body, "reason"), expected_version(c.body))));
		 }},
		{"POST", "/api/v1/patients/{id}/specimens", A::Full, "Register a biospecimen", [patient_id](Portal &p, Call &c) {
			 auto kind = parse_enum<SpecimenKind>("kind", required_string(c.body, "kind"));
			 std::optional<Timestamp> collected;
			 if (auto text = optional_string(c.body, "collected_at")) {
				 collected = parse_rfc3339(*text);
				 if (!collected) {
					 throw bad_field("collected_at", "RFC 3339 timestamp expected");
				 }
			 }
			 auto specimen = p.enrollment_.register_specimen(*c.actor, patient_id(c), kind, collected, optional_string(c.body, "notes"));
			 return reply(201, specimen);
		 }},
		{"GET", "/api/v1/audit", A::Full, "Audit events (?from=&limit=)", [](Portal &p, Call &c) {
			 auto events = p.admin_.read_audit(*c.actor, parse_from(c.request.query), parse_limit(c.request.query));
			 std::int64_t next = events.empty() ? parse_from(c.request.query) : events.back().seq + 1;
			 return reply(200, {{"events", events}, {"next", next}});
		 }},
		{"GET", "/api/v1/export", A::Full, "De-identified export", [](Portal &p, Call &c) {
			 return reply(200, p.admin_.export_deidentified(*c.actor));
		 }},
		{"GET", "/healthz", A::Anonymous, "Liveness and store status", [](Portal &p, Call &) {
			 json store;
			 int status = 200;
			 try {
				 store = p.ctx_.store.health();
			 } catch (const std::exception &e) {
				 store = {{"status", "error"}, {"message", e.what()}};
				 status = 503;
			 }
			 return reply(status, {{"status", status == 200 ? "ok" : "degraded"}, {"store", store}, {"sessions", p.sessions_.size()}});
		 }},
	};
}

json Portal::route_manifest() const {
	json routes = json::array();
	for (const auto &r : routes_) {
		std::string auth;
		switch (r.auth) {
		case Auth::Anonymous:
			auth = "none";
			break;
		case Auth::Optional:
			auth = "optional";
			break;
		case Auth::Restricted:
			auth = "session";
			break;
		case Auth::Full:
			auth = "session+password_rotated";
			break;
		}
		routes.push_back({{"method", r.method}, {"path", r.pattern}, {"auth", auth}, {"summary", r.summary}});
	}
	return {{"name", "pass-dcc"}, {"version", "v1"}, {"routes", routes}};
}

notify::DrainReport Portal::drain_notifications() {
	if (!transport_) {
		return {};
	}
	return outbox_.drain(*transport_);
}

Response Portal::handle(const Request &request) {
	Response out;
	try {
		out = dispatch(request);
	} catch (const Error &e) {
		out = error_reply(status_for(e.code()), to_string(e.code()), e.what(), e.detail());
	} catch (const std::exception &e) {
		out = error_reply(500, "internal", "internal error");
	}
	out.headers.emplace("Cache-Control", "no-store");
	return out;
}

Response Portal::dispatch(const Request &request) {
	bool path_known = false;
	for (const auto &route : routes_) {
		std::map<std::string, std::string> params;
		if (!match(route.pattern, request.path, params)) {
			continue;
		}
		path_known = true;
		if (route.method != request.method) {
			continue;
		}
		Call call {request, std::move(params), json::object(), std::nullopt, std::nullopt};
		return run(route, call);
	}
	if (path_known) {
		return error_reply(405, "method_not_allowed", request.method + " is not supported on " + request.path);
	}
	return error_reply(404, "not_found", "no route for " + request.path);
}

Response Portal::run(const Route &route, Call &call) {
	const auto &request = call.request;
	if (route.auth != Auth::Anonymous) {
		auto header = request.header("authorization");
		std::string token;
		if (header && header->rfind("Bearer ", 0) == 0) {
			token = header->substr(7);
		}
		if (!token.empty()) {
			call.session = sessions_.touch(token);
			if (!call.session) {
				return error_reply(401, "auth_failure", "session expired or unknown");
			}
			call.actor = ctx_.store.get_account(call.session->account_id);
			if (!call.actor || call.actor->disabled) {
				sessions_.revoke(token);
				return error_reply(401, "auth_failure", "session expired or unknown");
			}
		} else if (route.auth != Auth::Optional) {
			return error_reply(401, "auth_failure", "authentication required");
		}
		if (route.auth == Auth::Full && call.actor->must_change_password) {
			return error_reply(
				403,
				"authorization",
				"password change required",
				{{"reason", "password_change_required"}});
		}
	}

	if (is_mutation(request.method)) {
		if (!request.body.empty()) {
			try {
				call.body = json::parse(request.body);
			} catch (const json::parse_error &e) {
				return error_reply(422, "validation", "request body is not valid JSON", {{"position", e.byte}});
			}
			if (!call.body.is_object()) {
				return error_reply(422, "validation", "request body must be a JSON object");
			}
		}
	}

	auto produce = [&]() -> Response {
		try {
			return route.handler(*this, call);
		} catch (const Error &e) {
			// Patients outside the caller's reach look exactly like patients
			// that do not exist.
			if (e.code() == ErrorCode::Authorization && e.detail().is_object()
				&& e.detail().value("subject", "") == "patient") {
				auto reason = e.detail().value("reason", "");
				if (reason == access::reason::kCrossSite || reason == access::reason::kOwnRecordOnly) {
					return error_reply(404, "not_found", "patient not found", {{"patient_id", call.params.count("id") ? call.params.at("id") : ""}});
				}
			}
			return error_reply(status_for(e.code()), to_string(e.code()), e.what(), e.detail());
		}
	};

	auto key = request.header("idempotency-key");
	if (key && is_mutation(request.method)) {
		std::string scope = (call.actor ? call.actor->account_id.str() : std::string("anonymous")) + " " + request.method + " "
							+ request.path + " " + *key;
		return idempotent(request, scope, produce);
	}
	return produce();
}

Response Portal::idempotent(const Request &request, const std::string &scope, const std::function<Response()> &produce) {
	auto fingerprint = security::sha256_hex(request.body);
	std::promise<Response> promise;
	{
		std::unique_lock lock(idem_mutex_);
		auto it = idem_.find(scope);
		if (it != idem_.end()) {
			if (it->second.fingerprint != fingerprint) {
				return error_reply(422, "validation", "idempotency key reused with a different request");
			}
			auto cached = it->second.reply;
			lock.unlock();
			Response replay = cached.get();
			replay.headers["Idempotent-Replayed"] = "true";
			return replay;
		}
		idem_.emplace(scope, CachedReply {fingerprint, promise.get_future().share()});
		idem_order_.push_back(scope);
		while (idem_order_.size() > options_.idempotency_capacity) {
			idem_.erase(idem_order_.front());
			idem_order_.pop_front();
		}
	}
	Response out;
	try {
		out = produce();
	} catch (...) {
		out = error_reply(500, "internal", "internal error");
	}
	if (out.status >= 500) {
		// Server-side failures are not remembered; the client may retry.
		std::lock_guard lock(idem_mutex_);
		idem_.erase(scope);
	}
	promise.set_value(out);
	return out;
}

} // namespace passdcc::api
