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

#include <passdcc/cli/admin_cli.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include <passdcc/access/policy.hpp>
#include <passdcc/admin/admin.hpp>
#include <passdcc/app/runtime.hpp>
#include <passdcc/eligibility/rules.hpp>
#include <passdcc/model/codec.hpp>
#include <passdcc/model/forms.hpp>
#include <passdcc/model/validate.hpp>
#include <passdcc/store/audit_chain.hpp>
#include <passdcc/store/embedded.hpp>
#include <passdcc/workflow/service.hpp>

namespace passdcc::cli {

namespace {

std::string env(const char *name) {
	const char *v = std::getenv(name);
	return v ? v : "";
}

std::string read_file(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw Error(ErrorCode::Io, "cannot read " + path);
	}
	std::ostringstream text;
	text << in.rdbuf();
	return text.str();
}

ErrorCode code_from_name(const std::string &name) {
	for (auto code :
		 {ErrorCode::Validation,
		  ErrorCode::Precondition,
		  ErrorCode::Transition,
		  ErrorCode::Authorization,
		  ErrorCode::NotFound,
		  ErrorCode::Conflict,
		  ErrorCode::AuthFailure,
		  ErrorCode::Locked,
		  ErrorCode::Submission,
		  ErrorCode::Configuration,
		  ErrorCode::ContractViolation,
		  ErrorCode::Io,
		  ErrorCode::Integrity}) {
		if (to_string(code) == name) {
			return code;
		}
	}
	return ErrorCode::Io;
}

struct Credentials {
	std::string username;
	std::string password;
};

std::optional<Credentials> load_credentials(const std::string &file) {
	if (!file.empty()) {
		auto doc = json::parse(read_file(file), nullptr, false);
		if (!doc.is_object() || !doc.contains("username") || !doc.contains("password")) {
			throw Error(ErrorCode::Configuration, "credential file needs \"username\" and \"password\"");
		}
		return Credentials {doc["username"].get<std::string>(), doc["password"].get<std::string>()};
	}
	auto user = env("PASSDCC_ADMIN_USER");
	auto password = env("PASSDCC_ADMIN_PASSWORD");
	if (!user.empty() && !password.empty()) {
		return Credentials {user, password};
	}
	return std::nullopt;
}

// Talks to a running portal-api.
class RemoteApi {
public:
	RemoteApi(const std::string &base, std::string token) :
		client_(base), token_(std::move(token)) {
		client_.set_connection_timeout(5);
		client_.set_read_timeout(60);
	}

	void login(const Credentials &c) {
		auto res = call("POST", "/api/v1/auth/login", json {{"username", c.username}, {"password", c.password}});
		token_ = res.at("token").get<std::string>();
	}

	json call(const std::string &method, const std::string &path, const json &body = nullptr) {
		httplib::Headers headers;
		if (!token_.empty()) {
			headers.emplace("Authorization", "Bearer " + token_);
		}
		std::string payload = body.is_null() ? "" : body.dump();
		httplib::Result res;
		if (method == "GET") {
			res = client_.Get(path, headers);
		} else {
			res = client_.Post(path, headers, payload, "application/json");
		}
		if (!res) {
			throw Error(ErrorCode::Io, "service unreachable: " + httplib::to_string(res.error()));
		}
		auto doc = json::parse(res->body, nullptr, false);
		if (res->status / 100 != 2) {
			std::string code = doc.is_object() ? doc.value("error", "io") : "io";
			std::string message = doc.is_object() ? doc.value("message", res->body) : res->body;
			throw Error(code_from_name(code), message, doc.is_object() && doc.contains("detail") ? doc["detail"] : json(nullptr));
		}
		return doc;
	}

private:
	httplib::Client client_;
	std::string token_;
};

struct Settings {
	std::string store_url;
	std::string server;
	std::string credentials_file;
	std::string rules, capabilities, forms;
	int hash_iterations {120000};
	bool as_json {false};
};

// Offline session: runtime plus the authenticated admin.
struct Offline {
	std::unique_ptr<app::Runtime> runtime;
	std::unique_ptr<workflow::EnrollmentService> enrollment;
	std::unique_ptr<admin::AdminService> admin;
	UserAccount principal;
};

std::unique_ptr<app::Runtime> open_runtime(const Settings &s) {
	app::RuntimeOptions options;
	options.store_url = s.store_url;
	options.rules_path = s.rules;
	options.capabilities_path = s.capabilities;
	options.forms_path = s.forms;
	options.hash_iterations = s.hash_iterations;
	return std::make_unique<app::Runtime>(options);
}

Offline open_offline(const Settings &s, bool allow_pending_rotation = false) {
	auto creds = load_credentials(s.credentials_file);
	if (!creds) {
		throw Error(
			ErrorCode::AuthFailure,
			"admin credentials required: --credentials <file> or PASSDCC_ADMIN_USER and PASSDCC_ADMIN_PASSWORD");
	}
	Offline o;
	o.runtime = open_runtime(s);
	o.enrollment = std::make_unique<workflow::EnrollmentService>(o.runtime->context());
	o.admin = std::make_unique<admin::AdminService>(o.runtime->context());
	o.principal = o.enrollment->authenticate(creds->username, creds->password);
	if (o.principal.role != Role::DccAdmin) {
		throw Error(ErrorCode::Authorization, "the ops CLI requires a DCC_ADMIN account", {{"reason", "not_permitted"}});
	}
	if (o.principal.must_change_password && !allow_pending_rotation) {
		throw Error(ErrorCode::Precondition, "rotate the temporary password first (user passwd)");
	}
	return o;
}

std::unique_ptr<RemoteApi> open_remote(const Settings &s) {
	auto api = std::make_unique<RemoteApi>(s.server, env("PASSDCC_ADMIN_TOKEN"));
	if (env("PASSDCC_ADMIN_TOKEN").empty()) {
		auto creds = load_credentials(s.credentials_file);
		if (!creds) {
			throw Error(ErrorCode::AuthFailure, "admin credentials or PASSDCC_ADMIN_TOKEN required");
		}
		api->login(*creds);
	}
	return api;
}

class Printer {
public:
	Printer(std::ostream &out, bool as_json) :
		out_(out), json_(as_json) {
	}

	void emit(const json &doc, const std::vector<std::string> &lines) {
		if (json_) {
			out_ << doc.dump() << '\n';
		} else {
			for (const auto &line : lines) {
				out_ << line << '\n';
			}
		}
	}

private:
	std::ostream &out_;
	bool json_;
};

std::string site_line(const json &s) {
	return s.value("site_id", "") + "\t" + s.value("name", "") + "\t" + s.value("contact_email", "") + "\t"
		   + (s.value("active", false) ? "active" : "inactive");
}

std::string event_line(const json &e) {
	std::string subject = e["subject"].value("type", "NONE");
	if (!e["subject"].value("id", "").empty()) {
		subject += ":" + e["subject"].value("id", "");
	}
	return std::to_string(e.value("seq", 0)) + "\t" + e.value("at", "") + "\t" + e.value("action", "") + "\t"
		   + e.value("actor", "") + "\t" + subject + "\t" + e["detail"].dump();
}

} // namespace

std::string check_config(const std::string &path, const std::string &requested) {
	auto text = read_file(path);
	std::string kind = requested;
	if (kind.empty() || kind == "auto") {
		auto doc = json::parse(text, nullptr, false);
		if (doc.is_object() && doc.contains("capabilities")) {
			kind = "capabilities";
		} else if (doc.is_object() && doc.contains("forms")) {
			kind = "forms";
		} else {
			kind = "rules";
		}
	}
	if (kind == "rules") {
		eligibility::load_config(text);
	} else if (kind == "capabilities") {
		access::CapabilityMatrix::load(text);
	} else if (kind == "forms") {
		FormCatalog::load(text);
	} else {
		throw Error(ErrorCode::Validation, "unknown config kind '" + kind + "' (rules, capabilities, forms)");
	}
	return kind;
}

json verify_store(const std::string &url, bool &ok) {
	json report;
	if (url.rfind("embedded://", 0) == 0) {
		auto r = store::verify_embedded(url.substr(std::string("embedded://").size()));
		ok = r.ok;
		report = r.to_json();
		if (!ok) {
			return report;
		}
		auto driver = store::open_store(url);
		auto state = store::dump(*driver);
		driver->close();
		for (const auto &[id, p] : state.patients) {
			if (auto v = validate(p); !v.empty()) {
				ok = false;
				report["ok"] = false;
				report["problem"] = "patient " + id.str() + " violates " + violations_json(v).dump();
				return report;
			}
		}
		return report;
	}
	auto driver = store::open_store(url);
	auto state = store::dump(*driver);
	auto chain = store::verify_chain(state.audit);
	report = {{"ok", chain.ok}, {"audit_events", state.audit.size()}, {"driver", driver->kind()}};
	ok = chain.ok;
	if (!chain.ok) {
		report["divergent_seq"] = chain.first_bad_seq ? json(*chain.first_bad_seq) : json(nullptr);
		report["problem"] = chain.problem;
		return report;
	}
	for (const auto &[id, p] : state.patients) {
		if (auto v = validate(p); !v.empty()) {
			ok = false;
			report["ok"] = false;
			report["problem"] = "patient " + id.str() + " violates " + violations_json(v).dump();
			return report;
		}
	}
	return report;
}

json migrate_store(const std::string &from, const std::string &to) {
	auto source = store::open_store(from);
	auto before = store::dump(*source);
	auto chain = store::verify_chain(before.audit);
	if (!chain.ok) {
		throw Error(ErrorCode::Integrity, "source audit chain is broken: " + chain.problem, {{"divergent_seq", chain.first_bad_seq ? json(*chain.first_bad_seq) : json(nullptr)}});
	}
	auto target = store::open_store(to);
	target->import_state(before);
	auto after = store::dump(*target);
	target->close();
	source->close();
	if (!(after == before)) {
		throw Error(ErrorCode::Integrity, "migrated store differs from the source");
	}
	return {
		{"sites", before.sites.size()},
		{"accounts", before.accounts.size()},
		{"patients", before.patients.size()},
		{"notifications", before.notifications.size()},
		{"audit_events", before.audit.size()},
		{"identical", true},
	};
}

int run_admin(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
	Settings s;
	s.store_url = env("PASSDCC_STORE_URL");
	s.server = env("PASSDCC_SERVER");

	CLI::App cli {"pass-dcc administration"};
	cli.name("passdcc-admin");
	cli.require_subcommand(1);
	cli.add_option("--store", s.store_url, "Store URL for offline mode (embedded://<dir>, sqlite://<path>)");
	cli.add_option("--server", s.server, "portal-api base URL for network mode");
	cli.add_option("--credentials", s.credentials_file, "JSON file with admin username and password");
	cli.add_option("--rules", s.rules, "Eligibility rule set");
	cli.add_option("--capabilities", s.capabilities, "Capability matrix");
	cli.add_option("--forms", s.forms, "Form schemas");
	cli.add_option("--hash-iterations", s.hash_iterations, "PBKDF2 iterations for new passwords")->check(CLI::Range(1000, 10000000));
	cli.add_flag("--json", s.as_json, "Print JSON instead of text");

	auto *site = cli.add_subcommand("site", "Manage sites")->require_subcommand(1);
	std::string site_name, site_contact, site_id;
	auto *site_add = site->add_subcommand("add", "Add a site");
	site_add->add_option("--name", site_name)->required();
	site_add->add_option("--contact", site_contact, "Coordinator contact email")->required();
	auto *site_list = site->add_subcommand("list", "List sites");
	auto *site_deactivate = site->add_subcommand("deactivate", "Deactivate a site");
	site_deactivate->add_option("site_id", site_id)->required();

	auto *user = cli.add_subcommand("user", "Manage staff accounts")->require_subcommand(1);
	std::string username, role_name, user_site;
	auto *user_add = user->add_subcommand("add", "Add a staff account");
	user_add->add_option("--username", username)->required();
	user_add->add_option("--role", role_name, "COORDINATOR, INVESTIGATOR, RESEARCHER or DCC_ADMIN")->required();
	user_add->add_option("--site", user_site);
	auto *user_disable = user->add_subcommand("disable", "Disable an account");
	user_disable->add_option("username", username)->required();
	auto *user_reset = user->add_subcommand("reset-password", "Issue a new temporary password");
	user_reset->add_option("username", username)->required();
	auto *user_passwd = user->add_subcommand("passwd", "Change the admin's own password (new one from PASSDCC_NEW_PASSWORD)");

	auto *config = cli.add_subcommand("config", "Configuration documents")->require_subcommand(1);
	std::string config_path, config_kind = "auto";
	auto *config_check = config->add_subcommand("check", "Validate a rule set, capability matrix or form schema file");
	config_check->add_option("path", config_path)->required();
	config_check->add_option("--kind", config_kind)->check(CLI::IsMember({"auto", "rules", "capabilities", "forms"}));

	auto *audit = cli.add_subcommand("audit", "Audit log")->require_subcommand(1);
	std::int64_t from_seq = 1;
	std::optional<std::size_t> limit;
	auto *audit_tail = audit->add_subcommand("tail", "Print audit events");
	audit_tail->add_option("--from", from_seq, "First sequence number");
	audit_tail->add_option("--limit", limit);

	bool deidentified = false;
	std::string export_out;
	auto *exp = cli.add_subcommand("export", "Research export");
	exp->add_flag("--deidentified", deidentified, "De-identified export (the only kind offered)");
	exp->add_option("--out", export_out)->required();

	auto *store_cmd = cli.add_subcommand("store", "Store maintenance (offline)")->require_subcommand(1);
	auto *store_verify = store_cmd->add_subcommand("verify", "Replay the log, compare snapshots, check the hash chain");
	std::string migrate_to;
	auto *store_migrate = store_cmd->add_subcommand("migrate", "Copy every entity into an empty store");
	store_migrate->add_option("--to", migrate_to, "Target store URL")->required();
	std::string init_admin;
	auto *store_init = store_cmd->add_subcommand("init", "Create the first DCC_ADMIN account (password from PASSDCC_ADMIN_PASSWORD or generated)");
	store_init->add_option("--admin-user", init_admin)->required();

	std::vector<std::string> reversed(args.rbegin(), args.rend());
	try {
		cli.parse(reversed);
	} catch (const CLI::CallForHelp &) {
		out << cli.help();
		return kExitOk;
	} catch (const CLI::ParseError &e) {
		err << json {{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
		return kExitUser;
	}

	Printer print(out, s.as_json);
	bool remote = !s.server.empty();
	auto need_store = [&] {
		if (s.store_url.empty()) {
			throw Error(ErrorCode::Configuration, "no store: pass --store or set PASSDCC_STORE_URL");
		}
	};

	try {
		if (*config_check) {
			auto kind = check_config(config_path, config_kind);
			print.emit(json {{"ok", true}, {"kind", kind}, {"path", config_path}}, {"ok\t" + kind + "\t" + config_path});
			return kExitOk;
		}
		if (*store_verify) {
			need_store();
			bool ok = false;
			auto report = verify_store(s.store_url, ok);
			if (ok) {
				print.emit(report, {"ok\t" + std::to_string(report.value("audit_events", 0)) + " audit events verified"});
				return kExitOk;
			}
			err << json {{"error", "integrity"}, {"message", report.value("problem", "verification failed")}, {"detail", report}}.dump() << '\n';
			return kExitIntegrity;
		}
		if (*store_migrate) {
			need_store();
			auto report = migrate_store(s.store_url, migrate_to);
			print.emit(
				report,
				{"migrated " + std::to_string(report["patients"].get<int>()) + " patients, "
				 + std::to_string(report["audit_events"].get<int>()) + " audit events; contents identical"});
			return kExitOk;
		}
		if (*store_init) {
			need_store();
			auto runtime = open_runtime(s);
			admin::AdminService svc(runtime->context());
			auto password = env("PASSDCC_ADMIN_PASSWORD");
			auto issued = svc.bootstrap_admin(init_admin, password.empty() ? std::nullopt : std::optional<std::string>(password));
			runtime->store().close();
			json doc = {{"account", public_view(issued.account)}};
			std::vector<std::string> lines = {issued.account.account_id.str() + "\t" + init_admin};
			if (!issued.temporary_password.empty()) {
				doc["temporary_password"] = issued.temporary_password;
				lines.push_back("temporary password: " + issued.temporary_password);
			}
			print.emit(doc, lines);
			return kExitOk;
		}

		if (remote) {
			auto api = open_remote(s);
			if (*site_add) {
				auto r = api->call("POST", "/api/v1/sites", {{"name", site_name}, {"contact_email", site_contact}});
				print.emit(r, {r.value("site_id", "")});
			} else if (*site_list) {
				auto r = api->call("GET", "/api/v1/sites");
				std::vector<std::string> lines;
				for (const auto &x : r["sites"]) {
					lines.push_back(site_line(x));
				}
				print.emit(r, lines);
			} else if (*site_deactivate) {
				auto r = api->call("POST", "/api/v1/sites/" + site_id + "/deactivation", json::object());
				print.emit(r, {site_line(r)});
			} else if (*user_add) {
				json body = {{"username", username}, {"role", role_name}};
				if (!user_site.empty()) {
					body["site_id"] = user_site;
				}
				auto r = api->call("POST", "/api/v1/users", body);
				print.emit(r, {r["account"].value("account_id", ""), "temporary password: " + r.value("temporary_password", "")});
			} else if (*user_disable) {
				auto r = api->call("POST", "/api/v1/users/" + username + "/disable", json::object());
				print.emit(r, {"disabled\t" + username});
			} else if (*user_reset) {
				auto r = api->call("POST", "/api/v1/users/" + username + "/password-reset", json::object());
				print.emit(r, {"temporary password: " + r.value("temporary_password", "")});
			} else if (*audit_tail) {
				std::string path = "/api/v1/audit?from=" + std::to_string(from_seq);
				if (limit) {
					path += "&limit=" + std::to_string(*limit);
				}
				auto r = api->call("GET", path);
				std::vector<std::string> lines;
				for (const auto &e : r["events"]) {
					lines.push_back(event_line(e));
				}
				print.emit(r, lines);
			} else if (*exp) {
				if (!deidentified) {
					throw Error(ErrorCode::Validation, "only --deidentified exports are offered");
				}
				auto r = api->call("GET", "/api/v1/export");
				std::ofstream(export_out) << r.dump(2) << '\n';
				print.emit(json {{"records", r["records"].size()}, {"out", export_out}}, {std::to_string(r["records"].size()) + " records written to " + export_out});
			} else if (*user_passwd) {
				throw Error(ErrorCode::Validation, "user passwd runs offline only; use POST /api/v1/auth/password on the service");
			}
			return kExitOk;
		}

		need_store();
		auto o = open_offline(s, user_passwd->parsed());
		const auto &me = o.principal;
		if (*site_add) {
			auto r = o.admin->add_site(me, site_name, site_contact);
			print.emit(r, {r.site_id.str()});
		} else if (*site_list) {
			auto sites = o.admin->list_sites(me);
			std::vector<std::string> lines;
			for (const auto &x : sites) {
				lines.push_back(site_line(json(x)));
			}
			print.emit(json {{"sites", sites}}, lines);
		} else if (*site_deactivate) {
			auto r = o.admin->deactivate_site(me, SiteId {site_id});
			print.emit(r, {site_line(json(r))});
		} else if (*user_add) {
			auto role = enum_from_string<Role>(role_name);
			if (!role) {
				throw Error(ErrorCode::Validation, "unknown role '" + role_name + "'");
			}
			auto issued = o.admin->add_user(me, username, *role, user_site.empty() ? std::nullopt : std::optional<SiteId>(SiteId {user_site}));
			print.emit(
				json {{"account", public_view(issued.account)}, {"temporary_password", issued.temporary_password}},
				{issued.account.account_id.str(), "temporary password: " + issued.temporary_password});
		} else if (*user_disable) {
			auto r = o.admin->disable_user(me, username);
			print.emit(public_view(r), {"disabled\t" + username});
		} else if (*user_reset) {
			auto issued = o.admin->reset_password(me, username);
			print.emit(
				json {{"account", public_view(issued.account)}, {"temporary_password", issued.temporary_password}},
				{"temporary password: " + issued.temporary_password});
		} else if (*user_passwd) {
			auto replacement = env("PASSDCC_NEW_PASSWORD");
			if (replacement.empty()) {
				throw Error(ErrorCode::Validation, "set PASSDCC_NEW_PASSWORD");
			}
			auto creds = load_credentials(s.credentials_file);
			auto r = o.enrollment->change_password(me.account_id, creds->password, replacement);
			print.emit(public_view(r), {"password changed\t" + r.username});
		} else if (*audit_tail) {
			auto events = o.admin->read_audit(me, from_seq, limit);
			std::vector<std::string> lines;
			json docs = json::array();
			for (const auto &e : events) {
				docs.push_back(e);
				lines.push_back(event_line(docs.back()));
			}
			print.emit(json {{"events", docs}}, lines);
		} else if (*exp) {
			if (!deidentified) {
				throw Error(ErrorCode::Validation, "only --deidentified exports are offered");
			}
			auto doc = o.admin->export_deidentified(me);
			std::ofstream file(export_out);
			file << doc.dump(2) << '\n';
			if (!file) {
				throw Error(ErrorCode::Io, "cannot write " + export_out);
			}
			print.emit(json {{"records", doc["records"].size()}, {"out", export_out}}, {std::to_string(doc["records"].size()) + " records written to " + export_out});
		}
		o.runtime->store().close();
		return kExitOk;
	} catch (const Error &e) {
		err << json {{"error", to_string(e.code())}, {"message", e.what()}, {"detail", e.detail()}}.dump() << '\n';
		return e.code() == ErrorCode::Integrity ? kExitIntegrity : kExitUser;
	} catch (const std::exception &e) {
		err << json {{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
		return kExitUser;
	}
}

} // namespace passdcc::cli
