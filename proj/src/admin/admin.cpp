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

#include <passdcc/admin/admin.hpp>

#include <regex>

#include <passdcc/access/deidentify.hpp>
#include <passdcc/model/codec.hpp>
#include <passdcc/model/validate.hpp>

namespace passdcc::admin {

using access::Action;
using access::Subject;
using workflow::actor_id;

namespace {

Error invalid(const std::string &field, const std::string &rule) {
	return Error(ErrorCode::Validation, field + ": " + rule, {{"violations", violations_json({{field, rule}})}});
}

void check_username(const std::string &username) {
	static const std::regex pattern("[A-Za-z0-9][A-Za-z0-9._@-]{2,63}");
	if (!std::regex_match(username, pattern)) {
		throw invalid("username", "3-64 characters from [A-Za-z0-9._@-]");
	}
}

} // namespace

AdminService::AdminService(workflow::ServiceContext ctx) :
	ctx_(std::move(ctx)) {
}

Site AdminService::add_site(const UserAccount &actor, const std::string &name, const std::string &contact_email) {
	ctx_.require(actor, Action::ManageSites, {}, {});
	Site site;
	site.site_id = ctx_.ids.make<SiteId>();
	site.name = name;
	site.contact_email = contact_email;
	site.active = true;
	auto problems = validate(site);
	if (!problems.empty()) {
		throw Error(ErrorCode::Validation, "invalid site", {{"violations", violations_json(problems)}});
	}
	return ctx_.store.put_site(
		site,
		0,
		{ctx_.event(actor_id(actor), AuditAction::AdminChange, AuditSubject::site(site.site_id), {{"op", "site_add"}, {"name", name}})});
}

std::vector<Site> AdminService::list_sites(const UserAccount &actor) {
	ctx_.require(actor, Action::ManageSites, {}, {});
	return ctx_.store.list_sites();
}

Site AdminService::deactivate_site(const UserAccount &actor, const SiteId &site_id) {
	ctx_.require(actor, Action::ManageSites, Subject::of_site(site_id), AuditSubject::site(site_id));
	auto site = ctx_.store.get_site(site_id);
	if (!site) {
		throw Error(ErrorCode::NotFound, "site not found", {{"site_id", site_id.str()}});
	}
	if (!site->active) {
		return *site;
	}
	site->active = false;
	return ctx_.store.put_site(
		*site,
		site->revision,
		{ctx_.event(actor_id(actor), AuditAction::AdminChange, AuditSubject::site(site_id), {{"op", "site_deactivate"}})});
}

void AdminService::require_user_scope(const UserAccount &actor, const std::optional<SiteId> &site, const AuditSubject &subject) const {
	auto decision = ctx_.require(actor, Action::ManageUsers, {site, std::nullopt}, subject);
	// Accounts without a site reach every site; only an all-sites manager
	// may touch them.
	if (!site && decision.scope != access::Scope::AllSites) {
		ctx_.store.append_audit({ctx_.event(
			actor_id(actor),
			AuditAction::AccessDenied,
			subject,
			{{"reason", access::reason::kNotPermitted}, {"action", "MANAGE_USERS"}})});
		throw Error(
			ErrorCode::Authorization,
			"access denied: not_permitted",
			{{"reason", access::reason::kNotPermitted}, {"action", "MANAGE_USERS"}, {"subject", "none"}});
	}
}

UserAccount AdminService::target(const std::string &username) const {
	auto account = ctx_.store.get_account_by_username(username);
	if (!account) {
		throw Error(ErrorCode::NotFound, "user not found", {{"username", username}});
	}
	return *account;
}

IssuedAccount AdminService::add_user(const UserAccount &actor, const std::string &username, Role role, const std::optional<SiteId> &site) {
	require_user_scope(actor, site, {});
	check_username(username);
	if (role == Role::Patient) {
		throw invalid("role", "patient accounts are created by credential issuance");
	}
	if (role != Role::DccAdmin && !site) {
		throw invalid("site_id", std::string(to_string(role)) + " accounts belong to a site");
	}
	if (site && !ctx_.store.get_site(*site)) {
		throw Error(ErrorCode::NotFound, "site not found", {{"site_id", site->str()}});
	}
	if (ctx_.store.get_account_by_username(username)) {
		throw Error(ErrorCode::Conflict, "username '" + username + "' is already taken", {{"entity", "account"}, {"username", username}});
	}
	IssuedAccount out;
	out.temporary_password = security::random_password();
	auto &a = out.account;
	a.account_id = ctx_.ids.make<AccountId>();
	a.username = username;
	a.password_hash = ctx_.hasher.hash(out.temporary_password);
	a.must_change_password = true;
	a.role = role;
	a.site_id = site;
	out.account = ctx_.store.put_account(
		a,
		0,
		{ctx_.event(
			actor_id(actor),
			AuditAction::AdminChange,
			AuditSubject::account(a.account_id),
			{{"op", "user_add"}, {"username", username}, {"role", to_string(role)}, {"site_id", site ? json(site->str()) : json(nullptr)}})});
	return out;
}

UserAccount AdminService::disable_user(const UserAccount &actor, const std::string &username) {
	auto account = target(username);
	require_user_scope(actor, account.site_id, AuditSubject::account(account.account_id));
	if (account.account_id == actor.account_id) {
		throw Error(ErrorCode::Precondition, "an account cannot disable itself");
	}
	if (account.disabled) {
		return account;
	}
	account.disabled = true;
	return ctx_.store.put_account(
		account,
		account.revision,
		{ctx_.event(actor_id(actor), AuditAction::AdminChange, AuditSubject::account(account.account_id), {{"op", "user_disable"}, {"username", username}})});
}

IssuedAccount AdminService::reset_password(const UserAccount &actor, const std::string &username) {
	auto account = target(username);
	require_user_scope(actor, account.site_id, AuditSubject::account(account.account_id));
	IssuedAccount out;
	out.temporary_password = security::random_password();
	account.password_hash = ctx_.hasher.hash(out.temporary_password);
	account.must_change_password = true;
	account.disabled = false;
	account.failed_logins = 0;
	out.account = ctx_.store.put_account(
		account,
		account.revision,
		{ctx_.event(
			actor_id(actor),
			AuditAction::CredentialIssued,
			AuditSubject::account(account.account_id),
			{{"op", "password_reset"}, {"username", username}})});
	return out;
}

std::vector<AuditEvent> AdminService::read_audit(const UserAccount &actor, std::int64_t from_seq, std::optional<std::size_t> limit) {
	ctx_.require(actor, Action::ReadAudit, {}, {});
	auto events = ctx_.store.read_audit(from_seq, limit);
	ctx_.store.append_audit({ctx_.event(actor_id(actor), AuditAction::Read, {}, {{"op", "read_audit"}, {"from", from_seq}, {"count", events.size()}})});
	return events;
}

nlohmann::json AdminService::export_deidentified(const UserAccount &actor) {
	ctx_.require(actor, Action::Export, {}, {});
	json records = json::array();
	for (const auto &record : ctx_.store.list_patients({})) {
		if (ctx_.policy.authorize(actor, Action::Export, Subject::of_patient(record)).allowed) {
			records.push_back(access::deidentify(record, ctx_.forms, ctx_.options.export_salt));
		}
	}
	ctx_.store.append_audit({ctx_.event(actor_id(actor), AuditAction::Export, {}, {{"count", records.size()}})});
	return {{"format", "pass-dcc-deidentified/1"}, {"generated", month_of(ctx_.clock.now())}, {"records", records}};
}

IssuedAccount AdminService::bootstrap_admin(const std::string &username, const std::optional<std::string> &password) {
	check_username(username);
	if (!ctx_.store.list_accounts().empty()) {
		throw Error(ErrorCode::Precondition, "store already has accounts");
	}
	IssuedAccount out;
	if (password) {
		if (auto problem = security::check_password_policy(*password)) {
			throw invalid("password", *problem);
		}
	} else {
		out.temporary_password = security::random_password();
	}
	auto &a = out.account;
	a.account_id = ctx_.ids.make<AccountId>();
	a.username = username;
	a.password_hash = ctx_.hasher.hash(password ? *password : out.temporary_password);
	a.must_change_password = !password;
	a.role = Role::DccAdmin;
	out.account = ctx_.store.put_account(
		a,
		0,
		{ctx_.event(
			std::string(kInitActor),
			AuditAction::AdminChange,
			AuditSubject::account(a.account_id),
			{{"op", "bootstrap_admin"}, {"username", username}})});
	return out;
}

} // namespace passdcc::admin
