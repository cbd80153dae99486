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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <passdcc/model/types.hpp>
#include <passdcc/workflow/context.hpp>

namespace passdcc::admin {

struct IssuedAccount {
	UserAccount account;
	std::string temporary_password;
};

inline constexpr std::string_view kInitActor = "system:init";

// Site, user, audit and export operations shared by the HTTP admin routes
// and the offline ops CLI. Every mutation is audited against the actor.
class AdminService {
public:
	explicit AdminService(workflow::ServiceContext ctx);

	Site add_site(const UserAccount &actor, const std::string &name, const std::string &contact_email);
	std::vector<Site> list_sites(const UserAccount &actor);
	Site deactivate_site(const UserAccount &actor, const SiteId &site);

	// Staff accounts only; patient accounts come from credential issuance.
	IssuedAccount add_user(const UserAccount &actor, const std::string &username, Role role, const std::optional<SiteId> &site);
	UserAccount disable_user(const UserAccount &actor, const std::string &username);
	// New temporary password; also lifts a lockout.
	IssuedAccount reset_password(const UserAccount &actor, const std::string &username);

	std::vector<AuditEvent> read_audit(const UserAccount &actor, std::int64_t from_seq, std::optional<std::size_t> limit);

	// {"format", "records": [...]} with one de-identified entry per patient
	// the actor may export.
	nlohmann::json export_deidentified(const UserAccount &actor);

	// First DCC_ADMIN of an empty store. A supplied password is used as is;
	// otherwise a temporary one is generated and must be changed.
	IssuedAccount bootstrap_admin(const std::string &username, const std::optional<std::string> &password);

private:
	UserAccount target(const std::string &username) const;
	void require_user_scope(const UserAccount &actor, const std::optional<SiteId> &site, const AuditSubject &subject) const;

	workflow::ServiceContext ctx_;
};

} // namespace passdcc::admin
