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

#include <passdcc/workflow/context.hpp>

#include <passdcc/model/codec.hpp>

namespace passdcc::workflow {

std::string actor_id(const UserAccount &account) {
	return account.account_id.str();
}

bool is_cas_conflict(const Error &e) {
	return e.code() == ErrorCode::Conflict && e.detail().is_object() && e.detail().contains("expected");
}

AuditEvent ServiceContext::event(const std::string &actor, AuditAction action, AuditSubject subject, nlohmann::json detail) const {
	AuditEvent e;
	e.at = clock.now();
	e.actor = actor;
	e.action = action;
	e.subject = std::move(subject);
	e.detail = detail.is_object() ? std::move(detail) : nlohmann::json::object();
	return e;
}

access::Decision ServiceContext::require(
	const UserAccount &actor,
	access::Action action,
	const access::Subject &subject,
	const AuditSubject &audit_subject) const {
	auto decision = policy.authorize(actor, action, subject);
	std::string subject_kind = subject.patient ? "patient" : subject.site ? "site" : "none";
	if (decision) {
		return decision;
	}
	nlohmann::json detail = {
		{"reason", decision.reason},
		{"action", to_string(action)},
		{"subject", subject_kind},
	};
	try {
		store.append_audit({event(actor_id(actor), AuditAction::AccessDenied, audit_subject, detail)});
	} catch (const Error &) {
		// The denial stands even when it cannot be recorded.
	}
	throw Error(ErrorCode::Authorization, "access denied: " + decision.reason, detail);
}

} // namespace passdcc::workflow
