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

#include <chrono>
#include <functional>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include <passdcc/admin/admin.hpp>
#include <passdcc/api/http.hpp>
#include <passdcc/api/session.hpp>
#include <passdcc/notify/outbox.hpp>
#include <passdcc/notify/transport.hpp>
#include <passdcc/workflow/service.hpp>

namespace passdcc::api {

inline constexpr std::string_view kApiPrefix = "/api/v1";

struct PortalOptions {
	std::chrono::milliseconds session_ttl {std::chrono::minutes(30)};
	// Deliver the enrollment notification right after a successful submit
	// instead of waiting for the next periodic drain.
	bool drain_after_submit {true};
	std::size_t idempotency_capacity {10000};
	notify::OutboxConfig outbox {};
};

// Parses a CriterionInputs body, reporting every problem by field name.
CriterionInputs parse_criterion_inputs(const nlohmann::json &body);

// Transport-independent request dispatcher for /api/v1 and /healthz.
// Thread-safe.
class Portal {
public:
	Portal(workflow::ServiceContext ctx, notify::Transport *transport, PortalOptions options = {});

	Response handle(const Request &request);

	// Route manifest served at /api/v1/spec.
	nlohmann::json route_manifest() const;

	notify::DrainReport drain_notifications();

	workflow::EnrollmentService &enrollment() {
		return enrollment_;
	}
	admin::AdminService &admin() {
		return admin_;
	}
	SessionStore &sessions() {
		return sessions_;
	}

	enum class Auth { Anonymous, Optional, Restricted, Full };

	struct Call {
		const Request &request;
		std::map<std::string, std::string> params;
		nlohmann::json body;
		std::optional<Session> session;
		std::optional<UserAccount> actor;
	};

	struct Route {
		std::string method;
		std::string pattern;
		Auth auth;
		std::string summary;
		std::function<Response(Portal &, Call &)> handler;
	};

private:
	Response dispatch(const Request &request);
	Response run(const Route &route, Call &call);
	Response idempotent(const Request &request, const std::string &scope, const std::function<Response()> &produce);

	workflow::ServiceContext ctx_;
	notify::Transport *transport_;
	PortalOptions options_;
	workflow::EnrollmentService enrollment_;
	admin::AdminService admin_;
	notify::Outbox outbox_;
	SessionStore sessions_;
	std::vector<Route> routes_;

	struct CachedReply {
		std::string fingerprint;
		std::shared_future<Response> reply;
	};
	std::mutex idem_mutex_;
	std::map<std::string, CachedReply> idem_;
	std::list<std::string> idem_order_;
};

// HTTP status for a domain error code.
int status_for(ErrorCode code);

} // namespace passdcc::api
