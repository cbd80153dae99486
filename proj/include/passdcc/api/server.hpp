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

#include <atomic>
#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include <passdcc/api/portal.hpp>

namespace httplib {
class Server;
}

namespace passdcc::api {

struct ServerOptions {
	std::string host {"127.0.0.1"};
	int port {8080};
	// Plaintext HTTP is served only when one of these is set; the first
	// also requires a loopback bind address.
	bool allow_insecure_local {false};
	bool behind_tls_proxy {false};
	std::chrono::milliseconds drain_interval {std::chrono::seconds(5)};
};

// Throws Error(Configuration) when the options would expose plaintext HTTP
// without an explicit acknowledgement.
void check_listen_policy(const ServerOptions &options);

bool is_loopback(const std::string &host);

// cpp-httplib front end for a Portal, plus the periodic outbox drain.
class HttpServer {
public:
	HttpServer(Portal &portal, ServerOptions options);
	~HttpServer();

	// Binds (port 0 picks a free port) and serves on a background thread.
	int start();
	// Serves on the calling thread until stop().
	void run();
	void stop();

	int port() const {
		return port_;
	}

private:
	void install();

	Portal &portal_;
	ServerOptions options_;
	std::unique_ptr<httplib::Server> server_;
	std::thread listener_;
	std::thread drainer_;
	std::atomic<bool> stopping_ {false};
	int port_ {0};
};

} // namespace passdcc::api
