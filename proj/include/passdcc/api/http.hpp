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

#include <json.hpp>

namespace passdcc::api {

struct Request {
	std::string method;
	std::string path;
	std::map<std::string, std::string> query;
	std::map<std::string, std::string> headers;  // lower-case names
	std::string body;
	std::string remote_addr;

	std::optional<std::string> header(std::string_view name) const;
};

struct Response {
	int status {200};
	nlohmann::json body;
	std::map<std::string, std::string> headers;
};

// "a=1&b=x%20y" -> {a: 1, b: "x y"}
std::map<std::string, std::string> parse_query(std::string_view query);

} // namespace passdcc::api
