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

#include <passdcc/api/http.hpp>

#include <algorithm>
#include <cctype>

namespace passdcc::api {

std::optional<std::string> Request::header(std::string_view name) const {
	std::string key(name);
	std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
	auto it = headers.find(key);
	if (it == headers.end()) {
		return std::nullopt;
	}
	return it->second;
}

namespace {

std::string decode(std::string_view text) {
	std::string out;
	for (std::size_t i = 0; i < text.size(); ++i) {
		char c = text[i];
		if (c == '+') {
			out += ' ';
		} else if (c == '%' && i + 2 < text.size() && std::isxdigit(static_cast<unsigned char>(text[i + 1]))
				   && std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
			out += static_cast<char>(std::stoi(std::string(text.substr(i + 1, 2)), nullptr, 16));
			i += 2;
		} else {
			out += c;
		}
	}
	return out;
}

} // namespace

std::map<std::string, std::string> parse_query(std::string_view query) {
	std::map<std::string, std::string> out;
	while (!query.empty()) {
		auto amp = query.find('&');
		auto pair = query.substr(0, amp);
		query = amp == std::string_view::npos ? std::string_view {} : query.substr(amp + 1);
		if (pair.empty()) {
			continue;
		}
		auto eq = pair.find('=');
		if (eq == std::string_view::npos) {
			out[decode(pair)] = "";
		} else {
			out[decode(pair.substr(0, eq))] = decode(pair.substr(eq + 1));
		}
	}
	return out;
}

} // namespace passdcc::api
