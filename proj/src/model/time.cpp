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

#include <passdcc/model/time.hpp>

#include <charconv>
#include <cstdio>
#include <ctime>

namespace passdcc {

namespace {

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int &out) {
	if (pos + len > text.size()) {
		return false;
	}
	int value = 0;
	for (std::size_t i = pos; i < pos + len; ++i) {
		if (text[i] < '0' || text[i] > '9') {
			return false;
		}
		value = value * 10 + (text[i] - '0');
	}
	out = value;
	return true;
}

bool is_leap(int y) {
	return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
	static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
	return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

bool valid_ymd(int y, int m, int d) {
	return y >= 1 && m >= 1 && m <= 12 && d >= 1 && d <= days_in_month(y, m);
}

std::tm to_tm(Timestamp t, std::int64_t &millis) {
	auto ms = t.time_since_epoch().count();
	auto secs = ms / 1000;
	millis = ms % 1000;
	if (millis < 0) {
		millis += 1000;
		secs -= 1;
	}
	std::time_t tt = static_cast<std::time_t>(secs);
	std::tm tm {};
	gmtime_r(&tt, &tm);
	return tm;
}

} // namespace

std::string format_rfc3339(Timestamp t) {
	std::int64_t millis = 0;
	std::tm tm = to_tm(t, millis);
	char buf[96];
	std::snprintf(
		buf,
		sizeof(buf),
		"%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
		tm.tm_year + 1900,
		tm.tm_mon + 1,
		tm.tm_mday,
		tm.tm_hour,
		tm.tm_min,
		tm.tm_sec,
		static_cast<int>(millis));
	return buf;
}

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
	int y, mo, d, h, mi, s;
	if (!parse_fixed(text, 0, 4, y) || text.size() < 19 || text[4] != '-'
		|| !parse_fixed(text, 5, 2, mo) || text[7] != '-' || !parse_fixed(text, 8, 2, d)
		|| (text[10] != 'T' && text[10] != 't') || !parse_fixed(text, 11, 2, h)
		|| text[13] != ':' || !parse_fixed(text, 14, 2, mi) || text[16] != ':'
		|| !parse_fixed(text, 17, 2, s)) {
		return std::nullopt;
	}
	if (!valid_ymd(y, mo, d) || h > 23 || mi > 59 || s > 60) {
		return std::nullopt;
	}
	std::size_t pos = 19;
	int millis = 0;
	if (pos < text.size() && text[pos] == '.') {
		++pos;
		std::size_t digits = 0;
		while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
			if (digits < 3) {
				millis = millis * 10 + (text[pos] - '0');
			}
			++digits;
			++pos;
		}
		if (digits == 0) {
			return std::nullopt;
		}
		for (; digits < 3; ++digits) {
			millis *= 10;
		}
	}
	int offset_minutes = 0;
	if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
		++pos;
	} else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
		int oh, om;
		if (!parse_fixed(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':'
			|| !parse_fixed(text, pos + 4, 2, om) || oh > 23 || om > 59) {
			return std::nullopt;
		}
		offset_minutes = (oh * 60 + om) * (text[pos] == '-' ? -1 : 1);
		pos += 6;
	} else {
		return std::nullopt;
	}
	if (pos != text.size()) {
		return std::nullopt;
	}
	std::tm tm {};
	tm.tm_year = y - 1900;
	tm.tm_mon = mo - 1;
	tm.tm_mday = d;
	tm.tm_hour = h;
	tm.tm_min = mi;
	tm.tm_sec = s;
	auto secs = static_cast<std::int64_t>(timegm(&tm)) - offset_minutes * 60;
	return Timestamp {std::chrono::milliseconds {secs * 1000 + millis}};
}

bool is_valid_date(std::string_view text) {
	int y, m, d;
	return text.size() == 10 && parse_fixed(text, 0, 4, y) && text[4] == '-'
		   && parse_fixed(text, 5, 2, m) && text[7] == '-' && parse_fixed(text, 8, 2, d)
		   && valid_ymd(y, m, d);
}

std::string month_of(Timestamp t) {
	std::int64_t millis = 0;
	std::tm tm = to_tm(t, millis);
	char buf[32];
	std::snprintf(buf, sizeof(buf), "%04d-%02d", tm.tm_year + 1900, tm.tm_mon + 1);
	return buf;
}

Timestamp SystemClock::now() const {
	return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

ManualClock::ManualClock(Timestamp start) :
	millis_(start.time_since_epoch().count()) {
}

Timestamp ManualClock::now() const {
	return Timestamp {std::chrono::milliseconds {millis_.load()}};
}

void ManualClock::advance(std::chrono::milliseconds by) {
	millis_ += by.count();
}

void ManualClock::set(Timestamp t) {
	millis_ = t.time_since_epoch().count();
}

} // namespace passdcc
