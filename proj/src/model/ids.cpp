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

#include <passdcc/model/ids.hpp>

namespace passdcc {

namespace {

constexpr std::string_view kCrockford = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

} // namespace

UlidGenerator::UlidGenerator(const Clock &clock, std::optional<std::uint64_t> seed) :
	clock_(clock),
	rng_(seed ? *seed : std::random_device {}()) {
}

std::string UlidGenerator::next() {
	std::lock_guard lock(mutex_);
	auto millis = clock_.now().time_since_epoch().count();
	if (millis <= last_millis_) {
		// Same (or regressed) millisecond: keep the timestamp, bump the
		// 80-bit random part.
		millis = last_millis_;
		if (++rand_lo_ == 0) {
			++rand_hi_;
		}
	} else {
		last_millis_ = millis;
		auto r = rng_();
		rand_hi_ = static_cast<std::uint16_t>(r >> 48);
		rand_lo_ = rng_();
		// Leave headroom so same-millisecond increments never overflow.
		rand_lo_ &= ~(std::uint64_t {1} << 63);
	}

	std::string out(26, '0');
	auto ts = static_cast<std::uint64_t>(millis);
	for (int i = 9; i >= 0; --i) {
		out[i] = kCrockford[ts & 31];
		ts >>= 5;
	}
	// 80 random bits: rand_hi_ (16) then rand_lo_ (64), 5 bits per char.
	for (int i = 25; i >= 10; --i) {
		int bit = (25 - i) * 5;
		std::uint64_t chunk;
		if (bit + 5 <= 64) {
			chunk = rand_lo_ >> bit;
		} else if (bit >= 64) {
			chunk = static_cast<std::uint64_t>(rand_hi_) >> (bit - 64);
		} else {
			chunk = (rand_lo_ >> bit) | (static_cast<std::uint64_t>(rand_hi_) << (64 - bit));
		}
		out[i] = kCrockford[chunk & 31];
	}
	return out;
}

bool is_ulid(std::string_view text) {
	if (text.size() != 26 || text[0] > '7') {
		return false;
	}
	for (char c : text) {
		if (kCrockford.find(c) == std::string_view::npos) {
			return false;
		}
	}
	return true;
}

} // namespace passdcc
