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

// Write-ahead log framing for the embedded driver.
//
// A record is  [u32 length, little-endian][u32 CRC-32 of payload, LE][payload]
// where the payload is one UTF-8 JSON object {"lsn": n, "batch": {...}}.
// A short or checksum-failing record can only be the torn tail of an
// interrupted append; recovery truncates the file there.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace passdcc::store::wal {

inline constexpr std::uint32_t kMaxRecordBytes = 256u << 20;

std::string frame(std::string_view payload);

struct Record {
	std::uint64_t offset {0};  // of the length prefix
	std::uint64_t end {0};     // one past the payload
	std::string payload;
};

struct ScanResult {
	std::vector<Record> records;
	std::uint64_t valid_end {0};  // file offset after the last intact record
	std::uint64_t file_size {0};
	bool torn_tail {false};
};

ScanResult scan(const std::filesystem::path &file, std::uint64_t from_offset = 0);

} // namespace passdcc::store::wal
