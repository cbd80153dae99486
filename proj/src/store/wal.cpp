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

#include <passdcc/store/wal.hpp>

#include <fstream>

#include <zlib.h>

#include <passdcc/model/error.hpp>

namespace passdcc::store::wal {

namespace {

void put_u32(std::string &out, std::uint32_t v) {
	for (int i = 0; i < 4; ++i) {
		out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
	}
}

std::uint32_t get_u32(const unsigned char *p) {
	return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8
		   | static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t crc_of(std::string_view data) {
	return static_cast<std::uint32_t>(
		crc32(0L, reinterpret_cast<const Bytef *>(data.data()), static_cast<uInt>(data.size())));
}

} // namespace

std::string frame(std::string_view payload) {
	std::string out;
	out.reserve(payload.size() + 8);
	put_u32(out, static_cast<std::uint32_t>(payload.size()));
	put_u32(out, crc_of(payload));
	out.append(payload);
	return out;
}

ScanResult scan(const std::filesystem::path &file, std::uint64_t from_offset) {
	ScanResult result;
	std::ifstream in(file, std::ios::binary);
	if (!in) {
		return result;
	}
	in.seekg(0, std::ios::end);
	result.file_size = static_cast<std::uint64_t>(in.tellg());
	std::uint64_t offset = from_offset;
	result.valid_end = offset;
	if (offset > result.file_size) {
		result.torn_tail = true;
		result.valid_end = result.file_size;
		return result;
	}
	in.seekg(static_cast<std::streamoff>(offset));
	while (offset < result.file_size) {
		unsigned char header[8];
		if (result.file_size - offset < 8 || !in.read(reinterpret_cast<char *>(header), 8)) {
			result.torn_tail = true;
			break;
		}
		std::uint32_t len = get_u32(header);
		std::uint32_t crc = get_u32(header + 4);
		if (len > kMaxRecordBytes || result.file_size - offset - 8 < len) {
			result.torn_tail = true;
			break;
		}
		std::string payload(len, '\0');
		if (!in.read(payload.data(), len) || crc_of(payload) != crc) {
			result.torn_tail = true;
			break;
		}
		Record rec;
		rec.offset = offset;
		rec.end = offset + 8 + len;
		rec.payload = std::move(payload);
		offset = rec.end;
		result.valid_end = offset;
		result.records.push_back(std::move(rec));
	}
	return result;
}

} // namespace passdcc::store::wal
