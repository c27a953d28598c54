/*
 * Copyright 2026 The NNC Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Little-endian helpers shared by the NNCV / NNCF / NNCM / NNCG file formats.

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace nnc::io {

void write_magic(std::ostream& out, std::string_view magic);
void write_u32(std::ostream& out, std::uint32_t value);
void write_f32(std::ostream& out, float value);
void write_f32_span(std::ostream& out, std::span<const float> values);

// Readers throw FormatError mentioning `what` when the stream runs dry.
std::array<char, 4> read_magic(std::istream& in, const std::string& what);
std::uint32_t read_u32(std::istream& in, const std::string& what);
float read_f32(std::istream& in, const std::string& what);
void read_f32_span(std::istream& in, std::span<float> out, const std::string& what);

// Size in bytes of a regular file; throws InputError if it is missing.
std::uintmax_t file_size_checked(const std::filesystem::path& path);

}  // namespace nnc::io
