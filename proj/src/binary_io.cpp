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

#include "nnc/binary_io.hpp"

#include <bit>
#include <cstring>
#include <vector>

#include "nnc/error.hpp"

namespace nnc::io {

namespace {

void put_u32(char* dst, std::uint32_t v) {
  dst[0] = static_cast<char>(v & 0xFFu);
  dst[1] = static_cast<char>((v >> 8) & 0xFFu);
  dst[2] = static_cast<char>((v >> 16) & 0xFFu);
  dst[3] = static_cast<char>((v >> 24) & 0xFFu);
}

std::uint32_t get_u32(const char* src) {
  const auto* b = reinterpret_cast<const unsigned char*>(src);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void read_exact(std::istream& in, char* dst, std::size_t n, const std::string& what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError("truncated " + what + ": expected " + std::to_string(n) +
                      " more bytes, got " + std::to_string(in.gcount()));
  }
}

}  // namespace

void write_magic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void write_u32(std::ostream& out, std::uint32_t value) {
  char buf[4];
  put_u32(buf, value);
  out.write(buf, 4);
}

void write_f32(std::ostream& out, float value) {
  write_u32(out, std::bit_cast<std::uint32_t>(value));
}

void write_f32_span(std::ostream& out, std::span<const float> values) {
  std::vector<char> buf(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    put_u32(buf.data() + 4 * i, std::bit_cast<std::uint32_t>(values[i]));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::array<char, 4> read_magic(std::istream& in, const std::string& what) {
  std::array<char, 4> magic{};
  read_exact(in, magic.data(), 4, what);
  return magic;
}

std::uint32_t read_u32(std::istream& in, const std::string& what) {
  char buf[4];
  read_exact(in, buf, 4, what);
  return get_u32(buf);
}

float read_f32(std::istream& in, const std::string& what) {
  return std::bit_cast<float>(read_u32(in, what));
}

void read_f32_span(std::istream& in, std::span<float> out, const std::string& what) {
  std::vector<char> buf(out.size() * 4);
  read_exact(in, buf.data(), buf.size(), what);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<float>(get_u32(buf.data() + 4 * i));
  }
}

std::uintmax_t file_size_checked(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw InputError("cannot stat " + path.string() + ": " + ec.message());
  return size;
}

}  // namespace nnc::io
