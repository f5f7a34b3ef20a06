// Copyright 2026 The cvqos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvqos/csv.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cvqos/error.hpp"

namespace cvqos::csv {

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

template <typename T>
T parse_number(std::string_view field, std::string_view what) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(Errc::Parse, "bad value '" + std::string(field) + "' for " + std::string(what));
  }
  return value;
}

}  // namespace

std::vector<std::string> split_header(std::string_view line) { return split_line(chomp(line)); }

Table parse(std::string_view text, std::string_view source_name) {
  Table table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = chomp(text.substr(start, nl - start));
    start = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(Errc::Parse, std::string(source_name) + ":" + std::to_string(line_no) + ": expected " +
                                   std::to_string(table.header.size()) + " fields, got " +
                                   std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw Error(Errc::Parse, std::string(source_name) + ": missing header");
  return table;
}

Table read(const std::filesystem::path& path, const std::vector<std::string>& expected) {
  auto table = parse(io::read_all(path), path.string());
  if (table.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw Error(Errc::Parse, path.string() + ": header mismatch, expected '" + want + "'");
  }
  return table;
}

double to_double(std::string_view field, std::string_view what) {
  if (field.empty()) throw Error(Errc::Parse, "missing value for " + std::string(what));
  return parse_number<double>(field, what);
}

std::int64_t to_int(std::string_view field, std::string_view what) {
  if (field.empty()) throw Error(Errc::Parse, "missing value for " + std::string(what));
  return parse_number<std::int64_t>(field, what);
}

std::uint64_t to_uint(std::string_view field, std::string_view what) {
  if (field.empty()) throw Error(Errc::Parse, "missing value for " + std::string(what));
  return parse_number<std::uint64_t>(field, what);
}

std::optional<double> to_opt_double(std::string_view field, std::string_view what) {
  if (field.empty()) return std::nullopt;
  return parse_number<double>(field, what);
}

std::optional<std::int64_t> to_opt_int(std::string_view field, std::string_view what) {
  if (field.empty()) return std::nullopt;
  return parse_number<std::int64_t>(field, what);
}

std::string format(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Writer::Writer(const std::vector<std::string>& header) {
  for (const auto& h : header) field(std::string_view(h));
  end_row();
}

void Writer::sep() {
  if (row_open_) out_ += ',';
  row_open_ = true;
}

Writer& Writer::field(double v) {
  sep();
  out_ += format(v);
  return *this;
}

Writer& Writer::field(std::int64_t v) {
  sep();
  out_ += std::to_string(v);
  return *this;
}

Writer& Writer::field(std::uint64_t v) {
  sep();
  out_ += std::to_string(v);
  return *this;
}

Writer& Writer::field(std::string_view v) {
  sep();
  out_ += v;
  return *this;
}

Writer& Writer::empty() {
  sep();
  return *this;
}

void Writer::end_row() {
  out_ += '\n';
  row_open_ = false;
}

}  // namespace cvqos::csv

namespace cvqos::io {

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(Errc::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::Io, "cannot rename into " + path.string());
  }
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cvqos::io
