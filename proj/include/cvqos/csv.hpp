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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cvqos::csv {

/// Parsed CSV body. Fields are unquoted; the trace formats never contain
/// commas inside a field.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table parse(std::string_view text, std::string_view source_name = "<memory>");

/// Reads `path` and rejects any header that differs from `expected`.
Table read(const std::filesystem::path& path, const std::vector<std::string>& expected);

std::vector<std::string> split_header(std::string_view line);

// Field conversion. An empty field is "absent" for the optional variants and
// an error for the required ones. `what` names the column in error messages.
double to_double(std::string_view field, std::string_view what);
std::int64_t to_int(std::string_view field, std::string_view what);
std::uint64_t to_uint(std::string_view field, std::string_view what);
std::optional<double> to_opt_double(std::string_view field, std::string_view what);
std::optional<std::int64_t> to_opt_int(std::string_view field, std::string_view what);

/// Shortest decimal text that round-trips to the same double.
std::string format(double v);

class Writer {
 public:
  explicit Writer(const std::vector<std::string>& header);

  Writer& field(double v);
  Writer& field(std::int64_t v);
  Writer& field(std::uint64_t v);
  Writer& field(int v) { return field(static_cast<std::int64_t>(v)); }
  Writer& field(unsigned v) { return field(static_cast<std::uint64_t>(v)); }
  Writer& field(bool v) { return field(static_cast<std::int64_t>(v ? 1 : 0)); }
  Writer& field(std::string_view v);
  Writer& field(const char* v) { return field(std::string_view(v)); }
  template <typename T>
  Writer& field(const std::optional<T>& v) {
    if (v) return field(*v);
    return empty();
  }
  Writer& empty();
  void end_row();

  const std::string& str() const { return out_; }

 private:
  void sep();

  std::string out_;
  bool row_open_ = false;
};

}  // namespace cvqos::csv

namespace cvqos::io {

/// Writes via a sibling temp file and rename(2) so readers never observe a
/// partially written artifact.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_all(const std::filesystem::path& path);

}  // namespace cvqos::io
