// Copyright 2026 The restyler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "restyler/manifest.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "restyler/error.hpp"

namespace restyler {
namespace {

constexpr std::string_view kHeader = "restyler-manifest v1";

std::string field_or_dash(const std::optional<std::string>& f) {
  return f ? *f : "-";
}

void check_field(const std::string& value, const char* what) {
  if (value.find('\t') != std::string::npos ||
      value.find('\n') != std::string::npos) {
    fail(Errc::kBadArgument,
         std::string(what) + " may not contain tabs or newlines: '" +
             value + "'");
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::optional<std::string> dash_or_field(const std::string& s) {
  if (s == "-") return std::nullopt;
  return s;
}

}  // namespace

const char* role_name(SampleRole r) {
  switch (r) {
    case SampleRole::kSource:
      return "source";
    case SampleRole::kStyle:
      return "style";
    case SampleRole::kRestyled:
      return "restyled";
  }
  return "?";
}

SampleRole role_from_name(std::string_view name) {
  if (name == "source") return SampleRole::kSource;
  if (name == "style") return SampleRole::kStyle;
  if (name == "restyled") return SampleRole::kRestyled;
  fail(Errc::kParseError, "unknown sample role '" + std::string(name) +
                              "' (want source, style or restyled)");
}

std::string serialize_manifest(const Manifest& m) {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const SampleRecord& s : m.samples) {
    check_field(s.id, "sample id");
    check_field(s.path, "sample path");
    out << "sample\t" << s.id << '\t' << role_name(s.role) << '\t' << s.path
        << '\t' << field_or_dash(s.label_path) << '\t'
        << field_or_dash(s.content_id) << '\t' << field_or_dash(s.style_id)
        << '\t' << field_or_dash(s.backend) << '\t';
    if (s.rank) {
      out << *s.rank;
    } else {
      out << '-';
    }
    out << '\n';
  }
  for (const SkipRecord& s : m.skips) {
    check_field(s.id, "skip id");
    check_field(s.reason, "skip reason");
    out << "skip\t" << s.id << '\t' << s.reason << '\n';
  }
  return out.str();
}

Manifest parse_manifest(std::string_view text) {
  std::istringstream in{std::string(text)};
  Manifest m;
  std::string line;
  int lineno = 0;
  const auto bad = [&lineno](const std::string& why) {
    fail(Errc::kParseError, "manifest line " + std::to_string(lineno) +
                                ": " + why);
  };
  if (!std::getline(in, line) || line != kHeader) {
    fail(Errc::kParseError,
         std::string("manifest must start with '") + std::string(kHeader) +
             "'");
  }
  lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_tabs(line);
    if (f[0] == "sample") {
      if (f.size() != 9) bad("sample rows need 9 fields");
      SampleRecord s;
      s.id = f[1];
      s.role = role_from_name(f[2]);
      s.path = f[3];
      s.label_path = dash_or_field(f[4]);
      s.content_id = dash_or_field(f[5]);
      s.style_id = dash_or_field(f[6]);
      s.backend = dash_or_field(f[7]);
      if (f[8] != "-") {
        try {
          s.rank = std::stoi(f[8]);
        } catch (const std::exception&) {
          bad("bad rank '" + f[8] + "'");
        }
      }
      m.samples.push_back(std::move(s));
    } else if (f[0] == "skip") {
      if (f.size() != 3) bad("skip rows need 3 fields");
      m.skips.push_back(SkipRecord{f[1], f[2]});
    } else {
      bad("unknown row tag '" + f[0] + "'");
    }
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  const std::string text = serialize_manifest(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) {
    fail(Errc::kIoError, "write error on " + path.string());
  }
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::kIoError, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

}  // namespace restyler
