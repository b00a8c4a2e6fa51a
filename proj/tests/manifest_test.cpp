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

#include <doctest.h>

#include <string>

#include "restyler/error.hpp"
#include "restyler/manifest.hpp"
#include "testutil.hpp"

using namespace restyler;

namespace {

Manifest example_manifest() {
  Manifest m;
  m.samples.push_back({"photos/a.png", SampleRole::kSource, "/in/photos/a.png",
                       "/labels/photos/a.png", std::nullopt, std::nullopt,
                       std::nullopt, std::nullopt});
  m.samples.push_back({"night/x.jpg", SampleRole::kStyle, "/styles/night/x.jpg",
                       std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                       std::nullopt});
  m.samples.push_back({"photos/a.png#r0", SampleRole::kRestyled,
                       "/out/restyled/a_12ab34cd_r0.png",
                       "/labels/photos/a.png", "photos/a.png", "night/x.jpg",
                       "stats", 0});
  m.skips.push_back({"notes.txt", "not an image file"});
  return m;
}

}  // namespace

TEST_CASE("manifests survive a serialize/parse round-trip") {
  const Manifest m = example_manifest();
  const Manifest back = parse_manifest(serialize_manifest(m));
  REQUIRE(back.samples.size() == m.samples.size());
  REQUIRE(back.skips.size() == m.skips.size());
  for (std::size_t i = 0; i < m.samples.size(); ++i) {
    const SampleRecord& a = m.samples[i];
    const SampleRecord& b = back.samples[i];
    CHECK(a.id == b.id);
    CHECK(a.role == b.role);
    CHECK(a.path == b.path);
    CHECK(a.label_path == b.label_path);
    CHECK(a.content_id == b.content_id);
    CHECK(a.style_id == b.style_id);
    CHECK(a.backend == b.backend);
    CHECK(a.rank == b.rank);
  }
  CHECK(back.skips[0].id == "notes.txt");
  CHECK(back.skips[0].reason == "not an image file");
}

TEST_CASE("manifest files round-trip on disk") {
  const testutil::TempDir tmp;
  const auto path = tmp.path() / "manifest.tsv";
  write_manifest(path, example_manifest());
  const Manifest back = read_manifest(path);
  CHECK(back.samples.size() == 3);
  CHECK(back.skips.size() == 1);
}

TEST_CASE("serialization starts with the versioned header") {
  const std::string text = serialize_manifest(example_manifest());
  CHECK(text.rfind("restyler-manifest v1\n", 0) == 0);
}

TEST_CASE("absent fields appear as a bare dash") {
  Manifest m;
  m.samples.push_back({"a", SampleRole::kSource, "/a.png", std::nullopt,
                       std::nullopt, std::nullopt, std::nullopt, std::nullopt});
  const std::string text = serialize_manifest(m);
  CHECK(text.find("sample\ta\tsource\t/a.png\t-\t-\t-\t-\t-") !=
        std::string::npos);
}

TEST_CASE("parsing rejects a wrong or missing header") {
  try {
    parse_manifest("some-other-format v9\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kParseError);
  }
  try {
    parse_manifest("");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kParseError);
  }
}

TEST_CASE("parsing rejects malformed rows") {
  const std::string header = "restyler-manifest v1\n";
  const char* bad_rows[] = {
      "sample\tid\tsource\t/p\t-\t-\t-\t-\n",          // 8 fields, not 9
      "sample\tid\tjudge\t/p\t-\t-\t-\t-\t-\n",        // unknown role
      "sample\tid\trestyled\t/p\t-\t-\t-\t-\tzero\n",  // non-numeric rank
      "skip\tid\n",                                    // missing reason
      "banana\tid\treason\n",                          // unknown row type
  };
  for (const char* row : bad_rows) {
    try {
      parse_manifest(header + row);
      FAIL("expected an error for row: " << row);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kParseError);
    }
  }
}

TEST_CASE("fields containing separators are rejected at write time") {
  Manifest m;
  m.samples.push_back({"evil\tid", SampleRole::kSource, "/p", std::nullopt,
                       std::nullopt, std::nullopt, std::nullopt, std::nullopt});
  try {
    serialize_manifest(m);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kBadArgument);
  }
  Manifest nl;
  nl.skips.push_back({"id", "two\nlines"});
  try {
    serialize_manifest(nl);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kBadArgument);
  }
}

TEST_CASE("role names round-trip and reject junk") {
  CHECK(role_name(SampleRole::kSource) == std::string("source"));
  CHECK(role_name(SampleRole::kStyle) == std::string("style"));
  CHECK(role_name(SampleRole::kRestyled) == std::string("restyled"));
  for (const char* name : {"source", "style", "restyled"}) {
    CHECK(role_name(role_from_name(name)) == std::string(name));
  }
  try {
    role_from_name("holdout");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kParseError);
  }
}

TEST_CASE("row order is preserved exactly") {
  Manifest m;
  for (int i = 0; i < 5; ++i) {
    m.samples.push_back({"s" + std::to_string(i), SampleRole::kStyle,
                         "/s" + std::to_string(i), std::nullopt, std::nullopt,
                         std::nullopt, std::nullopt, std::nullopt});
  }
  const Manifest back = parse_manifest(serialize_manifest(m));
  for (int i = 0; i < 5; ++i) {
    CHECK(back.samples[i].id == "s" + std::to_string(i));
  }
}
