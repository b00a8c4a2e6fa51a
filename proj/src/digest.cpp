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

#include "restyler/digest.hpp"

#include <string>

#include "restyler/error.hpp"

namespace restyler {

std::string to_hex16(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::uint64_t parse_hex16(std::string_view s) {
  if (s.size() != 16) {
    fail(Errc::kParseError,
         "expected 16 hex characters, got " + std::to_string(s.size()));
  }
  std::uint64_t v = 0;
  for (char c : s) {
    int nibble;
    if (c >= '0' && c <= '9') {
      nibble = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      nibble = c - 'a' + 10;
    } else {
      fail(Errc::kParseError,
           std::string("invalid hex character '") + c + "'");
    }
    v = (v << 4) | static_cast<std::uint64_t>(nibble);
  }
  return v;
}

}  // namespace restyler
