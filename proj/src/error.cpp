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

#include "restyler/error.hpp"

namespace restyler {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kUnsupportedFormat:
      return "UnsupportedFormat";
    case Errc::kCorruptData:
      return "CorruptData";
    case Errc::kZeroDimension:
      return "ZeroDimension";
    case Errc::kWrongColorspace:
      return "WrongColorspace";
    case Errc::kNotSquare:
      return "NotSquare";
    case Errc::kNotGray:
      return "NotGray";
    case Errc::kDuplicateId:
      return "DuplicateId";
    case Errc::kEmptyIndex:
      return "EmptyIndex";
    case Errc::kEmptyCorpus:
      return "EmptyCorpus";
    case Errc::kDimensionMismatch:
      return "DimensionMismatch";
    case Errc::kNonPsd:
      return "NonPsd";
    case Errc::kUnknownId:
      return "UnknownId";
    case Errc::kMissingDir:
      return "MissingDir";
    case Errc::kConfigError:
      return "ConfigError";
    case Errc::kParseError:
      return "ParseError";
    case Errc::kIoError:
      return "IoError";
    case Errc::kBadArgument:
      return "BadArgument";
  }
  return "Unknown";
}

}  // namespace restyler
