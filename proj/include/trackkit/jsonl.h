/* Copyright 2026 The trackkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TRACKKIT_JSONL_H_
#define TRACKKIT_JSONL_H_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackkit/geometry.h"

namespace trackkit {

using Json = nlohmann::ordered_json;

struct JsonLine {
  int line_number = 0;  // 1-based
  Json value;
};

struct LineError {
  int line_number = 0;
  std::string message;
};

struct JsonlContents {
  std::vector<JsonLine> lines;
  std::vector<LineError> errors;
};

// Parses every non-blank line. Malformed lines are collected in `errors`, or
// thrown as ParseError when `strict`.
JsonlContents ReadJsonl(const std::string& path, bool strict);
JsonlContents ParseJsonl(std::istream& in, const std::string& name, bool strict);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& contents);

// [x1, y1, x2, y2] as a JSON array of numbers; validated.
Box BoxFromJson(const Json& j);
Json BoxToJson(const Box& b);

// Field accessors that throw ParseError naming the missing key.
const Json& RequireField(const Json& j, const char* key);
std::string RequireString(const Json& j, const char* key);
int RequireInt(const Json& j, const char* key);
double RequireNumber(const Json& j, const char* key);

}  // namespace trackkit

#endif  // TRACKKIT_JSONL_H_
