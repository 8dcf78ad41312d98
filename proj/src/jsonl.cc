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

#include "trackkit/jsonl.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "trackkit/error.h"

namespace trackkit {

JsonlContents ParseJsonl(std::istream& in, const std::string& name,
                         bool strict) {
  JsonlContents out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.lines.push_back({number, Json::parse(line)});
    } catch (const Json::exception& e) {
      const std::string msg = name + ":" + std::to_string(number) + ": " + e.what();
      if (strict) throw Error(ErrorCode::kParseError, msg);
      out.errors.push_back({number, msg});
    }
  }
  return out;
}

JsonlContents ReadJsonl(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return ParseJsonl(in, path, strict);
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

Box BoxFromJson(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorCode::kParseError, "box must be an array of 4 numbers");
  }
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::kParseError, "box value not numeric");
  }
  Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
        j[3].get<double>()};
  ValidateBox(b);
  return b;
}

Json BoxToJson(const Box& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

const Json& RequireField(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kParseError, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::string RequireString(const Json& j, const char* key) {
  const Json& v = RequireField(j, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

int RequireInt(const Json& j, const char* key) {
  const Json& v = RequireField(j, key);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "' must be an integer");
  }
  return v.get<int>();
}

double RequireNumber(const Json& j, const char* key) {
  const Json& v = RequireField(j, key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

}  // namespace trackkit
