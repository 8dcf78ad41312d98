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

#include "trackkit/geometry.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>
#include <sstream>

#include "trackkit/error.h"

namespace trackkit {
namespace {

// Absorbs representation error such as 0.29 * 100 == 28.999999999999996.
constexpr double kQuantSlack = 1e-9;

std::string Describe(const Box& b) {
  std::ostringstream os;
  os << "(" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << ")";
  return os.str();
}

int QuantizeValue(double v) {
  const int q = static_cast<int>(std::floor(v * kQuantLevels + kQuantSlack));
  return std::clamp(q, 0, kQuantLevels - 1);
}

const std::regex& TupleRegex() {
  static const std::regex re(
      R"(\[\s*(\d{1,9})\s*,\s*(\d{1,9})\s*,\s*(\d{1,9})\s*,\s*(\d{1,9})\s*\])");
  return re;
}

bool TupleFromMatch(const std::smatch& m, QuantBox* out) {
  for (int i = 0; i < 4; ++i) {
    const std::string s = m[i + 1].str();
    int value = 0;
    std::from_chars(s.data(), s.data() + s.size(), value);
    if (value >= kQuantLevels) return false;
    out->v[i] = value;
  }
  return true;
}

}  // namespace

bool IsValid(const Box& b) {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return in_unit(b.x1) && in_unit(b.y1) && in_unit(b.x2) && in_unit(b.y2) &&
         b.x1 <= b.x2 && b.y1 <= b.y2;
}

void ValidateBox(const Box& b) {
  if (!IsValid(b)) throw Error(ErrorCode::kInvalidBox, Describe(b));
}

bool IsDegenerate(const Box& b) { return !(b.width() > 0.0 && b.height() > 0.0); }

double Iou(const Box& a, const Box& b) {
  ValidateBox(a);
  ValidateBox(b);
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double CenterError(const Box& gt, const Box& pred, double frame_w,
                   double frame_h) {
  if (!(frame_w > 0.0) || !(frame_h > 0.0)) {
    std::ostringstream os;
    os << frame_w << "x" << frame_h;
    throw Error(ErrorCode::kInvalidFrameDims, os.str());
  }
  const double dx = (gt.center_x() - pred.center_x()) * frame_w;
  const double dy = (gt.center_y() - pred.center_y()) * frame_h;
  return std::hypot(dx, dy);
}

double NormCenterError(const Box& gt, const Box& pred) {
  if (IsDegenerate(gt)) throw Error(ErrorCode::kDegenerateBox, Describe(gt));
  const double dx = (pred.center_x() - gt.center_x()) / gt.width();
  const double dy = (pred.center_y() - gt.center_y()) / gt.height();
  return std::hypot(dx, dy);
}

QuantBox Quantize(const Box& b) {
  ValidateBox(b);
  return QuantBox{{QuantizeValue(b.x1), QuantizeValue(b.y1),
                   QuantizeValue(b.x2), QuantizeValue(b.y2)}};
}

void ValidateQuant(const QuantBox& q) {
  for (int v : q.v) {
    if (v < 0 || v >= kQuantLevels) {
      throw Error(ErrorCode::kInvalidQuant, Serialize(q));
    }
  }
}

Box Dequantize(const QuantBox& q) {
  ValidateQuant(q);
  const auto center = [](int v) { return (v + 0.5) / kQuantLevels; };
  return Box{center(q.v[0]), center(q.v[1]), center(q.v[2]), center(q.v[3])};
}

std::string Serialize(const QuantBox& q) {
  std::string out = "[";
  for (int i = 0; i < 4; ++i) {
    if (i > 0) out += ',';
    out += std::to_string(q.v[i]);
  }
  out += ']';
  return out;
}

std::vector<QuantBox> ParseCoords(std::string_view text) {
  std::vector<QuantBox> found;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), TupleRegex());
       it != std::sregex_iterator(); ++it) {
    QuantBox q;
    if (TupleFromMatch(*it, &q)) found.push_back(q);
  }
  return found;
}

QuantBox ParseQuantBox(std::string_view text) {
  const std::string s(text);
  std::smatch m;
  QuantBox q;
  if (!std::regex_match(s, m, TupleRegex()) || !TupleFromMatch(m, &q)) {
    throw Error(ErrorCode::kParseError, "not a coordinate tuple: " + s);
  }
  return q;
}

}  // namespace trackkit
