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

#ifndef TRACKKIT_GEOMETRY_H_
#define TRACKKIT_GEOMETRY_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace trackkit {

// Axis-aligned box in normalized image coordinates (fractions of the
// original frame width/height). Valid boxes satisfy 0 <= x1 <= x2 <= 1 and
// 0 <= y1 <= y2 <= 1.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  friend bool operator==(const Box&, const Box&) = default;
};

// Box on the integer text grid; each value lies in [0, 100).
struct QuantBox {
  std::array<int, 4> v{};

  friend bool operator==(const QuantBox&, const QuantBox&) = default;
};

inline constexpr int kQuantLevels = 100;

bool IsValid(const Box& b);
// Throws InvalidBox unless IsValid(b).
void ValidateBox(const Box& b);
bool IsDegenerate(const Box& b);

// Intersection over union. Zero when the union has zero area.
double Iou(const Box& a, const Box& b);

// Euclidean distance between box centers, in pixels.
double CenterError(const Box& gt, const Box& pred, double frame_w,
                   double frame_h);

// Center offset measured in units of the ground-truth box size.
double NormCenterError(const Box& gt, const Box& pred);

QuantBox Quantize(const Box& b);
Box Dequantize(const QuantBox& q);
void ValidateQuant(const QuantBox& q);

// Canonical text form "[a,b,c,d]".
std::string Serialize(const QuantBox& q);

// Every bracketed 4-tuple of integers in [0,100) found in `text`, in order.
// Malformed tuples are skipped.
std::vector<QuantBox> ParseCoords(std::string_view text);

// Strict single-box parse used for dataset files: the whole string must be
// one canonical tuple (whitespace after commas tolerated). Throws ParseError.
QuantBox ParseQuantBox(std::string_view text);

}  // namespace trackkit

#endif  // TRACKKIT_GEOMETRY_H_
