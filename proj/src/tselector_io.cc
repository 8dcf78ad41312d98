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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackkit/tselector.h"

namespace trackkit::tselector {
namespace {

constexpr char kMagic[4] = {'T', 'K', 'S', 'P'};

const char* ActivationName(Activation a) {
  return a == Activation::kGelu ? "gelu" : "identity";
}

Activation ActivationFromName(const std::string& s) {
  if (s == "gelu") return Activation::kGelu;
  if (s == "identity") return Activation::kIdentity;
  throw Error(ErrorCode::kParseError, "unknown activation " + s);
}

void PutU32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t GetU32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw Error(ErrorCode::kParseError, "truncated params header");
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

void PutF64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double GetF64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) {
    throw Error(ErrorCode::kParseError, "truncated params payload");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

// Column-major traversal of every tensor, in the serialized order.
void VisitTensors(SelectorParams<double>& p,
                  const std::function<void(double&)>& fn) {
  auto visit = [&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) fn(m.data()[i]);
  };
  visit(p.gate_w1);
  visit(p.gate_b1);
  visit(p.gate_w2);
  fn(p.gate_b2);
  visit(p.proj_w1);
  visit(p.proj_b1);
  visit(p.proj_w2);
  visit(p.proj_b2);
}

}  // namespace

void SaveParams(const SelectorParams<double>& p, const std::string& path) {
  ValidateParams(p);
  nlohmann::ordered_json header;
  header["format"] = "tselector-params";
  header["version"] = 1;
  header["dtype"] = "float64";
  header["layout"] = "column-major";
  header["channels"] = p.channels();
  header["hidden"] = p.hidden();
  header["out_dim"] = p.out_dim();
  header["k"] = p.k;
  header["seed"] = p.seed;
  header["weight_by_score"] = p.weight_by_score;
  header["gate_activation"] = ActivationName(p.gate_activation);
  header["proj_activation"] = ActivationName(p.proj_activation);
  header["order"] = {"gate_w1", "gate_b1", "gate_w2", "gate_b2",
                     "proj_w1", "proj_b1", "proj_w2", "proj_b2"};
  const std::string text = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIoError, "cannot write " + path);
  os.write(kMagic, 4);
  PutU32(os, static_cast<std::uint32_t>(text.size()));
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  SelectorParams<double> copy = p;
  VisitTensors(copy, [&](double& v) { PutF64(os, v); });
  if (!os) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

SelectorParams<double> LoadParams(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw Error(ErrorCode::kIoError, "cannot read " + path);
  const std::uint64_t file_size = static_cast<std::uint64_t>(is.tellg());
  is.seekg(0);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::kParseError, "bad magic in " + path);
  }
  const std::uint32_t len = GetU32(is);
  if (len > file_size - 8) {
    throw Error(ErrorCode::kParseError, "truncated header in " + path);
  }
  std::string text(len, '\0');
  if (!is.read(text.data(), len)) {
    throw Error(ErrorCode::kParseError, "truncated header in " + path);
  }
  SelectorParams<double> p;
  try {
    const nlohmann::json header = nlohmann::json::parse(text);
    if (header.value("format", "") != "tselector-params" ||
        header.value("dtype", "") != "float64") {
      throw Error(ErrorCode::kParseError, "unsupported params header");
    }
    const Eigen::Index c = header.at("channels").get<Eigen::Index>();
    const Eigen::Index h = header.at("hidden").get<Eigen::Index>();
    const Eigen::Index d = header.at("out_dim").get<Eigen::Index>();
    if (c < 1 || h < 1 || d < 1) {
      throw Error(ErrorCode::kShapeError, "non-positive dims in " + path);
    }
    // Sizes are checked against the file before anything is allocated.
    const std::uint64_t values = static_cast<std::uint64_t>(c * h + 2 * h + 1 + c * d +
                                                            d * d + 2 * d);
    if (values * 8 != file_size - 8 - len) {
      throw Error(ErrorCode::kShapeError, "payload size does not match dims in " + path);
    }
    p.gate_w1.resize(c, h);
    p.gate_b1.resize(h);
    p.gate_w2.resize(h);
    p.proj_w1.resize(c, d);
    p.proj_b1.resize(d);
    p.proj_w2.resize(d, d);
    p.proj_b2.resize(d);
    p.k = header.at("k").get<int>();
    p.seed = header.value("seed", std::uint64_t{0});
    p.weight_by_score = header.at("weight_by_score").get<bool>();
    p.gate_activation = ActivationFromName(header.at("gate_activation"));
    p.proj_activation = ActivationFromName(header.at("proj_activation"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
  VisitTensors(p, [&](double& v) { v = GetF64(is); });
  return p;
}

}  // namespace trackkit::tselector
