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

#include "trackkit/kalman.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "oracles/kalman_oracle.h"

namespace trackkit {
namespace {

using State = KalmanState<double>;

void ExpectMatchesOracle(const State& s, const oracle::KfState& o, double tol) {
  for (int i = 0; i < 8; ++i) {
    ASSERT_NEAR(s.mean(i), o.x[i], tol) << "mean " << i;
    for (int j = 0; j < 8; ++j) ASSERT_NEAR(s.covariance(i, j), o.P[i][j], tol) << i << "," << j;
  }
}

void Measure(const Box& b, double z[4]) {
  z[0] = b.center_x();
  z[1] = b.center_y();
  z[2] = b.width() / b.height();
  z[3] = b.height();
}

// Random linear track with small jitter, kept inside the unit square.
std::vector<Box> LinearTrack(std::mt19937_64& rng, int frames) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.002);
  const double w = 0.05 + 0.15 * u(rng), h = 0.05 + 0.15 * u(rng);
  const double x0 = 0.1 + 0.2 * u(rng), y0 = 0.1 + 0.2 * u(rng);
  const double vx = 0.004 * (u(rng) - 0.5), vy = 0.004 * (u(rng) - 0.5);
  std::vector<Box> out;
  for (int f = 0; f < frames; ++f) {
    const double x = x0 + vx * f + jitter(rng), y = y0 + vy * f + jitter(rng);
    out.push_back({x, y, x + w, y + h});
  }
  return out;
}

TEST(KalmanTest, InitExamples) {
  const State s = KalmanInit<double>({.4, .4, .6, .6});
  EXPECT_NEAR(s.mean(0), 0.5, 1e-15);
  EXPECT_NEAR(s.mean(1), 0.5, 1e-15);
  EXPECT_NEAR(s.mean(2), 1.0, 1e-15);
  EXPECT_NEAR(s.mean(3), 0.2, 1e-15);
  EXPECT_TRUE(s.mean.tail<4>().isZero());
  EXPECT_TRUE((s.covariance.diagonal().array() > 0).all());
  const State t = KalmanInit<double>({.4, .4, .6, .6});
  EXPECT_EQ(s.mean, t.mean);
  EXPECT_EQ(s.covariance, t.covariance);
  try {
    KalmanInit<double>({.4, .4, .4, .6});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateBox);
  }
}

TEST(KalmanTest, PredictExamples) {
  State s = KalmanInit<double>({.4, .4, .6, .6});
  const State p = KalmanPredict(s);
  EXPECT_EQ(p.mean.head<4>(), s.mean.head<4>());
  EXPECT_GE(p.covariance.trace(), s.covariance.trace());
  s.mean(4) = 0.01;
  EXPECT_NEAR(KalmanPredict(s).mean(0), 0.51, 1e-15);
}

TEST(KalmanTest, UpdateExamples) {
  const Box b{.4, .4, .6, .6};
  const State s = KalmanPredict(KalmanInit<double>(b));
  const State u = KalmanUpdate(s, b);
  EXPECT_NEAR((u.mean.head<4>() - s.mean.head<4>()).norm(), 0.0, 1e-15);
  EXPECT_LE(u.covariance.trace(), s.covariance.trace());

  // Repeated updates against a different fixed box converge to it.
  const Box target{.45, .42, .61, .66};
  State c = KalmanInit<double>(b);
  for (int i = 0; i < 200; ++i) c = KalmanUpdate(KalmanPredict(c), target);
  const Vector4<double> z = MeasurementFromBox<double>(target);
  EXPECT_NEAR(c.mean(0), z(0), 1e-9);
  EXPECT_NEAR(c.mean(1), z(1), 1e-9);
  EXPECT_NEAR(c.mean(3), z(3), 1e-9);
  // Aspect velocity noise is 1e-5, so the aspect settles much more slowly.
  EXPECT_NEAR(c.mean(2), z(2), 1e-4);
}

TEST(KalmanTest, UpdateLandsBetweenPriorAndMeasurement) {
  const State s = KalmanPredict(KalmanInit<double>({.2, .2, .4, .4}));
  const Box m{.25, .22, .45, .42};
  const State u = KalmanUpdate(s, m);
  const Vector4<double> z = MeasurementFromBox<double>(m);
  for (int i = 0; i < 4; ++i) {
    EXPECT_GE(u.mean(i), std::min(s.mean(i), z(i)) - 1e-15);
    EXPECT_LE(u.mean(i), std::max(s.mean(i), z(i)) + 1e-15);
  }
}

TEST(KalmanTest, GateDistanceExamples) {
  const Box b{.3, .3, .5, .6};
  const State s = KalmanPredict(KalmanInit<double>(b));
  EXPECT_NEAR(GateDistance(s, b), 0.0, 1e-15);

  // Covariance straight from init + predict is diagonal, so the quadratic
  // form reduces to a sum of per-axis ratios.
  const Box m{.32, .29, .53, .62};
  const auto [mean, cov] = KalmanProject(s);
  ASSERT_TRUE(cov.isDiagonal());
  const Vector4<double> d = MeasurementFromBox<double>(m) - mean;
  double expected = 0.0;
  for (int i = 0; i < 4; ++i) expected += d(i) * d(i) / cov(i, i);
  EXPECT_NEAR(GateDistance(s, m), expected, 1e-9 * expected);

  double prev = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double dx = 0.01 * k;
    const double g = GateDistance(s, Box{.3 + dx, .3, .5 + dx, .6});
    EXPECT_GT(g, prev);
    prev = g;
  }
}

TEST(KalmanTest, SingularCovarianceIsReported) {
  State s = KalmanInit<double>({.3, .3, .5, .6});
  s.covariance.setZero();
  s.mean(3) = 0.0;
  KalmanNoise<double> noise;
  noise.aspect_measurement = 0.0;
  try {
    GateDistance(s, Box{.3, .3, .5, .6}, noise);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularCovariance);
  }
}

TEST(KalmanTest, MatchesStraightLineOracle) {
  std::mt19937_64 rng(2024);
  for (int track = 0; track < 50; ++track) {
    const std::vector<Box> boxes = LinearTrack(rng, 30);
    double z[4];
    Measure(boxes[0], z);
    State s = KalmanInit<double>(boxes[0]);
    oracle::KfState o = oracle::KfInit(z);
    ExpectMatchesOracle(s, o, 1e-9);
    for (std::size_t f = 1; f < boxes.size(); ++f) {
      s = KalmanPredict(s);
      o = oracle::KfPredict(o);
      ExpectMatchesOracle(s, o, 1e-9);
      Measure(boxes[f], z);
      ASSERT_NEAR(GateDistance(s, boxes[f]), oracle::KfGate(o, z),
                  1e-9 * std::max(1.0, oracle::KfGate(o, z)));
      s = KalmanUpdate(s, boxes[f]);
      o = oracle::KfUpdate(o, z);
      ExpectMatchesOracle(s, o, 1e-9);
    }
  }
}

TEST(KalmanTest, CovarianceStaysSymmetricPsd) {
  std::mt19937_64 rng(99);
  std::bernoulli_distribution coin(0.5);
  const std::vector<Box> boxes = LinearTrack(rng, 200);
  State s = KalmanInit<double>(boxes[0]);
  for (std::size_t f = 1; f < boxes.size(); ++f) {
    s = KalmanPredict(s);
    if (coin(rng)) s = KalmanUpdate(s, boxes[f]);
    EXPECT_LE((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix8<double>> eig(s.covariance);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(KalmanTest, TranslationEquivariant) {
  std::mt19937_64 rng(5);
  const std::vector<Box> boxes = LinearTrack(rng, 40);
  const double dx = 0.13, dy = -0.04;
  State a = KalmanInit<double>(boxes[0]);
  State b = KalmanInit<double>({boxes[0].x1 + dx, boxes[0].y1 + dy, boxes[0].x2 + dx, boxes[0].y2 + dy});
  for (std::size_t f = 1; f < boxes.size(); ++f) {
    const Box& m = boxes[f];
    a = KalmanUpdate(KalmanPredict(a), m);
    b = KalmanUpdate(KalmanPredict(b), Box{m.x1 + dx, m.y1 + dy, m.x2 + dx, m.y2 + dy});
    EXPECT_NEAR(b.mean(0) - a.mean(0), dx, 1e-12);
    EXPECT_NEAR(b.mean(1) - a.mean(1), dy, 1e-12);
    EXPECT_NEAR(b.mean(3), a.mean(3), 1e-12);
  }
}

TEST(DriftCheckTest, StationaryAndSmoothTracksPass) {
  Trajectory still{"v", "c", {}};
  for (int f = 0; f < 30; ++f) still.frames.push_back({f, {.3, .3, .5, .5}, 1.0});
  EXPECT_FALSE(DriftCheck(still).drifted);

  // +0.5% of the width per frame.
  Trajectory smooth{"v", "c", {}};
  for (int f = 0; f < 60; ++f) {
    const double x = 0.2 + 0.005 * 0.2 * f;
    smooth.frames.push_back({f, {x, .3, x + .2, .5}, 1.0});
  }
  const DriftReport r = DriftCheck(smooth, 18.0);
  EXPECT_FALSE(r.drifted);
  EXPECT_TRUE(r.flagged_frames.empty());

  // Same statistic from the oracle filter.
  double z[4];
  Measure(smooth.frames[0].box, z);
  oracle::KfState o = oracle::KfInit(z);
  for (std::size_t f = 1; f < smooth.frames.size(); ++f) {
    o = oracle::KfPredict(o);
    Measure(smooth.frames[f].box, z);
    EXPECT_LT(oracle::KfGate(o, z), 18.0);
    o = oracle::KfUpdate(o, z);
  }
}

TEST(DriftCheckTest, JumpFlagsExactlyTheJumpFrame) {
  Trajectory t = fixtures::LineTrajectory("v", "c");
  t.frames[10].box.x1 += 5 * fixtures::kSide;
  t.frames[10].box.x2 += 5 * fixtures::kSide;
  const DriftReport r = DriftCheck(t, kDefaultGateThreshold);
  EXPECT_TRUE(r.drifted);
  EXPECT_EQ(r.flagged_frames, std::vector<int>{10});
  EXPECT_GT(r.max_gate_distance, kDefaultGateThreshold);
}

TEST(DriftCheckTest, TooShort) {
  Trajectory t{"v", "c", {{0, {.1, .1, .2, .2}, 1.0}}};
  try {
    DriftCheck(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
}

}  // namespace
}  // namespace trackkit
