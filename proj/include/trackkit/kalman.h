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

// Constant-velocity Kalman filter over box state (cx, cy, a, h) and their
// velocities, with height-scaled noise. Used to flag drifting trajectories.

#ifndef TRACKKIT_KALMAN_H_
#define TRACKKIT_KALMAN_H_

#include <vector>

#include <Eigen/Dense>

#include "trackkit/error.h"
#include "trackkit/geometry.h"
#include "trackkit/trajectory.h"

namespace trackkit {

template <typename Scalar>
using Vector4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using Vector8 = Eigen::Matrix<Scalar, 8, 1>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Matrix8 = Eigen::Matrix<Scalar, 8, 8>;

template <typename Scalar>
struct KalmanState {
  Vector8<Scalar> mean;
  Matrix8<Scalar> covariance;
};

template <typename Scalar>
struct KalmanNoise {
  Scalar weight_position = Scalar(1) / Scalar(20);
  Scalar weight_velocity = Scalar(1) / Scalar(160);
  // Aspect ratio is unitless and gets fixed deviations.
  Scalar aspect_init = Scalar(1e-2);
  Scalar aspect_velocity_init = Scalar(1e-5);
  Scalar aspect_process = Scalar(1e-2);
  Scalar aspect_velocity_process = Scalar(1e-5);
  Scalar aspect_measurement = Scalar(1e-1);
};

// chi-square 0.999 quantile, 4 degrees of freedom.
inline constexpr double kDefaultGateThreshold = 18.47;

template <typename Scalar>
Vector4<Scalar> MeasurementFromBox(const Box& b) {
  ValidateBox(b);
  if (IsDegenerate(b)) throw Error(ErrorCode::kDegenerateBox, "kalman measurement");
  Vector4<Scalar> z;
  z << Scalar(b.center_x()), Scalar(b.center_y()), Scalar(b.width() / b.height()),
      Scalar(b.height());
  return z;
}

template <typename Scalar>
Matrix8<Scalar> TransitionMatrix() {
  Matrix8<Scalar> f = Matrix8<Scalar>::Identity();
  f.template topRightCorner<4, 4>().setIdentity();
  return f;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 8> ObservationMatrix() {
  Eigen::Matrix<Scalar, 4, 8> h = Eigen::Matrix<Scalar, 4, 8>::Zero();
  h.template leftCols<4>().setIdentity();
  return h;
}

template <typename Scalar>
KalmanState<Scalar> KalmanInit(const Box& b,
                               const KalmanNoise<Scalar>& noise = {}) {
  const Vector4<Scalar> z = MeasurementFromBox<Scalar>(b);
  const Scalar h = z(3);
  KalmanState<Scalar> s;
  s.mean << z, Vector4<Scalar>::Zero();
  Vector8<Scalar> std_dev;
  std_dev << 2 * noise.weight_position * h, 2 * noise.weight_position * h,
      noise.aspect_init, 2 * noise.weight_position * h,
      10 * noise.weight_velocity * h, 10 * noise.weight_velocity * h,
      noise.aspect_velocity_init, 10 * noise.weight_velocity * h;
  s.covariance = std_dev.array().square().matrix().asDiagonal();
  return s;
}

template <typename Scalar>
KalmanState<Scalar> KalmanPredict(const KalmanState<Scalar>& s,
                                  const KalmanNoise<Scalar>& noise = {}) {
  const Scalar h = s.mean(3);
  Vector8<Scalar> std_dev;
  std_dev << noise.weight_position * h, noise.weight_position * h,
      noise.aspect_process, noise.weight_position * h,
      noise.weight_velocity * h, noise.weight_velocity * h,
      noise.aspect_velocity_process, noise.weight_velocity * h;
  const Matrix8<Scalar> f = TransitionMatrix<Scalar>();
  KalmanState<Scalar> out;
  out.mean = f * s.mean;
  out.covariance = f * s.covariance * f.transpose();
  out.covariance.diagonal() += std_dev.array().square().matrix();
  return out;
}

// Predicted measurement mean and innovation covariance S = H P H' + R.
template <typename Scalar>
std::pair<Vector4<Scalar>, Matrix4<Scalar>> KalmanProject(
    const KalmanState<Scalar>& s, const KalmanNoise<Scalar>& noise = {}) {
  const Scalar h = s.mean(3);
  Vector4<Scalar> std_dev;
  std_dev << noise.weight_position * h, noise.weight_position * h,
      noise.aspect_measurement, noise.weight_position * h;
  Matrix4<Scalar> innovation_cov = s.covariance.template topLeftCorner<4, 4>();
  innovation_cov.diagonal() += std_dev.array().square().matrix();
  return {s.mean.template head<4>(), innovation_cov};
}

template <typename Scalar>
KalmanState<Scalar> KalmanUpdate(const KalmanState<Scalar>& s, const Box& b,
                                 const KalmanNoise<Scalar>& noise = {}) {
  const Vector4<Scalar> z = MeasurementFromBox<Scalar>(b);
  const auto [projected, innovation_cov] = KalmanProject(s, noise);
  const Eigen::LLT<Matrix4<Scalar>> llt(innovation_cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance, "innovation covariance");
  }
  const Eigen::Matrix<Scalar, 4, 8> h = ObservationMatrix<Scalar>();
  // K = P H' S^-1, solved as S K' = H P.
  const Eigen::Matrix<Scalar, 8, 4> gain =
      llt.solve(h * s.covariance).transpose();
  KalmanState<Scalar> out;
  out.mean = s.mean + gain * (z - projected);
  out.covariance = s.covariance - gain * innovation_cov * gain.transpose();
  out.covariance = (Scalar(0.5) * (out.covariance + out.covariance.transpose())).eval();
  return out;
}

// Squared Mahalanobis distance of `b` under the state's measurement
// distribution. Pass the predicted state.
template <typename Scalar>
Scalar GateDistance(const KalmanState<Scalar>& s, const Box& b,
                    const KalmanNoise<Scalar>& noise = {}) {
  const Vector4<Scalar> z = MeasurementFromBox<Scalar>(b);
  const auto [projected, innovation_cov] = KalmanProject(s, noise);
  const Eigen::LLT<Matrix4<Scalar>> llt(innovation_cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance, "innovation covariance");
  }
  const Vector4<Scalar> d = z - projected;
  return d.dot(llt.solve(d));
}

struct DriftReport {
  std::vector<int> flagged_frames;
  // One entry per frame after the first.
  std::vector<double> gate_distances;
  double max_gate_distance = 0.0;
  bool drifted = false;
};

// Runs init/predict/gate/update over the trajectory. Frames whose gate
// distance exceeds `gate_threshold` are flagged and treated as outliers: the
// filter coasts on its prediction instead of absorbing them.
DriftReport DriftCheck(const Trajectory& t,
                       double gate_threshold = kDefaultGateThreshold,
                       const KalmanNoise<double>& noise = {});

}  // namespace trackkit

#endif  // TRACKKIT_KALMAN_H_
