// Copyright 2026 The TRTC Beamforming Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace trtc {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Error hierarchy. ConfigError maps to CLI exit code 2, NumericalError to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class InvalidDistanceError : public Error {
 public:
  explicit InvalidDistanceError(double d)
      : Error("path loss requires a positive distance, got " +
              std::to_string(d)),
        distance_(d) {}
  double distance() const { return distance_; }

 private:
  double distance_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Carries the worst per-unit (or per-cell) power violation.
class FeasibilityError : public NumericalError {
 public:
  FeasibilityError(int cell, int unit, double power, double limit)
      : NumericalError("infeasible beamformer: cell " + std::to_string(cell) +
                       ", unit " + std::to_string(unit) + " carries " +
                       std::to_string(power) + " W > " + std::to_string(limit) +
                       " W"),
        cell_(cell),
        unit_(unit),
        power_(power) {}
  int cell() const { return cell_; }
  int unit() const { return unit_; }
  double power() const { return power_; }

 private:
  int cell_;
  int unit_;
  double power_;
};

class CurvatureError : public NumericalError {
 public:
  explicit CurvatureError(double curvature)
      : NumericalError("ball QP needs strictly negative curvature, got " +
                       std::to_string(curvature)),
        curvature_(curvature) {}
  double curvature() const { return curvature_; }

 private:
  double curvature_;
};

class OracleError : public NumericalError {
 public:
  OracleError(const std::string& message, CVec last_iterate)
      : NumericalError(message), last_iterate_(std::move(last_iterate)) {}
  const CVec& last_iterate() const { return last_iterate_; }

 private:
  CVec last_iterate_;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace trtc
