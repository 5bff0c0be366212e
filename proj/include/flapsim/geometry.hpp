#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "flapsim/errors.hpp"

namespace flapsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Euler angles in the Z-X-Y convention used throughout: the body attitude
/// is composed as R = Rz(yaw) * Rx(roll) * Ry(pitch), applied from the world
/// frame W to the body frame B. Columns of R are the body axes expressed in W.
struct EulerZxy {
  double roll = 0.0;   // phi, about X (rad)
  double pitch = 0.0;  // theta, about Y (rad)
  double yaw = 0.0;    // psi, about Z (rad)
};

/// Rigid-body state. R maps body to world; omega is expressed in the body
/// frame. `grounded` is set by the ground-contact model.
struct VehicleState {
  Vec3 position = Vec3::Zero();       // m, world
  Vec3 velocity = Vec3::Zero();       // m/s, world
  Mat3 rotation = Mat3::Identity();   // body-to-world
  Vec3 body_rates = Vec3::Zero();     // rad/s, body
  bool grounded = false;
};

inline Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

inline Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

inline Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

/// Skew-symmetric (hat) map: hat(v) * w == v x w.
inline Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// Inverse of hat on antisymmetric matrices. Rejects inputs whose symmetric
/// part exceeds 1e-9 so that upstream sign errors surface immediately; use
/// vee_symmetrized() where the argument is antisymmetric by construction.
inline Vec3 vee(const Mat3& a) {
  const double sym = (a + a.transpose()).cwiseAbs().maxCoeff();
  if (sym > 1e-9) {
    std::ostringstream msg;
    msg << "vee: matrix not antisymmetric (|A + A^T|_max = " << sym << ")";
    throw NonAntisymmetric(msg.str());
  }
  return Vec3(a(2, 1), a(0, 2), a(1, 0));
}

/// Extracts vee(0.5 * (A - A^T)) without the antisymmetry check.
inline Vec3 vee_symmetrized(const Mat3& a) {
  const Mat3 skew = 0.5 * (a - a.transpose());
  return Vec3(skew(2, 1), skew(0, 2), skew(1, 0));
}

/// Composes R = Rz(yaw) * Rx(roll) * Ry(pitch).
inline Mat3 euler_zxy_to_rotation(const EulerZxy& e) {
  return rot_z(e.yaw) * rot_x(e.roll) * rot_y(e.pitch);
}

/// Recovers Z-X-Y angles from a rotation matrix. The convention puts
/// sin(roll) at R(2,1); roll is confined to [-pi/2, pi/2].
inline EulerZxy rotation_to_euler_zxy(const Mat3& r) {
  const double sin_roll = std::clamp(r(2, 1), -1.0, 1.0);
  const double cos_roll = std::sqrt(std::max(0.0, 1.0 - sin_roll * sin_roll));
  if (cos_roll < 1e-6) {
    throw GimbalLock("rotation_to_euler_zxy: |cos(roll)| < 1e-6");
  }
  EulerZxy e;
  e.roll = std::asin(sin_roll);
  e.pitch = std::atan2(-r(2, 0), r(2, 2));
  e.yaw = std::atan2(-r(0, 1), r(1, 1));
  return e;
}

/// X axis of the intermediate frame C (world rotated by yaw only).
inline Vec3 yaw_frame_x(double yaw) {
  return Vec3(std::cos(yaw), std::sin(yaw), 0.0);
}

/// Max-abs deviation of R^T R from the identity.
inline double orthonormality_error(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
  return orthonormality_error(r) < tol && std::abs(r.determinant() - 1.0) < tol;
}

/// Re-orthonormalizes a near-rotation by modified Gram-Schmidt on columns.
inline Mat3 orthonormalize(const Mat3& r) {
  Vec3 x = r.col(0).normalized();
  Vec3 y = (r.col(1) - x * x.dot(r.col(1))).normalized();
  Vec3 z = x.cross(y);
  Mat3 out;
  out.col(0) = x;
  out.col(1) = y;
  out.col(2) = z;
  return out;
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

/// Angle between the body Z axis and world vertical, in [0, pi]. Robust
/// tipped/upright test that avoids Euler extraction near the gimbal lock.
inline double tilt_angle(const Mat3& r) {
  return std::acos(std::clamp(r(2, 2), -1.0, 1.0));
}

/// Rotation about `axis` by `angle` (axis need not be normalized).
inline Mat3 axis_angle_rotation(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n < 1e-12) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, axis / n).toRotationMatrix();
}

}  // namespace flapsim
