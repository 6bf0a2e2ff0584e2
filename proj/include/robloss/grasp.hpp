#pragma once

#include <array>
#include <utility>

#include "json.hpp"
#include "robloss/errors.hpp"

namespace robloss {

using Mat3 = std::array<double, 9>;  // row-major 3x3
using Vec3 = std::array<double, 3>;

/// Gripper pose in coupled form: orientation matrix, grasp center, width.
struct Grasp {
  Mat3 rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 translation{0, 0, 0};
  double width = 0.0;  // meters
};

/// Decoupled form: unit approach direction, signed depth along it, in-plane
/// rotation about the approach axis in [-pi, pi), plus translation/width.
struct DecoupledGrasp {
  Vec3 approach{1, 0, 0};
  double depth = 0.0;
  double in_plane_rotation = 0.0;
  Vec3 translation{0, 0, 0};
  double width = 0.0;
};

/// The canonical approach axis of the gripper frame is +x. compose uses the
/// shortest arc taking +x onto the approach vector, followed by the
/// in-plane rotation about the approach axis. The antipodal approach
/// (-x, where the shortest arc is ambiguous) maps to the 180-degree
/// rotation about +z.
inline constexpr Vec3 kCanonicalApproach{1.0, 0.0, 0.0};

/// True iff det(R) = 1 and R^T R = I, both within tol per entry.
bool validate_rotation(const Mat3& rotation, double tol = 1e-9);

/// Builds the rotation whose first column is `approach`. Throws
/// InvalidInputError when |approach| differs from 1 by more than 1e-6.
Mat3 compose_rotation(const Vec3& approach, double in_plane);

/// Inverse of compose_rotation; returns (approach, in_plane) with in_plane
/// in [-pi, pi). Throws InvalidInputError when the input fails
/// validate_rotation.
std::pair<Vec3, double> decouple_rotation(const Mat3& rotation);

/// Angle between two unit vectors in degrees, in [0, 180]. The dot product
/// is clamped to [-1, 1] before the arccos.
double approach_angle_deg(const Vec3& v1, const Vec3& v2);

// small fixed-size helpers used across the grasp tests and generators
Mat3 mat3_multiply(const Mat3& a, const Mat3& b);
Mat3 mat3_transpose(const Mat3& m);
double mat3_determinant(const Mat3& m);
Vec3 normalized(const Vec3& v);

nlohmann::ordered_json grasp_to_json(const Grasp& grasp);
Grasp grasp_from_json(const nlohmann::json& doc);
nlohmann::ordered_json decoupled_to_json(const DecoupledGrasp& grasp);
DecoupledGrasp decoupled_from_json(const nlohmann::json& doc);

}  // namespace robloss
