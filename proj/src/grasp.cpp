#include "robloss/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace robloss {

namespace {

double norm(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

void require_unit(const Vec3& v, const char* what) {
  if (std::abs(norm(v) - 1.0) > 1e-6)
    throw InvalidInputError(std::string(what) + ": vector is not unit length");
}

// shortest-arc rotation taking the canonical +x axis onto v (Rodrigues,
// stable form R = I + [k]x + [k]x^2 / (1 + c) with k = e_x cross v)
Mat3 align_canonical_to(const Vec3& v) {
  const double c = v[0];  // e_x . v
  if (c < -1.0 + 1e-12) {
    // antipodal branch: 180 degrees about +z
    return Mat3{-1, 0, 0, 0, -1, 0, 0, 0, 1};
  }
  const double kx = 0.0, ky = -v[2], kz = v[1];  // e_x cross v
  const double f = 1.0 / (1.0 + c);
  // I + K + K^2 * f with K = skew(k)
  Mat3 r;
  r[0] = 1.0 + f * (-ky * ky - kz * kz);
  r[1] = -kz + f * (kx * ky);
  r[2] = ky + f * (kx * kz);
  r[3] = kz + f * (kx * ky);
  r[4] = 1.0 + f * (-kx * kx - kz * kz);
  r[5] = -kx + f * (ky * kz);
  r[6] = -ky + f * (kx * kz);
  r[7] = kx + f * (ky * kz);
  r[8] = 1.0 + f * (-kx * kx - ky * ky);
  return r;
}

Mat3 rot_about_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return Mat3{1, 0, 0, 0, c, -s, 0, s, c};
}

}  // namespace

Mat3 mat3_multiply(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
  return out;
}

Mat3 mat3_transpose(const Mat3& m) {
  return Mat3{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
}

double mat3_determinant(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (n == 0.0) throw InvalidInputError("normalized: zero vector");
  return Vec3{v[0] / n, v[1] / n, v[2] / n};
}

bool validate_rotation(const Mat3& rotation, double tol) {
  for (double v : rotation)
    if (!std::isfinite(v)) return false;
  if (std::abs(mat3_determinant(rotation) - 1.0) > tol) return false;
  const Mat3 gram = mat3_multiply(mat3_transpose(rotation), rotation);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(gram[i * 3 + j] - expected) > tol) return false;
    }
  return true;
}

Mat3 compose_rotation(const Vec3& approach, double in_plane) {
  require_unit(approach, "compose_rotation");
  return mat3_multiply(align_canonical_to(approach), rot_about_x(in_plane));
}

std::pair<Vec3, double> decouple_rotation(const Mat3& rotation) {
  if (!validate_rotation(rotation))
    throw InvalidInputError("decouple_rotation: input is not a rotation");
  // the approach vector is the image of +x: the first column
  const Vec3 approach = normalized(Vec3{rotation[0], rotation[3], rotation[6]});
  // strip the alignment to leave a pure rotation about x
  const Mat3 residual =
      mat3_multiply(mat3_transpose(align_canonical_to(approach)), rotation);
  double in_plane = std::atan2(residual[7], residual[4]);
  if (in_plane >= std::numbers::pi) in_plane -= 2.0 * std::numbers::pi;
  return {approach, in_plane};
}

double approach_angle_deg(const Vec3& v1, const Vec3& v2) {
  require_unit(v1, "approach_angle_deg");
  require_unit(v2, "approach_angle_deg");
  double dot = v1[0] * v2[0] + v1[1] * v2[1] + v1[2] * v2[2];
  dot = std::clamp(dot, -1.0, 1.0);
  return std::acos(dot) * 180.0 / std::numbers::pi;
}

nlohmann::ordered_json grasp_to_json(const Grasp& grasp) {
  nlohmann::ordered_json doc;
  doc["rotation"] = grasp.rotation;
  doc["translation"] = grasp.translation;
  doc["width"] = grasp.width;
  return doc;
}

Grasp grasp_from_json(const nlohmann::json& doc) {
  Grasp grasp;
  grasp.rotation = doc.at("rotation").get<Mat3>();
  grasp.translation = doc.at("translation").get<Vec3>();
  grasp.width = doc.at("width").get<double>();
  return grasp;
}

nlohmann::ordered_json decoupled_to_json(const DecoupledGrasp& grasp) {
  nlohmann::ordered_json doc;
  doc["approach"] = grasp.approach;
  doc["depth"] = grasp.depth;
  doc["in_plane_rotation"] = grasp.in_plane_rotation;
  doc["translation"] = grasp.translation;
  doc["width"] = grasp.width;
  return doc;
}

DecoupledGrasp decoupled_from_json(const nlohmann::json& doc) {
  DecoupledGrasp grasp;
  grasp.approach = doc.at("approach").get<Vec3>();
  grasp.depth = doc.at("depth").get<double>();
  grasp.in_plane_rotation = doc.at("in_plane_rotation").get<double>();
  grasp.translation = doc.at("translation").get<Vec3>();
  grasp.width = doc.at("width").get<double>();
  return grasp;
}

}  // namespace robloss
