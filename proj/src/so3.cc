#include "silref/so3.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace silref {
namespace {

// Minimum angle between a1 and a2 before the pair is considered parallel.
constexpr double kParallelAngle = 1e-8;

struct GramSchmidt {
  Vec3 b1, b2, b3;
  Vec3 u;  // a2 minus its projection on b1
  double a1_norm;
  double u_norm;
};

GramSchmidt Orthogonalize(const Rotation6D& a) {
  const Vec3 a1 = a.a1();
  const Vec3 a2 = a.a2();
  if (!a.values.allFinite()) {
    throw DegenerateInput("6d rotation has non-finite components");
  }
  const double n1 = a1.norm();
  const double n2 = a2.norm();
  if (n1 == 0.0 || n2 == 0.0) {
    throw DegenerateInput("6d rotation has a zero column");
  }
  if (a1.cross(a2).norm() <= std::sin(kParallelAngle) * n1 * n2) {
    throw DegenerateInput("6d rotation columns are parallel");
  }
  GramSchmidt gs;
  gs.a1_norm = n1;
  gs.b1 = a1 / n1;
  gs.u = a2 - gs.b1.dot(a2) * gs.b1;
  gs.u_norm = gs.u.norm();
  gs.b2 = gs.u / gs.u_norm;
  gs.b3 = gs.b1.cross(gs.b2);
  return gs;
}

}  // namespace

CameraIntrinsics CameraIntrinsics::FromFov(double horizontal_fov_deg,
                                           int width, int height) {
  CameraIntrinsics k;
  const double half = 0.5 * horizontal_fov_deg * std::numbers::pi / 180.0;
  k.fx = 0.5 * width / std::tan(half);
  k.fy = k.fx;
  k.cx = 0.5 * width;
  k.cy = 0.5 * height;
  k.width = width;
  k.height = height;
  k.Validate();
  return k;
}

void CameraIntrinsics::Validate() const {
  if (!(fx > 0) || !(fy > 0) || width < 1 || height < 1 ||
      !std::isfinite(cx) || !std::isfinite(cy)) {
    throw InvalidConfig("camera intrinsics need fx, fy > 0 and size >= 1");
  }
}

Mat3 Rot6dToMatrix(const Rotation6D& a) {
  const GramSchmidt gs = Orthogonalize(a);
  Mat3 r;
  r.col(0) = gs.b1;
  r.col(1) = gs.b2;
  r.col(2) = gs.b3;
  return r;
}

Vec6 Rot6dGradient(const Rotation6D& a, const Mat3& upstream) {
  const GramSchmidt gs = Orthogonalize(a);
  const Vec3 g1 = upstream.col(0);
  const Vec3 g2 = upstream.col(1);
  const Vec3 g3 = upstream.col(2);

  // b3 = b1 x b2
  Vec3 gb1 = g1 + gs.b2.cross(g3);
  const Vec3 gb2 = g2 + g3.cross(gs.b1);

  // b2 = u / |u|
  const Vec3 gu = (gb2 - gs.b2 * gs.b2.dot(gb2)) / gs.u_norm;

  // u = a2 - (b1 . a2) b1
  const Vec3 a2 = a.a2();
  const double b1_dot_a2 = gs.b1.dot(a2);
  const double b1_dot_gu = gs.b1.dot(gu);
  const Vec3 ga2 = gu - gs.b1 * b1_dot_gu;
  gb1 -= b1_dot_a2 * gu + b1_dot_gu * a2;

  // b1 = a1 / |a1|
  const Vec3 ga1 = (gb1 - gs.b1 * gs.b1.dot(gb1)) / gs.a1_norm;

  Vec6 out;
  out << ga1, ga2;
  return out;
}

Rotation6D MatrixToRot6d(const Mat3& rotation) {
  return Rotation6D(Vec3(rotation.col(0)), Vec3(rotation.col(1)));
}

double AngularDistance(const Mat3& r1, const Mat3& r2) {
  // atan2 keeps full precision near 0 and pi where arccos does not.
  const Mat3 m = r1 * r2.transpose();
  const double c = (m.trace() - 1.0) / 2.0;
  const Vec3 axis(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  return std::atan2(0.5 * axis.norm(), std::clamp(c, -1.0, 1.0));
}

Pose Compose(const Pose& p1, const Pose& p2) {
  Pose out;
  out.rotation = p1.rotation * p2.rotation;
  out.translation = p1.rotation * p2.translation + p1.translation;
  return out;
}

Pose Invert(const Pose& p) {
  Pose out;
  out.rotation = p.rotation.transpose();
  out.translation = -(out.rotation * p.translation);
  return out;
}

Projection ProjectPoint(const Vec3& v, const CameraIntrinsics& k,
                        double z_near) {
  if (!(v.z() > z_near)) {
    throw BehindCamera("point at z = " + std::to_string(v.z()) +
                       " is not in front of the camera");
  }
  const double inv_z = 1.0 / v.z();
  const double x = v.x() * inv_z;
  const double y = v.y() * inv_z;
  Projection p;
  p.pixel = Vec2(k.fx * x + k.cx, k.fy * y + k.cy);
  p.jacobian << k.fx * inv_z, 0.0, -k.fx * x * inv_z,  //
      0.0, k.fy * inv_z, -k.fy * y * inv_z;
  return p;
}

Mat3 Hat(const Vec3& w) {
  Mat3 m;
  m << 0, -w.z(), w.y(),  //
      w.z(), 0, -w.x(),   //
      -w.y(), w.x(), 0;
  return m;
}

Mat3 ExpSO3(const Vec3& axis_angle) {
  const double theta = axis_angle.norm();
  const Mat3 k = Hat(axis_angle);
  if (theta < 1e-8) {
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 LogSO3(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(c);
  const Vec3 vee(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (theta < 1e-8) {
    return 0.5 * vee;
  }
  if (theta < std::numbers::pi - 1e-3) {
    return theta / (2.0 * std::sin(theta)) * vee;
  }
  // Near pi: recover n n^T from the symmetric part.
  const Mat3 nnt =
      (0.5 * (r + r.transpose()) - c * Mat3::Identity()) / (1.0 - c);
  int k = 0;
  nnt.diagonal().maxCoeff(&k);
  Vec3 n = nnt.col(k) / std::sqrt(std::max(nnt(k, k), 1e-300));
  n.normalize();
  // 2 sin(theta) n == vee; below the noise floor fall back to the
  // largest-component-positive convention.
  if (vee.norm() > 1e-9) {
    if (n.dot(vee) < 0) n = -n;
  } else {
    int j = 0;
    n.cwiseAbs().maxCoeff(&j);
    if (n[j] < 0) n = -n;
  }
  return theta * n;
}

Pose GeodesicInterpolate(const Pose& p0, const Pose& p1, double lambda) {
  if (lambda == 0.0) return p0;
  if (lambda == 1.0) return p1;
  Pose out;
  out.translation = (1.0 - lambda) * p0.translation + lambda * p1.translation;
  const Vec3 w = LogSO3(p0.rotation.transpose() * p1.rotation);
  out.rotation = p0.rotation * ExpSO3(lambda * w);
  return out;
}

double OrthonormalityError(const Mat3& rotation) {
  const double ortho =
      (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(rotation.determinant() - 1.0));
}

}  // namespace silref
