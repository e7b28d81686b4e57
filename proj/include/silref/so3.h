#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "silref/errors.h"

namespace silref {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat23 = Eigen::Matrix<double, 2, 3>;

/**
 * Continuous 6d rotation parameters: two stacked 3-vectors (a1, a2) that
 * Gram-Schmidt orthogonalization turns into the columns of a rotation.
 */
struct Rotation6D {
  Vec6 values = (Vec6() << 1, 0, 0, 0, 1, 0).finished();

  Rotation6D() = default;
  explicit Rotation6D(const Vec6& v) : values(v) {}
  Rotation6D(const Vec3& a1, const Vec3& a2) { values << a1, a2; }

  Vec3 a1() const { return values.head<3>(); }
  Vec3 a2() const { return values.tail<3>(); }
};

/// Rigid transform x' = R x + t. Translation in meters.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose Identity() { return {}; }

  Vec3 operator*(const Vec3& x) const { return rotation * x + translation; }
};

/// Pinhole intrinsics in pixels.
struct CameraIntrinsics {
  double fx = 1;
  double fy = 1;
  double cx = 0;
  double cy = 0;
  int width = 1;
  int height = 1;

  // Focal length from a horizontal field of view, principal point centred.
  static CameraIntrinsics FromFov(double horizontal_fov_deg, int width,
                                  int height);
  void Validate() const;
};

inline constexpr double kDefaultZNear = 1e-4;

// Gram-Schmidt map; throws DegenerateInput when a1 = 0 or a1 || a2.
Mat3 Rot6dToMatrix(const Rotation6D& a);

// Vector-Jacobian product: dL/da given dL/dR.
Vec6 Rot6dGradient(const Rotation6D& a, const Mat3& upstream);

// First two columns of R. Exact inverse of Rot6dToMatrix on SO(3).
Rotation6D MatrixToRot6d(const Mat3& rotation);

/// Geodesic angle arccos((trace(R1 R2^T) - 1) / 2), evaluated as an atan2
/// of the skew and trace parts. Radians in [0, pi].
double AngularDistance(const Mat3& r1, const Mat3& r2);

// p1 * p2, i.e. apply p2 first.
Pose Compose(const Pose& p1, const Pose& p2);
Pose Invert(const Pose& p);

struct Projection {
  Vec2 pixel;
  Mat23 jacobian;  // d(pixel) / d(camera-space point)
};

// Throws BehindCamera when v.z <= z_near.
Projection ProjectPoint(const Vec3& v, const CameraIntrinsics& k,
                        double z_near = kDefaultZNear);

Mat3 Hat(const Vec3& w);

// Rodrigues formula.
Mat3 ExpSO3(const Vec3& axis_angle);

// Inverse of ExpSO3 with angle in [0, pi]. At angle pi the axis sign is
// fixed so that its largest-magnitude component is positive.
Vec3 LogSO3(const Mat3& rotation);

/// Translation interpolated linearly, rotation along the geodesic
/// R0 exp(lambda log(R0^T R1)). Endpoints are returned exactly.
Pose GeodesicInterpolate(const Pose& p0, const Pose& p1, double lambda);

// Max-abs deviation of R^T R from identity and of det(R) from one.
double OrthonormalityError(const Mat3& rotation);

}  // namespace silref
