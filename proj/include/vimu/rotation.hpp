#pragma once

#include <Eigen/Core>

#include "vimu/errors.hpp"

namespace vimu {

/// Unit quaternion in Hamilton convention, right-handed frames.
///
/// CONVENTION
/// ==========
/// A pose orientation q is LOCAL-TO-WORLD: q.rotate(v) maps a vector
/// expressed in the sensor/body frame into world coordinates, and
/// q.rotate_inverse(v) maps a world vector into the body frame. The matrix
/// returned by quat_to_matrix follows the same convention, so world-to-local
/// transforms use its transpose.
///
/// q and -q describe the same rotation; every constructor renormalizes and
/// canonicalizes the sign (w >= 0, ties broken by the first nonzero
/// component) so serialized values are deterministic.
class UnitQuaternion {
public:
    /// Identity rotation.
    UnitQuaternion() : w_(1.0), x_(0.0), y_(0.0), z_(0.0) {}

    /// Construct from components; renormalizes and canonicalizes.
    /// Throws ValidationError on zero or non-finite norm.
    UnitQuaternion(double w, double x, double y, double z);

    /// Rotation of `angle` radians about `axis` (need not be unit length).
    static UnitQuaternion from_axis_angle(const Eigen::Vector3d& axis, double angle);

    /// Exponential map: rotation vector theta*axis -> quaternion.
    static UnitQuaternion from_rotation_vector(const Eigen::Vector3d& rv);

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    /// Vector part (x, y, z).
    Eigen::Vector3d vec() const { return {x_, y_, z_}; }

    /// Conjugate; equals the inverse rotation for unit quaternions.
    UnitQuaternion inverse() const { return {w_, -x_, -y_, -z_}; }

    /// Apply the rotation: local-frame vector -> world frame.
    Eigen::Vector3d rotate(const Eigen::Vector3d& v) const;

    /// Apply the inverse rotation: world-frame vector -> local frame.
    Eigen::Vector3d rotate_inverse(const Eigen::Vector3d& v) const;

    /// Four-component dot product (used for interpolation and tests).
    double dot(const UnitQuaternion& o) const {
        return w_ * o.w_ + x_ * o.x_ + y_ * o.y_ + z_ * o.z_;
    }

private:
    double w_, x_, y_, z_;
};

/// Hamilton product: (a * b) rotates by b first, then a.
UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);

/// Rotation matrix (local-to-world) equivalent of q.
Eigen::Matrix3d quat_to_matrix(const UnitQuaternion& q);

/// Inverse of quat_to_matrix. Rejects matrices that are not orthonormal
/// with determinant +1 within 1e-6.
UnitQuaternion matrix_to_quat(const Eigen::Matrix3d& m);

/// Spherical linear interpolation from a (u=0) to b (u=1) along the
/// shorter arc, at constant angular rate. u must lie in [0, 1].
UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b, double u);

/// Logarithmic map: rotation vector theta*axis with theta in [0, pi].
/// Uses a series expansion below theta = 1e-6.
Eigen::Vector3d quat_log_angle_axis(const UnitQuaternion& q);

/// Angle of the relative rotation between a and b, in [0, pi].
double angular_distance(const UnitQuaternion& a, const UnitQuaternion& b);

}  // namespace vimu
