#include "vimu/rotation.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace vimu {

namespace {

// Canonical sign: w > 0, or w == 0 and the first nonzero of (x, y, z) > 0.
bool needs_flip(double w, double x, double y, double z) {
    if (w != 0.0) return w < 0.0;
    if (x != 0.0) return x < 0.0;
    if (y != 0.0) return y < 0.0;
    return z < 0.0;
}

}  // namespace

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
    const double n2 = w * w + x * x + y * y + z * z;
    if (!std::isfinite(n2) || n2 <= 0.0) {
        throw ValidationError("quaternion: norm is zero or non-finite");
    }
    // Rescaling by a norm within a few ulps of 1 would only churn the last
    // bit; skipping it keeps already-unit inputs bit-stable (serialized
    // round trips) while anything further off gets renormalized.
    const double inv = std::abs(n2 - 1.0) <= 8e-16 ? 1.0 : 1.0 / std::sqrt(n2);
    w_ = w * inv;
    x_ = x * inv;
    y_ = y * inv;
    z_ = z * inv;
    if (needs_flip(w_, x_, y_, z_)) {
        w_ = -w_;
        x_ = -x_;
        y_ = -y_;
        z_ = -z_;
    }
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
    const double n = axis.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw ValidationError("axis-angle: axis has zero or non-finite length");
    }
    const double half = 0.5 * angle;
    const double s = std::sin(half) / n;
    return {std::cos(half), axis.x() * s, axis.y() * s, axis.z() * s};
}

UnitQuaternion UnitQuaternion::from_rotation_vector(const Eigen::Vector3d& rv) {
    const double theta = rv.norm();
    if (!std::isfinite(theta)) {
        throw ValidationError("rotation vector: non-finite");
    }
    double s;  // sin(theta/2) / theta
    if (theta < 1e-6) {
        s = 0.5 - theta * theta / 48.0;
    } else {
        s = std::sin(0.5 * theta) / theta;
    }
    return {std::cos(0.5 * theta), rv.x() * s, rv.y() * s, rv.z() * s};
}

Eigen::Vector3d UnitQuaternion::rotate(const Eigen::Vector3d& v) const {
    // q * v * q^-1 expanded via the double-cross form.
    const Eigen::Vector3d qv(x_, y_, z_);
    const Eigen::Vector3d t = 2.0 * qv.cross(v);
    return v + w_ * t + qv.cross(t);
}

Eigen::Vector3d UnitQuaternion::rotate_inverse(const Eigen::Vector3d& v) const {
    const Eigen::Vector3d qv(-x_, -y_, -z_);
    const Eigen::Vector3d t = 2.0 * qv.cross(v);
    return v + w_ * t + qv.cross(t);
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
    return {a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
            a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
            a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
            a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w()};
}

Eigen::Matrix3d quat_to_matrix(const UnitQuaternion& q) {
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    Eigen::Matrix3d m;
    m(0, 0) = 1.0 - 2.0 * (y * y + z * z);
    m(0, 1) = 2.0 * (x * y - w * z);
    m(0, 2) = 2.0 * (x * z + w * y);
    m(1, 0) = 2.0 * (x * y + w * z);
    m(1, 1) = 1.0 - 2.0 * (x * x + z * z);
    m(1, 2) = 2.0 * (y * z - w * x);
    m(2, 0) = 2.0 * (x * z - w * y);
    m(2, 1) = 2.0 * (y * z + w * x);
    m(2, 2) = 1.0 - 2.0 * (x * x + y * y);
    return m;
}

UnitQuaternion matrix_to_quat(const Eigen::Matrix3d& m) {
    const Eigen::Matrix3d gram = m.transpose() * m;
    const double ortho_err = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (!std::isfinite(ortho_err) || ortho_err > 1e-6) {
        throw ValidationError("rotation matrix: not orthonormal");
    }
    const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                       m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    if (std::abs(det - 1.0) > 1e-6) {
        throw ValidationError("rotation matrix: determinant is not +1");
    }

    // Shepperd's method: branch on the largest diagonal combination.
    const double trace = m(0, 0) + m(1, 1) + m(2, 2);
    double w, x, y, z;
    if (trace > 0.0) {
        const double s = std::sqrt(trace + 1.0) * 2.0;
        w = 0.25 * s;
        x = (m(2, 1) - m(1, 2)) / s;
        y = (m(0, 2) - m(2, 0)) / s;
        z = (m(1, 0) - m(0, 1)) / s;
    } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
        const double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
        w = (m(2, 1) - m(1, 2)) / s;
        x = 0.25 * s;
        y = (m(0, 1) + m(1, 0)) / s;
        z = (m(0, 2) + m(2, 0)) / s;
    } else if (m(1, 1) > m(2, 2)) {
        const double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
        w = (m(0, 2) - m(2, 0)) / s;
        x = (m(0, 1) + m(1, 0)) / s;
        y = 0.25 * s;
        z = (m(1, 2) + m(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
        w = (m(1, 0) - m(0, 1)) / s;
        x = (m(0, 2) + m(2, 0)) / s;
        y = (m(1, 2) + m(2, 1)) / s;
        z = 0.25 * s;
    }
    return {w, x, y, z};
}

UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b, double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw ValidationError("slerp: parameter outside [0, 1]");
    }
    double bw = b.w(), bx = b.x(), by = b.y(), bz = b.z();
    double d = a.dot(b);
    // Shorter arc; a tie (d == 0, rotations half a turn apart) keeps b's
    // canonical sign, which fixes the interpolation axis deterministically.
    if (d < 0.0) {
        d = -d;
        bw = -bw;
        bx = -bx;
        by = -by;
        bz = -bz;
    }
    double ka, kb;
    if (d > 1.0 - 1e-12) {
        // Nearly coincident: linear blend, renormalized by the constructor.
        ka = 1.0 - u;
        kb = u;
    } else {
        const double omega = std::acos(d);
        const double so = std::sin(omega);
        ka = std::sin((1.0 - u) * omega) / so;
        kb = std::sin(u * omega) / so;
    }
    return {ka * a.w() + kb * bw, ka * a.x() + kb * bx, ka * a.y() + kb * by,
            ka * a.z() + kb * bz};
}

Eigen::Vector3d quat_log_angle_axis(const UnitQuaternion& q) {
    const double w = std::abs(q.w());
    const Eigen::Vector3d v = q.w() < 0.0 ? Eigen::Vector3d(-q.vec()) : q.vec();
    const double s = v.norm();  // sin(theta/2)
    const double theta = 2.0 * std::atan2(s, w);
    double k;  // theta / sin(theta/2)
    if (theta < 1e-6) {
        k = (2.0 / w) * (1.0 - s * s / (3.0 * w * w));
    } else {
        k = theta / s;
    }
    return k * v;
}

double angular_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
    return quat_log_angle_axis(b * a.inverse()).norm();
}

}  // namespace vimu
