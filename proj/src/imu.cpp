#include "vimu/imu.hpp"

#include <cmath>

#include "vimu/errors.hpp"

namespace vimu {

namespace {

void require_samples(std::size_t n) {
    if (n < 3) {
        throw ValidationError("track too short: need >= 3 samples, got " + std::to_string(n));
    }
}

}  // namespace

WorldTrack extract_track(const MotionSequence& seq, const Skeleton& sk,
                         const SensorAttachment& att) {
    if (att.joint >= sk.joint_count()) {
        throw ValidationError("joint index " + std::to_string(att.joint) +
                              " not found in skeleton");
    }
    if (!(seq.fps > 0.0) || !std::isfinite(seq.fps)) {
        throw ValidationError("sequence fps must be positive and finite");
    }
    WorldTrack track;
    track.rate = seq.fps;
    track.position.reserve(seq.frames.size());
    track.orientation.reserve(seq.frames.size());
    for (const PoseFrame& f : seq.frames) {
        const auto poses = forward_kinematics(sk, f);
        const JointPose& jp = poses[att.joint];
        track.position.push_back(jp.position + jp.orientation.rotate(att.mount_offset));
        track.orientation.push_back(jp.orientation * att.mount_rotation);
    }
    return track;
}

std::vector<Eigen::Vector3d> linear_accel_global(const WorldTrack& track) {
    const auto& r = track.position;
    const std::size_t n = r.size();
    require_samples(n);
    const double dt = 1.0 / track.rate;
    const double inv_dt2 = 1.0 / (dt * dt);

    // Difference forms of the stencils: exact zeros on constant input and
    // less cancellation than the expanded coefficients.
    const auto central = [&](std::size_t i) {
        return ((r[i + 1] - r[i]) - (r[i] - r[i - 1])) * inv_dt2;
    };
    // One-sided second-order stencil 2 r0 - 5 r1 + 4 r2 - r3.
    const auto one_sided = [&](std::size_t i0, std::ptrdiff_t step) {
        const auto& r0 = r[i0];
        const auto& r1 = r[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i0) + step)];
        const auto& r2 = r[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i0) + 2 * step)];
        const auto& r3 = r[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i0) + 3 * step)];
        return (2.0 * (r0 - r1) - 3.0 * (r1 - r2) + (r2 - r3)) * inv_dt2;
    };

    std::vector<Eigen::Vector3d> a(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        a[i] = central(i);
    }
    if (n >= 4) {
        a[0] = one_sided(0, 1);
        a[n - 1] = one_sided(n - 1, -1);
    } else {
        a[0] = a[1];
        a[2] = a[1];
    }
    return a;
}

std::vector<Eigen::Vector3d> angular_velocity_global(const WorldTrack& track) {
    const auto& q = track.orientation;
    const std::size_t n = q.size();
    require_samples(n);
    const double dt = 1.0 / track.rate;

    std::vector<Eigen::Vector3d> w(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        w[i] = quat_log_angle_axis(q[i + 1] * q[i - 1].inverse()) / (2.0 * dt);
    }
    w[0] = quat_log_angle_axis(q[1] * q[0].inverse()) / dt;
    w[n - 1] = quat_log_angle_axis(q[n - 1] * q[n - 2].inverse()) / dt;
    return w;
}

std::vector<Eigen::Vector3d> to_local_accel(const WorldTrack& track,
                                            const std::vector<Eigen::Vector3d>& a_global,
                                            const GravityModel& g) {
    if (a_global.size() != track.orientation.size()) {
        throw ValidationError("to_local_accel: sample count mismatch");
    }
    std::vector<Eigen::Vector3d> out(a_global.size());
    for (std::size_t i = 0; i < a_global.size(); ++i) {
        out[i] = track.orientation[i].rotate_inverse(a_global[i] - g.g_global);
    }
    return out;
}

std::vector<Eigen::Vector3d> to_local_gyro(const WorldTrack& track,
                                           const std::vector<Eigen::Vector3d>& w_global) {
    if (w_global.size() != track.orientation.size()) {
        throw ValidationError("to_local_gyro: sample count mismatch");
    }
    std::vector<Eigen::Vector3d> out(w_global.size());
    for (std::size_t i = 0; i < w_global.size(); ++i) {
        out[i] = track.orientation[i].rotate_inverse(w_global[i]);
    }
    return out;
}

ImuTrace synthesize(const MotionSequence& seq, const Skeleton& sk, const SensorAttachment& att,
                    const GravityModel& g) {
    const WorldTrack track = extract_track(seq, sk, att);
    ImuTrace trace;
    trace.rate = track.rate;
    trace.accel = to_local_accel(track, linear_accel_global(track), g);
    trace.gyro = to_local_gyro(track, angular_velocity_global(track));
    return trace;
}

}  // namespace vimu
