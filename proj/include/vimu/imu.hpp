#pragma once

#include <vector>

#include <Eigen/Core>

#include "vimu/rotation.hpp"
#include "vimu/skeleton.hpp"

namespace vimu {

/// Rigid mounting of a virtual sensor on one joint: the sensor frame is
/// mount_rotation relative to the joint frame, displaced by mount_offset
/// (expressed in the joint frame).
struct SensorAttachment {
    std::size_t joint = 0;
    UnitQuaternion mount_rotation;
    Eigen::Vector3d mount_offset{0.0, 0.0, 0.0};
};

/// World trajectory of one sensor: uniformly sampled positions (meters)
/// and local-to-world orientations.
struct WorldTrack {
    double rate = 0.0;  // Hz
    std::vector<Eigen::Vector3d> position;
    std::vector<UnitQuaternion> orientation;
};

struct GravityModel {
    Eigen::Vector3d g_global{0.0, -9.8, 0.0};  // m/s^2, Y up
};

/// Noise-free 6-channel sensor trace: accelerometer (specific force,
/// m/s^2) and gyroscope (rad/s), both in the sensor's own frame.
struct ImuTrace {
    double rate = 0.0;  // Hz
    std::vector<Eigen::Vector3d> accel;
    std::vector<Eigen::Vector3d> gyro;
};

/// Compose forward kinematics with the mounting transform, one sample per
/// frame at the sequence rate.
WorldTrack extract_track(const MotionSequence& seq, const Skeleton& sk,
                         const SensorAttachment& att);

/// Second time derivative of position, world frame.
///
/// Interior samples use central second differences; endpoints use the
/// second-order one-sided stencil over the four nearest samples (with
/// exactly 3 samples, the single quadratic fit's constant curvature).
/// Requires >= 3 samples.
std::vector<Eigen::Vector3d> linear_accel_global(const WorldTrack& track);

/// Angular velocity in the world frame via the relative-rotation logarithm:
/// omega(t_i) = log(q_{i+1} * q_{i-1}^-1) / (2 dt), one-sided at the ends.
/// Exact for constant-rate rotation. Requires >= 3 samples.
std::vector<Eigen::Vector3d> angular_velocity_global(const WorldTrack& track);

/// Specific force in the sensor frame: R^T(t) * (a_global(t) - g_global).
/// A stationary upright sensor reads +|g| along its own up axis.
std::vector<Eigen::Vector3d> to_local_accel(const WorldTrack& track,
                                            const std::vector<Eigen::Vector3d>& a_global,
                                            const GravityModel& g);

/// Body-frame angular rate: R^T(t) * omega_global(t).
std::vector<Eigen::Vector3d> to_local_gyro(const WorldTrack& track,
                                           const std::vector<Eigen::Vector3d>& w_global);

/// Full pipeline: extract_track, differentiate, transform to the sensor
/// frame. Deterministic; output rate equals the sequence rate.
ImuTrace synthesize(const MotionSequence& seq, const Skeleton& sk, const SensorAttachment& att,
                    const GravityModel& g = {});

}  // namespace vimu
