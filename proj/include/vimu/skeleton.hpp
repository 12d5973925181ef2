#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vimu/rotation.hpp"

namespace vimu {

/// Joint hierarchy with fixed rest offsets. Bone lengths are constant by
/// construction: offsets live here and nowhere in the per-frame data.
///
/// Joints are topologically sorted (parent[i] < i) with exactly one root
/// (parent == -1) at index 0. Y is the up/gravity axis throughout.
class Skeleton {
public:
    /// Validates tree structure, matching sizes, and unique joint names.
    Skeleton(std::vector<std::string> names, std::vector<int> parents,
             std::vector<Eigen::Vector3d> rest_offsets);

    std::size_t joint_count() const { return names_.size(); }
    const std::vector<std::string>& joint_names() const { return names_; }
    int parent(std::size_t i) const { return parents_[i]; }
    const std::vector<int>& parents() const { return parents_; }
    const Eigen::Vector3d& rest_offset(std::size_t i) const { return offsets_[i]; }
    const std::vector<Eigen::Vector3d>& rest_offsets() const { return offsets_; }

    std::optional<std::size_t> find_joint(std::string_view name) const;

    /// find_joint that throws ValidationError naming the missing joint.
    std::size_t joint_index(std::string_view name) const;

private:
    std::vector<std::string> names_;
    std::vector<int> parents_;
    std::vector<Eigen::Vector3d> offsets_;
};

/// One skeletal pose: world root translation plus per-joint local rotations
/// (each relative to the parent frame; the root's is relative to world).
/// SMPL-format documents carry 22 body joints, optionally followed by 30
/// joints per hand; the layout is owned by the skeleton, not the frame.
struct PoseFrame {
    Eigen::Vector3d root_translation{0.0, 0.0, 0.0};
    std::vector<UnitQuaternion> joint_rotation;
};

/// Uniformly sampled pose frames; the timestamp of frame i is i / fps.
struct MotionSequence {
    double fps = 0.0;
    std::vector<PoseFrame> frames;
};

/// World-frame transform of one joint.
struct JointPose {
    Eigen::Vector3d position;
    UnitQuaternion orientation;
};

/// World position and orientation of every joint for one frame.
/// Throws ValidationError on joint-count mismatch.
std::vector<JointPose> forward_kinematics(const Skeleton& sk, const PoseFrame& frame);

/// Vertical extent (max y - min y) of the identity pose at zero translation.
double rest_height(const Skeleton& sk);

/// Uniformly rescale all rest offsets so rest_height(result) == target.
/// Throws ValidationError on a zero-height skeleton.
Skeleton normalize_height(const Skeleton& sk, double target = 1.7);

/// Apply one rigid transform, computed from frame 0, to the whole sequence
/// so that the feet midpoint lands at the origin and the root's heading
/// (rotation about the vertical axis) is zeroed. Only yaw is removed:
/// tilting relative to gravity would change accelerometer physics.
/// Relative motion between frames is untouched.
MotionSequence rebase_sequence(const MotionSequence& seq, const Skeleton& sk,
                               std::size_t left_foot, std::size_t right_foot);

}  // namespace vimu
