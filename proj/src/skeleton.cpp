#include "vimu/skeleton.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include "vimu/errors.hpp"

namespace vimu {

Skeleton::Skeleton(std::vector<std::string> names, std::vector<int> parents,
                   std::vector<Eigen::Vector3d> rest_offsets)
    : names_(std::move(names)), parents_(std::move(parents)), offsets_(std::move(rest_offsets)) {
    const std::size_t n = names_.size();
    if (n == 0) {
        throw ValidationError("skeleton: no joints");
    }
    if (parents_.size() != n || offsets_.size() != n) {
        throw ValidationError("skeleton: names, parents, and rest_offsets differ in length");
    }
    if (parents_[0] != -1) {
        throw ValidationError("hierarchy: joint 0 must be the root (parent -1)");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (parents_[i] == -1) {
            throw ValidationError("hierarchy: multiple roots (joint " + std::to_string(i) + ")");
        }
        if (parents_[i] < 0 || static_cast<std::size_t>(parents_[i]) >= i) {
            throw ValidationError("hierarchy: parent of joint " + std::to_string(i) +
                                  " must precede it (got " + std::to_string(parents_[i]) + ")");
        }
    }
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen.insert(names_[i]).second) {
            throw ValidationError("skeleton: duplicate joint name '" + names_[i] + "'");
        }
        if (!offsets_[i].allFinite()) {
            throw ValidationError("non-finite: rest_offset of joint " + std::to_string(i));
        }
    }
}

std::optional<std::size_t> Skeleton::find_joint(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t Skeleton::joint_index(std::string_view name) const {
    if (auto i = find_joint(name)) return *i;
    throw ValidationError("joint '" + std::string(name) + "' not found in skeleton");
}

std::vector<JointPose> forward_kinematics(const Skeleton& sk, const PoseFrame& frame) {
    const std::size_t n = sk.joint_count();
    if (frame.joint_rotation.size() != n) {
        throw ValidationError("frame has " + std::to_string(frame.joint_rotation.size()) +
                              " rotations, skeleton has " + std::to_string(n) + " joints");
    }
    std::vector<JointPose> out(n);
    out[0].position = frame.root_translation;
    out[0].orientation = frame.joint_rotation[0];
    for (std::size_t i = 1; i < n; ++i) {
        const JointPose& par = out[static_cast<std::size_t>(sk.parent(i))];
        out[i].position = par.position + par.orientation.rotate(sk.rest_offset(i));
        out[i].orientation = par.orientation * frame.joint_rotation[i];
    }
    return out;
}

double rest_height(const Skeleton& sk) {
    PoseFrame rest;
    rest.joint_rotation.assign(sk.joint_count(), UnitQuaternion{});
    const auto poses = forward_kinematics(sk, rest);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : poses) {
        lo = std::min(lo, p.position.y());
        hi = std::max(hi, p.position.y());
    }
    return hi - lo;
}

Skeleton normalize_height(const Skeleton& sk, double target) {
    const double h = rest_height(sk);
    if (!(h > 0.0)) {
        throw ValidationError("skeleton: rest height is zero, cannot normalize");
    }
    if (!(target > 0.0) || !std::isfinite(target)) {
        throw ValidationError("normalize_height: target must be a positive finite height");
    }
    const double scale = target / h;
    std::vector<Eigen::Vector3d> offsets = sk.rest_offsets();
    for (auto& o : offsets) o *= scale;
    return {sk.joint_names(), sk.parents(), std::move(offsets)};
}

namespace {

// Rotation about +Y contained in q (the twist of the swing-twist split).
// Identity when q has no yaw component to speak of, e.g. upside down poses.
UnitQuaternion yaw_twist(const UnitQuaternion& q) {
    const double n = std::hypot(q.w(), q.y());
    if (n < 1e-12) return {};
    return {q.w() / n, 0.0, q.y() / n, 0.0};
}

}  // namespace

MotionSequence rebase_sequence(const MotionSequence& seq, const Skeleton& sk,
                               std::size_t left_foot, std::size_t right_foot) {
    if (seq.frames.empty()) {
        throw ValidationError("rebase: empty sequence");
    }
    if (left_foot >= sk.joint_count() || right_foot >= sk.joint_count()) {
        throw ValidationError("rebase: foot joint index out of range");
    }
    const auto poses = forward_kinematics(sk, seq.frames.front());
    const Eigen::Vector3d feet_mid =
        0.5 * (poses[left_foot].position + poses[right_foot].position);
    const UnitQuaternion fix = yaw_twist(seq.frames.front().joint_rotation[0]).inverse();

    MotionSequence out;
    out.fps = seq.fps;
    out.frames.reserve(seq.frames.size());
    for (const PoseFrame& f : seq.frames) {
        PoseFrame g = f;
        g.root_translation = fix.rotate(f.root_translation - feet_mid);
        g.joint_rotation[0] = fix * f.joint_rotation[0];
        out.frames.push_back(std::move(g));
    }
    return out;
}

}  // namespace vimu
