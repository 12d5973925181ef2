#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "vimu/imu.hpp"
#include "vimu/skeleton.hpp"

using namespace vimu;
using namespace vimu::testing;

TEST_SUITE("skeleton") {

TEST_CASE("construction validates the hierarchy") {
    CHECK_THROWS_AS(Skeleton({}, {}, {}), ValidationError);
    CHECK_THROWS_AS(Skeleton({"a", "b"}, {-1}, {{0, 0, 0}, {0, 1, 0}}), ValidationError);
    // Root must come first.
    CHECK_THROWS_AS(Skeleton({"a", "b"}, {1, -1}, {{0, 0, 0}, {0, 1, 0}}), ValidationError);
    // Parents must precede children (this also rules out cycles).
    CHECK_THROWS_AS(Skeleton({"a", "b", "c"}, {-1, 2, 1},
                             {{0, 0, 0}, {0, 1, 0}, {0, 1, 0}}),
                    ValidationError);
    CHECK_THROWS_AS(Skeleton({"a", "b", "c"}, {-1, 0, -1},
                             {{0, 0, 0}, {0, 1, 0}, {0, 1, 0}}),
                    ValidationError);
    CHECK_THROWS_AS(Skeleton({"a", "a"}, {-1, 0}, {{0, 0, 0}, {0, 1, 0}}), ValidationError);

    const Skeleton sk({"root", "child"}, {-1, 0}, {{0, 0, 0}, {0, 1, 0}});
    CHECK(sk.joint_count() == 2);
    CHECK(sk.find_joint("child") == 1);
    CHECK(!sk.find_joint("missing").has_value());
    CHECK_THROWS_WITH_AS(sk.joint_index("wristband"),
                         "joint 'wristband' not found in skeleton", ValidationError);
}

TEST_CASE("fk: single joint carries the root transform") {
    const Skeleton sk({"root"}, {-1}, {{0, 0, 0}});
    PoseFrame f;
    f.root_translation = {1, 2, 3};
    f.joint_rotation = {UnitQuaternion{}};
    const auto poses = forward_kinematics(sk, f);
    CHECK((poses[0].position - Eigen::Vector3d(1, 2, 3)).norm() == 0.0);
    CHECK(poses[0].orientation.w() == 1.0);
}

TEST_CASE("fk: rotated root swings the child offset") {
    const Skeleton sk({"root", "tip"}, {-1, 0}, {{0, 0, 0}, {0, 1, 0}});
    PoseFrame f;
    f.joint_rotation = {UnitQuaternion::from_axis_angle({0, 0, 1}, M_PI / 2.0),
                        UnitQuaternion{}};
    const auto poses = forward_kinematics(sk, f);
    // Rodrigues: a quarter turn about z maps (0,1,0) to (-1,0,0).
    CHECK((poses[1].position - Eigen::Vector3d(-1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("fk: world orientations compose parent-first") {
    const Skeleton sk({"a", "b", "c"}, {-1, 0, 1}, {{0, 0, 0}, {0, 1, 0}, {0, 1, 0}});
    std::mt19937_64 rng(201);
    PoseFrame f;
    f.joint_rotation = {random_unit_quaternion(rng), random_unit_quaternion(rng),
                        random_unit_quaternion(rng)};
    const auto poses = forward_kinematics(sk, f);
    const UnitQuaternion expect =
        f.joint_rotation[0] * f.joint_rotation[1] * f.joint_rotation[2];
    CHECK(std::abs(poses[2].orientation.dot(expect)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fk: joint count mismatch is rejected") {
    const Skeleton sk({"root", "tip"}, {-1, 0}, {{0, 0, 0}, {0, 1, 0}});
    PoseFrame f;
    f.joint_rotation = {UnitQuaternion{}};
    CHECK_THROWS_AS(forward_kinematics(sk, f), ValidationError);
}

TEST_CASE("fk: bones stay rigid on random frames") {
    std::mt19937_64 rng(202);
    const Skeleton sk = test_figure();
    for (int trial = 0; trial < 200; ++trial) {
        PoseFrame f;
        f.root_translation = random_vec3(rng, 2.0);
        for (std::size_t j = 0; j < sk.joint_count(); ++j) {
            f.joint_rotation.push_back(random_unit_quaternion(rng));
        }
        const auto poses = forward_kinematics(sk, f);
        for (std::size_t j = 1; j < sk.joint_count(); ++j) {
            const auto& parent = poses[static_cast<std::size_t>(sk.parent(j))];
            const double len = (poses[j].position - parent.position).norm();
            CHECK(std::abs(len - sk.rest_offset(j).norm()) < 1e-12);
        }
    }
}

TEST_CASE("rest_height on the pinned chains") {
    CHECK(rest_height(Skeleton({"a"}, {-1}, {{0, 0, 0}})) == 0.0);
    CHECK(rest_height(Skeleton({"a", "b"}, {-1, 0}, {{0, 0, 0}, {0, 1, 0}})) == 1.0);
    const Skeleton stacked({"a", "b", "c"}, {-1, 0, 1},
                           {{0, 0, 0}, {0, 0.9, 0}, {0, 0.8, 0}});
    CHECK(rest_height(stacked) == doctest::Approx(1.7).epsilon(1e-15));
}

TEST_CASE("normalize_height rescales offsets uniformly") {
    const Skeleton tall({"a", "b", "c"}, {-1, 0, 1},
                        {{0, 0, 0}, {0, 2.0, 0}, {0.5, 1.4, 0.2}});
    const Skeleton norm = normalize_height(tall);
    CHECK(rest_height(norm) == doctest::Approx(1.7).epsilon(1e-9));
    CHECK(rest_height(normalize_height(tall, 3.4)) == doctest::Approx(3.4).epsilon(1e-9));
    // 3.4 m chain halves exactly.
    const Skeleton twice({"a", "b"}, {-1, 0}, {{0, 0, 0}, {0, 3.4, 0}});
    CHECK((normalize_height(twice).rest_offset(1) - Eigen::Vector3d(0, 1.7, 0)).norm() <
          1e-15);

    // Already at target: unchanged; and idempotent at the target height.
    const Skeleton at_target({"a", "b"}, {-1, 0}, {{0, 0, 0}, {0, 1.7, 0}});
    CHECK((normalize_height(at_target).rest_offset(1) - at_target.rest_offset(1)).norm() <
          1e-12);
    const Skeleton again = normalize_height(normalize_height(tall));
    for (std::size_t j = 0; j < norm.joint_count(); ++j) {
        CHECK((again.rest_offset(j) - norm.rest_offset(j)).norm() < 1e-12);
    }
}

TEST_CASE("normalize_height rejects degenerate skeletons") {
    const Skeleton flat({"a", "b"}, {-1, 0}, {{0, 0, 0}, {1, 0, 0}});
    CHECK_THROWS_AS(normalize_height(flat), ValidationError);
}

TEST_CASE("normalize_height holds over random skeletons") {
    std::mt19937_64 rng(203);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> names = {"j0"};
        std::vector<int> parents = {-1};
        std::vector<Eigen::Vector3d> offsets = {{0, 0, 0}};
        std::uniform_int_distribution<int> parent_pick(0, 0);
        for (int j = 1; j < 8; ++j) {
            names.push_back("j" + std::to_string(j));
            parents.push_back(std::uniform_int_distribution<int>(0, j - 1)(rng));
            offsets.push_back(random_vec3(rng, 0.4));
        }
        const Skeleton sk(names, parents, offsets);
        if (rest_height(sk) < 1e-6) continue;
        CHECK(rest_height(normalize_height(sk)) == doctest::Approx(1.7).epsilon(1e-9));
    }
}

TEST_CASE("rebase: identity when already at the origin with zero heading") {
    const Skeleton sk = test_figure();
    MotionSequence seq = smooth_motion(60.0, 8);
    // Force frame 0 to put the feet midpoint at the origin with no yaw.
    seq.frames[0].root_translation = {0.0, 0.9, 0.0};
    seq.frames[0].joint_rotation[0] = UnitQuaternion{};
    const MotionSequence out = rebase_sequence(seq, sk, 1, 2);
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        CHECK((out.frames[i].root_translation - seq.frames[i].root_translation).norm() <
              1e-12);
        CHECK(std::abs(out.frames[i].joint_rotation[0].dot(seq.frames[i].joint_rotation[0])) ==
              doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("rebase: constant offset is subtracted everywhere") {
    const Skeleton sk = test_figure();
    MotionSequence seq;
    seq.fps = 60.0;
    for (int i = 0; i < 5; ++i) {
        PoseFrame f;
        f.root_translation = Eigen::Vector3d(5, 0, 5) + Eigen::Vector3d(0.01 * i, 0.9, 0);
        f.joint_rotation.assign(sk.joint_count(), UnitQuaternion{});
        seq.frames.push_back(f);
    }
    const MotionSequence out = rebase_sequence(seq, sk, 1, 2);
    // Frame 0 feet midpoint sits at (5, 0, 5), so that is the shift.
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        const Eigen::Vector3d expect =
            seq.frames[i].root_translation - Eigen::Vector3d(5, 0, 5);
        CHECK((out.frames[i].root_translation - expect).norm() < 1e-12);
    }
}

TEST_CASE("rebase: feet midpoint of frame 0 lands at the origin, heading zeroed") {
    const Skeleton sk = test_figure();
    MotionSequence seq = smooth_motion(60.0, 10);
    // Bake in an arbitrary yaw and offset.
    const UnitQuaternion yaw = UnitQuaternion::from_axis_angle({0, 1, 0}, 1.3);
    for (auto& f : seq.frames) {
        f.root_translation = yaw.rotate(f.root_translation) + Eigen::Vector3d(2, 0, -1);
        f.joint_rotation[0] = yaw * f.joint_rotation[0];
    }
    const MotionSequence out = rebase_sequence(seq, sk, 1, 2);
    const auto poses = forward_kinematics(sk, out.frames[0]);
    const Eigen::Vector3d mid = 0.5 * (poses[1].position + poses[2].position);
    CHECK(mid.norm() < 1e-12);
    // Zero heading: the root orientation has no yaw twist left.
    const UnitQuaternion q0 = out.frames[0].joint_rotation[0];
    CHECK(std::abs(q0.y()) < 1e-12);
}

TEST_CASE("rebase: synthesized traces are unchanged") {
    const Skeleton sk = test_figure();
    MotionSequence seq = smooth_motion(240.0, 121);
    const UnitQuaternion yaw = UnitQuaternion::from_axis_angle({0, 1, 0}, -0.7);
    for (auto& f : seq.frames) {
        f.root_translation = yaw.rotate(f.root_translation) + Eigen::Vector3d(3, 0, 4);
        f.joint_rotation[0] = yaw * f.joint_rotation[0];
    }
    const MotionSequence rebased = rebase_sequence(seq, sk, 1, 2);
    const SensorAttachment att{4, UnitQuaternion::from_axis_angle({1, 0, 0}, 0.3),
                               {0.0, 0.02, 0.0}};
    const ImuTrace before = synthesize(seq, sk, att);
    const ImuTrace after = synthesize(rebased, sk, att);
    CHECK(max_abs_diff(before.accel, after.accel) < 1e-9);
    CHECK(max_abs_diff(before.gyro, after.gyro) < 1e-9);
}

TEST_CASE("rebase: rejects empty sequences and bad feet") {
    const Skeleton sk = test_figure();
    MotionSequence empty;
    empty.fps = 60.0;
    CHECK_THROWS_AS(rebase_sequence(empty, sk, 1, 2), ValidationError);
    CHECK_THROWS_AS(rebase_sequence(smooth_motion(60.0, 3), sk, 1, 99), ValidationError);
}

}  // TEST_SUITE
