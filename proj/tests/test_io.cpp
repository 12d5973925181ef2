#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "support/oracles.hpp"
#include "vimu/io.hpp"

using namespace vimu;
using namespace vimu::testing;

namespace {

const char* kMinimalMotion = R"({
  "fps": 30,
  "rotation_format": "axis_angle",
  "skeleton": {
    "names": ["root"],
    "parents": [-1],
    "rest_offsets": [[0, 0, 0]]
  },
  "frames": [
    {"root_t": [1, 2, 3], "rotations": [[0, 0, 0]]},
    {"root_t": [1, 2.5, 3], "rotations": [[0, 0, 1.5707963267948966]]}
  ]
})";

std::string contains_check(const std::exception& e) { return e.what(); }

}  // namespace

TEST_SUITE("io") {

TEST_CASE("format_double round-trips exactly") {
    std::mt19937_64 rng(601);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 1000; ++trial) {
        const double v = gauss(rng) * std::pow(10.0, trial % 17 - 8);
        CHECK(parse_double(format_double(v), "t") == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-1.5) == "-1.5");
}

TEST_CASE("parse_double rejects junk and non-finite values") {
    CHECK_THROWS_AS(parse_double("abc", "x"), ParseError);
    CHECK_THROWS_AS(parse_double("1.0extra", "x"), ParseError);
    CHECK_THROWS_AS(parse_double("", "x"), ParseError);
    CHECK_THROWS_AS(parse_double("nan", "x"), ValidationError);
    CHECK_THROWS_AS(parse_double("inf", "x"), ValidationError);
}

TEST_CASE("parse_motion: minimal document") {
    const auto [sk, seq] = parse_motion(kMinimalMotion);
    CHECK(sk.joint_count() == 1);
    CHECK(sk.joint_names()[0] == "root");
    CHECK(seq.fps == 30.0);
    REQUIRE(seq.frames.size() == 2);
    CHECK((seq.frames[0].root_translation - Eigen::Vector3d(1, 2, 3)).norm() == 0.0);
    CHECK(seq.frames[0].joint_rotation[0].w() == 1.0);
    // pi/2 about z arrives as the expected quaternion.
    const UnitQuaternion expect = UnitQuaternion::from_axis_angle({0, 0, 1}, M_PI / 2.0);
    CHECK(std::abs(seq.frames[1].joint_rotation[0].dot(expect)) ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parse_motion: fps defaults to 60 and must be positive") {
    const std::string no_fps = R"({"rotation_format": "quaternion_wxyz",
      "skeleton": {"names": ["r"], "parents": [-1], "rest_offsets": [[0,0,0]]},
      "frames": []})";
    CHECK(parse_motion(no_fps).second.fps == 60.0);

    const std::string bad_fps = R"({"fps": -5, "rotation_format": "quaternion_wxyz",
      "skeleton": {"names": ["r"], "parents": [-1], "rest_offsets": [[0,0,0]]},
      "frames": []})";
    CHECK_THROWS_WITH_AS(parse_motion(bad_fps), "fps: must be > 0, got -5", ValidationError);
}

TEST_CASE("parse_motion: schema violations name the field") {
    CHECK_THROWS_AS(parse_motion("not json at all"), ParseError);
    CHECK_THROWS_AS(parse_motion("[1, 2]"), ParseError);

    try {
        parse_motion(R"({"fps": 60, "skeleton": {"names": [], "parents": [],
          "rest_offsets": []}, "frames": []})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(contains_check(e).find("rotation_format") != std::string::npos);
    }

    const std::string bad_arity = R"({"rotation_format": "quaternion_wxyz",
      "skeleton": {"names": ["r"], "parents": [-1], "rest_offsets": [[0,0,0]]},
      "frames": [{"root_t": [0,0,0], "rotations": [[0, 0, 1]]}]})";
    CHECK_THROWS_AS(parse_motion(bad_arity), ParseError);
}

TEST_CASE("parse_motion: hierarchy errors are distinct") {
    const std::string cycle = R"({"rotation_format": "axis_angle",
      "skeleton": {"names": ["a", "b", "c"], "parents": [-1, 2, 1],
        "rest_offsets": [[0,0,0],[0,1,0],[0,1,0]]},
      "frames": []})";
    try {
        parse_motion(cycle);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(contains_check(e).find("hierarchy") != std::string::npos);
    }
}

TEST_CASE("parse_motion: frame joint-count mismatch is located") {
    const std::string doc = R"({"rotation_format": "axis_angle",
      "skeleton": {"names": ["a", "b"], "parents": [-1, 0],
        "rest_offsets": [[0,0,0],[0,1,0]]},
      "frames": [{"root_t": [0,0,0], "rotations": [[0,0,0],[0,0,0]]},
                 {"root_t": [0,0,0], "rotations": [[0,0,0]]}]})";
    try {
        parse_motion(doc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(contains_check(e).find("frames[1]") != std::string::npos);
    }
}

TEST_CASE("motion document round trip is lossless") {
    std::mt19937_64 rng(602);
    const Skeleton sk = test_figure();
    MotionSequence seq = smooth_motion(60.0, 7);
    for (auto& f : seq.frames) {
        f.root_translation += random_vec3(rng, 0.01);
    }
    const std::string text = write_motion(sk, seq);
    const auto [sk2, seq2] = parse_motion(text);
    CHECK(sk2.joint_names() == sk.joint_names());
    CHECK(sk2.parents() == sk.parents());
    for (std::size_t j = 0; j < sk.joint_count(); ++j) {
        CHECK((sk2.rest_offset(j) - sk.rest_offset(j)).norm() == 0.0);
    }
    CHECK(seq2.fps == seq.fps);
    REQUIRE(seq2.frames.size() == seq.frames.size());
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        CHECK((seq2.frames[i].root_translation - seq.frames[i].root_translation).norm() ==
              0.0);
        for (std::size_t j = 0; j < sk.joint_count(); ++j) {
            const auto& a = seq.frames[i].joint_rotation[j];
            const auto& b = seq2.frames[i].joint_rotation[j];
            CHECK(a.w() == b.w());
            CHECK(a.x() == b.x());
            CHECK(a.y() == b.y());
            CHECK(a.z() == b.z());
        }
    }
    // Writers are deterministic byte-for-byte.
    CHECK(write_motion(sk, seq) == text);
}

TEST_CASE("imu csv round trip is lossless and deterministic") {
    std::mt19937_64 rng(603);
    const ImuTrace trace = random_trace(rng, 123.5, 64);
    const std::string text = write_imu_csv(trace);
    const ImuTrace back = read_imu_csv(text);
    CHECK(back.rate == trace.rate);
    REQUIRE(back.accel.size() == trace.accel.size());
    for (std::size_t i = 0; i < trace.accel.size(); ++i) {
        CHECK(back.accel[i] == trace.accel[i]);
        CHECK(back.gyro[i] == trace.gyro[i]);
    }
    CHECK(write_imu_csv(back) == text);
}

TEST_CASE("imu csv rejects malformed input") {
    CHECK_THROWS_WITH_AS(read_imu_csv("# rate_hz=60\nt,ax,ay,az,gx,gy,gz\n"),
                         "empty trace: csv has no data rows", ValidationError);
    // Swapped columns are named.
    try {
        read_imu_csv("# rate_hz=60\nt,ax,az,ay,gx,gy,gz\n0,1,2,3,4,5,6\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = contains_check(e);
        CHECK(msg.find("column 2") != std::string::npos);
        CHECK(msg.find("'ay'") != std::string::npos);
    }
    CHECK_THROWS_AS(read_imu_csv("t,ax,ay,az,gx,gy,gz\n0,1,2,3,4,5,6\n"), ParseError);
    CHECK_THROWS_AS(
        read_imu_csv("# rate_hz=60\nt,ax,ay,az,gx,gy,gz\n0,1,2,3,4,5\n"), ParseError);
    CHECK_THROWS_AS(
        read_imu_csv("# rate_hz=60\nt,ax,ay,az,gx,gy,gz\n0,1,nan,3,4,5,6\n"),
        ValidationError);
    CHECK_THROWS_AS(
        read_imu_csv("# rate_hz=60\nt,ax,ay,az,gx,gy,gz\n0,1,oops,3,4,5,6\n"), ParseError);
    CHECK_THROWS_AS(
        read_imu_csv("# rate_hz=0\nt,ax,ay,az,gx,gy,gz\n0,1,2,3,4,5,6\n"), ValidationError);
}

TEST_CASE("track csv round trip, with and without the rate comment") {
    std::mt19937_64 rng(604);
    WorldTrack track;
    track.rate = 240.0;
    for (int i = 0; i < 12; ++i) {
        track.position.push_back(random_vec3(rng));
        track.orientation.push_back(random_unit_quaternion(rng));
    }
    const std::string text = write_track_csv(track);
    const WorldTrack back = parse_track_csv(text);
    CHECK(back.rate == track.rate);
    for (std::size_t i = 0; i < track.position.size(); ++i) {
        CHECK(back.position[i] == track.position[i]);
        CHECK(back.orientation[i].w() == track.orientation[i].w());
        CHECK(back.orientation[i].x() == track.orientation[i].x());
    }

    // Without the comment the rate comes from the t column.
    std::string no_comment = "t,px,py,pz,qw,qx,qy,qz\n";
    for (int i = 0; i < 4; ++i) {
        no_comment += format_double(i * 0.1) + ",0,0,0,1,0,0,0\n";
    }
    CHECK(parse_track_csv(no_comment).rate == doctest::Approx(10.0).epsilon(1e-12));

    // Non-uniform timestamps are rejected.
    CHECK_THROWS_AS(
        parse_track_csv("t,px,py,pz,qw,qx,qy,qz\n0,0,0,0,1,0,0,0\n0.1,0,0,0,1,0,0,0\n"
                        "0.35,0,0,0,1,0,0,0\n"),
        ValidationError);
    // Non-unit quaternions are rejected.
    CHECK_THROWS_AS(
        parse_track_csv("# rate_hz=10\nt,px,py,pz,qw,qx,qy,qz\n0,0,0,0,0.5,0,0,0\n"),
        ValidationError);
}

TEST_CASE("embeddings csv round trip and header validation") {
    std::mt19937_64 rng(605);
    const EmbeddingBatch batch(random_matrix(rng, 7, 5));
    const std::string text = write_embeddings_csv(batch);
    const EmbeddingBatch back = read_embeddings_csv(text);
    CHECK(back.data() == batch.data());

    CHECK_THROWS_AS(read_embeddings_csv("e0,e2\n1,2\n"), ParseError);
    CHECK_THROWS_AS(read_embeddings_csv("e0,e1\n"), ValidationError);
    CHECK_THROWS_AS(read_embeddings_csv("e0,e1\n1\n"), ParseError);
}

TEST_CASE("labels csv") {
    CHECK(read_labels_csv("label\n0\n2\n1\n") == std::vector<int>{0, 2, 1});
    CHECK_THROWS_AS(read_labels_csv("labels\n0\n"), ParseError);
    CHECK_THROWS_AS(read_labels_csv("label\n1.5\n"), ParseError);
    CHECK_THROWS_AS(read_labels_csv("label\n"), ValidationError);
}

TEST_CASE("stats json round trip") {
    ChannelStats st;
    st.count = 480;
    for (std::size_t c = 0; c < 6; ++c) {
        st.mean[c] = 0.1 * static_cast<double>(c) - 0.3;
        st.stddev[c] = 1.0 / (static_cast<double>(c) + 3.0);
    }
    const std::string text = write_stats_json(st);
    const ChannelStats back = read_stats_json(text);
    CHECK(back.count == st.count);
    for (std::size_t c = 0; c < 6; ++c) {
        CHECK(back.mean[c] == st.mean[c]);
        CHECK(back.stddev[c] == st.stddev[c]);
    }
    CHECK(write_stats_json(back) == text);

    CHECK_THROWS_AS(read_stats_json("{}"), ParseError);
    CHECK_THROWS_AS(read_stats_json("not json"), ParseError);
    const std::string neg = R"({"channels": {"ax": {"mean": 0, "std": -1},
      "ay": {"mean": 0, "std": 1}, "az": {"mean": 0, "std": 1},
      "gx": {"mean": 0, "std": 1}, "gy": {"mean": 0, "std": 1},
      "gz": {"mean": 0, "std": 1}}, "count": 10})";
    CHECK_THROWS_AS(read_stats_json(neg), ValidationError);
    const std::string low_count = R"({"channels": {"ax": {"mean": 0, "std": 1},
      "ay": {"mean": 0, "std": 1}, "az": {"mean": 0, "std": 1},
      "gx": {"mean": 0, "std": 1}, "gy": {"mean": 0, "std": 1},
      "gz": {"mean": 0, "std": 1}}, "count": 1})";
    CHECK_THROWS_AS(read_stats_json(low_count), ValidationError);
}

TEST_CASE("csv readers accept crlf line endings") {
    const ImuTrace t =
        read_imu_csv("# rate_hz=60\r\nt,ax,ay,az,gx,gy,gz\r\n0,1,2,3,4,5,6\r\n");
    CHECK(t.accel[0] == Eigen::Vector3d(1, 2, 3));
}

}  // TEST_SUITE
