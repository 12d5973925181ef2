#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vimu/imu.hpp"
#include "vimu/losses.hpp"
#include "vimu/signal.hpp"
#include "vimu/skeleton.hpp"

namespace vimu {

/// Shortest decimal that round-trips the exact double; '.' separator, no
/// locale. All writers in this module go through it, so identical values
/// always produce identical bytes.
std::string format_double(double v);

/// Strict double parse: whole field must be consumed and the value finite.
double parse_double(std::string_view field, const std::string& context);

/// Motion document: JSON tree with fps (optional, default 60), a
/// rotation_format of "axis_angle" or "quaternion_wxyz", the skeleton
/// (names/parents/rest_offsets), and per-frame root_t + rotations.
/// Axis-angle rotations are converted to unit quaternions on ingestion.
std::pair<Skeleton, MotionSequence> parse_motion(std::string_view text);

/// Canonical motion document (quaternion_wxyz rotations).
std::string write_motion(const Skeleton& sk, const MotionSequence& seq);

/// World-track CSV: header t,px,py,pz,qw,qx,qy,qz. The writer emits a
/// "# rate_hz=" comment; the reader uses it, or infers the rate from the
/// uniformly spaced t column when absent.
WorldTrack parse_track_csv(std::string_view text);
std::string write_track_csv(const WorldTrack& track);

/// IMU trace CSV: "# rate_hz=" comment plus header t,ax,ay,az,gx,gy,gz.
ImuTrace read_imu_csv(std::string_view text);
std::string write_imu_csv(const ImuTrace& trace);

/// Plain matrix CSV with header e0,...,e{D-1}, one row per sample.
Eigen::MatrixXd read_matrix_csv(std::string_view text);
std::string write_matrix_csv(const Eigen::MatrixXd& m);

EmbeddingBatch read_embeddings_csv(std::string_view text,
                                   EmbeddingRole role = EmbeddingRole::Query);
std::string write_embeddings_csv(const EmbeddingBatch& batch);

/// Per-sample integer labels: header "label", one id per row.
std::vector<int> read_labels_csv(std::string_view text);

/// Channel statistics JSON: per-channel mean/std plus the sample count.
ChannelStats read_stats_json(std::string_view text);
std::string write_stats_json(const ChannelStats& stats);

}  // namespace vimu
