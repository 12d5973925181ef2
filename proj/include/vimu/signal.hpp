#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "vimu/imu.hpp"

namespace vimu {

/// Channel order used everywhere a trace is flattened to 6 channels.
inline constexpr std::array<const char*, 6> kChannelNames = {"ax", "ay", "az",
                                                             "gx", "gy", "gz"};

/// Per-channel mean and population (1/N) standard deviation of a trace.
struct ChannelStats {
    std::array<double, 6> mean{};
    std::array<double, 6> stddev{};
    std::size_t count = 0;
};

/// Fixed-length contiguous slice of a trace: rows follow kChannelNames,
/// one column per sample. Labels, when present, are per-sample class ids.
struct ImuWindow {
    std::size_t start = 0;
    Eigen::Matrix<double, 6, Eigen::Dynamic> data;
    std::vector<int> labels;
};

/// Resample to a uniform grid spanning [0, duration] at the target rate.
/// Positions are linearly interpolated, orientations slerped; samples that
/// land exactly on source samples are copied, so resampling at the source
/// rate is the identity.
WorldTrack resample_track(const WorldTrack& track, double target_hz);

/// As resample_track, with linear interpolation on all 6 channels.
ImuTrace resample_trace(const ImuTrace& trace, double target_hz);

/// Two-pass mean and population standard deviation per channel.
/// Requires >= 2 samples.
ChannelStats compute_stats(const ImuTrace& trace);

/// Per-channel affine map so the result's statistics match `ref`:
/// y = (x - mean_syn) / std_syn * std_ref + mean_ref. Channels with
/// std_syn < 1e-12 become the constant mean_ref. Idempotent.
ImuTrace calibrate(const ImuTrace& synthetic, const ChannelStats& ref);

/// Windows of `length` samples starting at 0, stride, 2*stride, ... while
/// they fit; a trailing partial window is dropped. Throws if length
/// exceeds the trace.
std::vector<ImuWindow> window(const ImuTrace& trace, std::size_t length, std::size_t stride);

/// As above, slicing per-sample labels (size must match the trace).
std::vector<ImuWindow> window(const ImuTrace& trace, std::size_t length, std::size_t stride,
                              const std::vector<int>& labels);

}  // namespace vimu
