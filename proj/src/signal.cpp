#include "vimu/signal.hpp"

#include <cmath>

#include "vimu/errors.hpp"

namespace vimu {

namespace {

struct ResampleGrid {
    std::size_t count;   // output samples
    double step;         // source indices per output sample
};

ResampleGrid make_grid(std::size_t source_count, double source_rate, double target_hz) {
    if (source_count < 2) {
        throw ValidationError("resample: need >= 2 samples");
    }
    if (!(target_hz > 0.0) || !std::isfinite(target_hz)) {
        throw ValidationError("resample: target rate must be positive and finite");
    }
    const double span = static_cast<double>(source_count - 1) * target_hz / source_rate;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    return {count, source_rate / target_hz};
}

// Source index for output sample j, split into base index and fraction.
void locate(double s, std::size_t n, std::size_t& i0, double& frac) {
    if (s <= 0.0) {
        i0 = 0;
        frac = 0.0;
        return;
    }
    if (s >= static_cast<double>(n - 1)) {
        i0 = n - 1;
        frac = 0.0;
        return;
    }
    i0 = static_cast<std::size_t>(s);
    frac = s - static_cast<double>(i0);
}

}  // namespace

WorldTrack resample_track(const WorldTrack& track, double target_hz) {
    const std::size_t n = track.position.size();
    if (track.orientation.size() != n) {
        throw ValidationError("resample: position/orientation length mismatch");
    }
    const ResampleGrid grid = make_grid(n, track.rate, target_hz);

    WorldTrack out;
    out.rate = target_hz;
    out.position.reserve(grid.count);
    out.orientation.reserve(grid.count);
    for (std::size_t j = 0; j < grid.count; ++j) {
        std::size_t i0;
        double frac;
        locate(static_cast<double>(j) * grid.step, n, i0, frac);
        if (frac == 0.0) {
            out.position.push_back(track.position[i0]);
            out.orientation.push_back(track.orientation[i0]);
        } else {
            out.position.push_back((1.0 - frac) * track.position[i0] +
                                   frac * track.position[i0 + 1]);
            out.orientation.push_back(
                slerp(track.orientation[i0], track.orientation[i0 + 1], frac));
        }
    }
    return out;
}

ImuTrace resample_trace(const ImuTrace& trace, double target_hz) {
    const std::size_t n = trace.accel.size();
    if (trace.gyro.size() != n) {
        throw ValidationError("resample: accel/gyro length mismatch");
    }
    const ResampleGrid grid = make_grid(n, trace.rate, target_hz);

    ImuTrace out;
    out.rate = target_hz;
    out.accel.reserve(grid.count);
    out.gyro.reserve(grid.count);
    for (std::size_t j = 0; j < grid.count; ++j) {
        std::size_t i0;
        double frac;
        locate(static_cast<double>(j) * grid.step, n, i0, frac);
        if (frac == 0.0) {
            out.accel.push_back(trace.accel[i0]);
            out.gyro.push_back(trace.gyro[i0]);
        } else {
            out.accel.push_back((1.0 - frac) * trace.accel[i0] + frac * trace.accel[i0 + 1]);
            out.gyro.push_back((1.0 - frac) * trace.gyro[i0] + frac * trace.gyro[i0 + 1]);
        }
    }
    return out;
}

namespace {

double channel_value(const ImuTrace& t, std::size_t channel, std::size_t i) {
    return channel < 3 ? t.accel[i][channel] : t.gyro[i][channel - 3];
}

}  // namespace

ChannelStats compute_stats(const ImuTrace& trace) {
    const std::size_t n = trace.accel.size();
    if (trace.gyro.size() != n) {
        throw ValidationError("stats: accel/gyro length mismatch");
    }
    if (n < 2) {
        throw ValidationError("stats: need >= 2 samples, got " + std::to_string(n));
    }
    ChannelStats st;
    st.count = n;
    for (std::size_t c = 0; c < 6; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += channel_value(trace, c, i);
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = channel_value(trace, c, i) - mean;
            ss += d * d;
        }
        st.mean[c] = mean;
        st.stddev[c] = std::sqrt(ss / static_cast<double>(n));
    }
    return st;
}

ImuTrace calibrate(const ImuTrace& synthetic, const ChannelStats& ref) {
    for (std::size_t c = 0; c < 6; ++c) {
        if (!std::isfinite(ref.mean[c]) || !std::isfinite(ref.stddev[c]) || ref.stddev[c] < 0.0) {
            throw ValidationError("calibrate: reference stats invalid for channel " +
                                  std::string(kChannelNames[c]));
        }
    }
    const ChannelStats own = compute_stats(synthetic);
    std::array<double, 6> scale{}, shift{};
    for (std::size_t c = 0; c < 6; ++c) {
        if (own.stddev[c] < 1e-12) {
            scale[c] = 0.0;
            shift[c] = ref.mean[c];
        } else {
            scale[c] = ref.stddev[c] / own.stddev[c];
            shift[c] = ref.mean[c] - own.mean[c] * scale[c];
        }
    }
    ImuTrace out;
    out.rate = synthetic.rate;
    const std::size_t n = synthetic.accel.size();
    out.accel.resize(n);
    out.gyro.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            out.accel[i][c] = synthetic.accel[i][c] * scale[c] + shift[c];
            out.gyro[i][c] = synthetic.gyro[i][c] * scale[c + 3] + shift[c + 3];
        }
    }
    return out;
}

std::vector<ImuWindow> window(const ImuTrace& trace, std::size_t length, std::size_t stride) {
    return window(trace, length, stride, {});
}

std::vector<ImuWindow> window(const ImuTrace& trace, std::size_t length, std::size_t stride,
                              const std::vector<int>& labels) {
    const std::size_t n = trace.accel.size();
    if (length == 0 || length > n) {
        throw ValidationError("window: length " + std::to_string(length) +
                              " does not fit trace of " + std::to_string(n) + " samples");
    }
    if (stride == 0) {
        throw ValidationError("window: stride must be >= 1");
    }
    if (!labels.empty() && labels.size() != n) {
        throw ValidationError("window: label count does not match trace length");
    }
    std::vector<ImuWindow> out;
    for (std::size_t t = 0; t + length <= n; t += stride) {
        ImuWindow w;
        w.start = t;
        w.data.resize(6, static_cast<Eigen::Index>(length));
        for (std::size_t i = 0; i < length; ++i) {
            for (std::size_t c = 0; c < 6; ++c) {
                w.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
                    channel_value(trace, c, t + i);
            }
        }
        if (!labels.empty()) {
            w.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(t),
                            labels.begin() + static_cast<std::ptrdiff_t>(t + length));
        }
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace vimu
