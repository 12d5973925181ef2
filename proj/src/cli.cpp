#include "vimu/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "vimu/errors.hpp"
#include "vimu/imu.hpp"
#include "vimu/io.hpp"
#include "vimu/losses.hpp"
#include "vimu/signal.hpp"
#include "vimu/skeleton.hpp"

namespace fs = std::filesystem;

namespace vimu::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) {
        throw IoError("read failed for '" + path + "'");
    }
    return ss.str();
}

// Write to "<path>.tmp" and rename, so a failure never leaves partial output.
void write_file_atomic(const std::string& path, std::string_view content) {
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename temporary output to '" + path + "'");
    }
}

Eigen::Vector3d parse_vec3_flag(const std::string& text, const std::string& flag) {
    const auto comma1 = text.find(',');
    const auto comma2 = comma1 == std::string::npos ? std::string::npos
                                                    : text.find(',', comma1 + 1);
    if (comma1 == std::string::npos || comma2 == std::string::npos ||
        text.find(',', comma2 + 1) != std::string::npos) {
        throw ValidationError(flag + ": expected 'x,y,z', got '" + text + "'");
    }
    return {parse_double(text.substr(0, comma1), flag),
            parse_double(text.substr(comma1 + 1, comma2 - comma1 - 1), flag),
            parse_double(text.substr(comma2 + 1), flag)};
}

std::pair<std::string, std::string> parse_name_pair(const std::string& text,
                                                    const std::string& flag) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= text.size() ||
        text.find(',', comma + 1) != std::string::npos) {
        throw ValidationError(flag + ": expected 'left,right', got '" + text + "'");
    }
    return {text.substr(0, comma), text.substr(comma + 1)};
}

std::string format_scalar(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%#.12g", v);
    return buf;
}

struct SimulateOptions {
    std::string motion_file;
    std::string out_csv;
    std::string joint;
    std::string mount_rot = "0,0,0";
    std::string mount_off = "0,0,0";
    std::string feet = "left_foot,right_foot";
    std::string gravity = "0,-9.8,0";
    std::string plot_file;
    double rate = 0.0;
    double height = 1.7;
    bool normalize = true;
    bool rebase = true;
};

int run_simulate(const SimulateOptions& opt) {
    const auto [parsed_sk, parsed_seq] = parse_motion(read_file(opt.motion_file));
    Skeleton sk = opt.normalize ? normalize_height(parsed_sk, opt.height) : parsed_sk;
    MotionSequence seq = parsed_seq;
    if (opt.rebase) {
        const auto [left, right] = parse_name_pair(opt.feet, "--feet");
        seq = rebase_sequence(seq, sk, sk.joint_index(left), sk.joint_index(right));
    }
    SensorAttachment att;
    att.joint = sk.joint_index(opt.joint);
    att.mount_rotation =
        UnitQuaternion::from_rotation_vector(parse_vec3_flag(opt.mount_rot, "--mount-rot"));
    att.mount_offset = parse_vec3_flag(opt.mount_off, "--mount-off");

    WorldTrack track = extract_track(seq, sk, att);
    if (opt.rate > 0.0 && opt.rate != track.rate) {
        track = resample_track(track, opt.rate);
    }
    GravityModel g;
    g.g_global = parse_vec3_flag(opt.gravity, "--gravity");
    ImuTrace trace;
    trace.rate = track.rate;
    trace.accel = to_local_accel(track, linear_accel_global(track), g);
    trace.gyro = to_local_gyro(track, angular_velocity_global(track));

    write_file_atomic(opt.out_csv, write_imu_csv(trace));
    if (!opt.plot_file.empty()) {
        std::string plot = "# t ax ay az gx gy gz\n";
        for (std::size_t i = 0; i < trace.accel.size(); ++i) {
            plot += format_double(static_cast<double>(i) / trace.rate);
            for (int c = 0; c < 3; ++c) plot += ' ' + format_double(trace.accel[i][c]);
            for (int c = 0; c < 3; ++c) plot += ' ' + format_double(trace.gyro[i][c]);
            plot += '\n';
        }
        write_file_atomic(opt.plot_file, plot);
    }
    return 0;
}

struct LossOptions {
    std::string kind;
    std::vector<std::string> inputs;
    double tau = 0.07;
    bool symmetrize = false;
    std::size_t window_len = 0;
    std::size_t stride = 0;
};

void require_inputs(const LossOptions& opt, std::size_t n, const char* names) {
    if (opt.inputs.size() != n) {
        throw ValidationError("--kind " + opt.kind + " expects " + std::to_string(n) +
                              " inputs (" + names + "), got " +
                              std::to_string(opt.inputs.size()));
    }
}

int run_loss(const LossOptions& opt) {
    const LossConfig cfg{opt.tau};
    double value = 0.0;
    if (opt.kind == "infonce") {
        require_inputs(opt, 2, "query.csv key.csv");
        value = info_nce(read_embeddings_csv(read_file(opt.inputs[0]), EmbeddingRole::Query),
                         read_embeddings_csv(read_file(opt.inputs[1]), EmbeddingRole::Key), cfg);
    } else if (opt.kind == "total") {
        require_inputs(opt, 4, "text.csv pose.csv imu_left.csv imu_right.csv");
        value = contrastive_total(
            read_embeddings_csv(read_file(opt.inputs[0]), EmbeddingRole::Text),
            read_embeddings_csv(read_file(opt.inputs[1]), EmbeddingRole::Pose),
            read_embeddings_csv(read_file(opt.inputs[2]), EmbeddingRole::ImuLeft),
            read_embeddings_csv(read_file(opt.inputs[3]), EmbeddingRole::ImuRight), cfg,
            opt.symmetrize);
    } else if (opt.kind == "mse") {
        require_inputs(opt, 3, "target.csv pose_pred.csv imu_pred.csv");
        const ImuTrace xv = read_imu_csv(read_file(opt.inputs[0]));
        const ImuTrace xp = read_imu_csv(read_file(opt.inputs[1]));
        const ImuTrace xs = read_imu_csv(read_file(opt.inputs[2]));
        const std::size_t len = opt.window_len > 0 ? opt.window_len : xv.accel.size();
        const std::size_t stride = opt.stride > 0 ? opt.stride : len;
        value = mse_multitask(window(xv, len, stride), window(xp, len, stride),
                              window(xs, len, stride));
    } else if (opt.kind == "xent") {
        require_inputs(opt, 2, "logits.csv labels.csv");
        const Eigen::MatrixXd logits = read_matrix_csv(read_file(opt.inputs[0]));
        LabelWindow lw;
        lw.ids = read_labels_csv(read_file(opt.inputs[1]));
        lw.num_classes = static_cast<int>(logits.cols());
        value = cross_entropy({logits}, {lw});
    } else {
        throw ValidationError("--kind must be infonce, total, mse, or xent, got '" + opt.kind +
                              "'");
    }
    std::cout << format_scalar(value) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// Built-in analytic-oracle checks
// ---------------------------------------------------------------------------

bool check_stationary_specific_force() {
    Skeleton sk({"root", "wrist"}, {-1, 0}, {{0, 0, 0}, {0.1, 0.4, 0.0}});
    MotionSequence seq;
    seq.fps = 120.0;
    PoseFrame f;
    f.root_translation = {0.3, 1.1, -0.2};
    f.joint_rotation = {UnitQuaternion::from_axis_angle({1, 2, 3}, 0.7),
                        UnitQuaternion::from_axis_angle({-1, 0, 1}, 1.1)};
    seq.frames.assign(8, f);
    SensorAttachment att{1, UnitQuaternion::from_axis_angle({0, 1, 0}, 0.4), {0.0, 0.02, 0.0}};
    const ImuTrace trace = synthesize(seq, sk, att);
    const UnitQuaternion world_q =
        f.joint_rotation[0] * f.joint_rotation[1] * att.mount_rotation;
    const Eigen::Vector3d expect = world_q.rotate_inverse({0.0, 9.8, 0.0});
    double err = 0.0;
    for (std::size_t i = 0; i < trace.accel.size(); ++i) {
        err = std::max(err, (trace.accel[i] - expect).cwiseAbs().maxCoeff());
        err = std::max(err, trace.gyro[i].cwiseAbs().maxCoeff());
    }
    return err < 1e-9;
}

bool check_circle_accel_magnitude() {
    WorldTrack track;
    track.rate = 240.0;
    for (int i = 0; i <= 480; ++i) {
        const double t = i / track.rate;
        track.position.emplace_back(std::cos(2.0 * t), 0.0, std::sin(2.0 * t));
        track.orientation.emplace_back();
    }
    double err = 0.0;
    for (const auto& a : linear_accel_global(track)) {
        err = std::max(err, std::abs(a.norm() - 4.0));
    }
    return err < 1e-3;
}

bool check_constant_spin_gyro() {
    WorldTrack track;
    track.rate = 120.0;
    for (int i = 0; i < 240; ++i) {
        track.position.emplace_back(0.0, 0.0, 0.0);
        track.orientation.push_back(
            UnitQuaternion::from_axis_angle({0, 0, 1}, 3.0 * i / track.rate));
    }
    const auto gyro = to_local_gyro(track, angular_velocity_global(track));
    double err = 0.0;
    for (const auto& w : gyro) {
        err = std::max(err, (w - Eigen::Vector3d(0, 0, 3)).cwiseAbs().maxCoeff());
    }
    return err < 1e-9;
}

bool check_infonce_uniform() {
    Eigen::MatrixXd rows(4, 3);
    for (int i = 0; i < 4; ++i) rows.row(i) << 0.6, 0.0, 0.8;
    const EmbeddingBatch b(rows);
    const double l = info_nce(b, b);
    Eigen::MatrixXd one(1, 3);
    one << 1.0, 2.0, 3.0;
    const EmbeddingBatch single(one);
    return std::abs(l - std::log(4.0)) < 1e-12 && info_nce(single, single) == 0.0;
}

bool check_infonce_gradient() {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd qm(3, 4), km(3, 4);
    for (int i = 0; i < 3; ++i) {
        for (int d = 0; d < 4; ++d) {
            qm(i, d) = gauss(rng);
            km(i, d) = gauss(rng);
        }
    }
    const auto grads = info_nce_grad(EmbeddingBatch(qm), EmbeddingBatch(km));
    const double h = 1e-4;
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int d = 0; d < 4; ++d) {
            Eigen::MatrixXd up = qm, dn = qm;
            up(i, d) += h;
            dn(i, d) -= h;
            const double fd = (info_nce(EmbeddingBatch(up), EmbeddingBatch(km)) -
                               info_nce(EmbeddingBatch(dn), EmbeddingBatch(km))) /
                              (2.0 * h);
            const double a = grads.dq(i, d);
            worst = std::max(worst, std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)}));
        }
    }
    return worst <= 1e-5;
}

bool check_calibration() {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    ImuTrace trace;
    trace.rate = 50.0;
    for (int i = 0; i < 200; ++i) {
        trace.accel.emplace_back(gauss(rng) * 2.0 + 1.0, gauss(rng), gauss(rng) - 3.0);
        trace.gyro.emplace_back(gauss(rng) * 0.5, gauss(rng) * 4.0, gauss(rng) + 0.2);
    }
    ChannelStats ref;
    ref.count = 2;
    for (std::size_t c = 0; c < 6; ++c) {
        ref.mean[c] = 0.3 * static_cast<double>(c) - 1.0;
        ref.stddev[c] = 0.5 + 0.25 * static_cast<double>(c);
    }
    const ChannelStats got = compute_stats(calibrate(trace, ref));
    double err = 0.0;
    for (std::size_t c = 0; c < 6; ++c) {
        err = std::max(err, std::abs(got.mean[c] - ref.mean[c]));
        err = std::max(err, std::abs(got.stddev[c] - ref.stddev[c]));
    }
    return err < 1e-9;
}

bool check_resample_identity() {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss;
    ImuTrace trace;
    trace.rate = 60.0;
    for (int i = 0; i < 64; ++i) {
        trace.accel.emplace_back(gauss(rng), gauss(rng), gauss(rng));
        trace.gyro.emplace_back(gauss(rng), gauss(rng), gauss(rng));
    }
    const ImuTrace same = resample_trace(trace, 60.0);
    if (same.accel.size() != trace.accel.size()) return false;
    double err = 0.0;
    for (std::size_t i = 0; i < trace.accel.size(); ++i) {
        err = std::max(err, (same.accel[i] - trace.accel[i]).cwiseAbs().maxCoeff());
        err = std::max(err, (same.gyro[i] - trace.gyro[i]).cwiseAbs().maxCoeff());
    }
    return err < 1e-12;
}

bool check_fk_rigidity() {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    Skeleton sk({"a", "b", "c", "d"}, {-1, 0, 1, 1},
                {{0, 0, 0}, {0, 0.5, 0}, {0.3, 0.2, 0.1}, {-0.2, 0.4, 0.0}});
    for (int trial = 0; trial < 50; ++trial) {
        PoseFrame f;
        f.root_translation = {gauss(rng), gauss(rng), gauss(rng)};
        for (int j = 0; j < 4; ++j) {
            f.joint_rotation.push_back(
                UnitQuaternion(gauss(rng), gauss(rng), gauss(rng), gauss(rng)));
        }
        const auto poses = forward_kinematics(sk, f);
        for (std::size_t j = 1; j < 4; ++j) {
            const double len =
                (poses[j].position - poses[static_cast<std::size_t>(sk.parent(j))].position)
                    .norm();
            if (std::abs(len - sk.rest_offset(j).norm()) > 1e-12) return false;
        }
    }
    return true;
}

int run_check() {
    const std::pair<const char*, bool (*)()> checks[] = {
        {"stationary specific force", check_stationary_specific_force},
        {"circular motion acceleration", check_circle_accel_magnitude},
        {"constant spin gyroscope", check_constant_spin_gyro},
        {"infonce uniform batches", check_infonce_uniform},
        {"infonce gradient vs finite differences", check_infonce_gradient},
        {"calibration statistics", check_calibration},
        {"resample identity", check_resample_identity},
        {"forward kinematics rigidity", check_fk_rigidity},
    };
    bool all_ok = true;
    for (const auto& [name, fn] : checks) {
        const bool ok = fn();
        all_ok = all_ok && ok;
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    }
    std::cout << (all_ok ? "all checks passed" : "some checks FAILED") << "\n";
    return all_ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Physics-based virtual IMU synthesis from skeletal motion capture"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand(
        "simulate", "Synthesize an accelerometer/gyroscope trace from a motion document");
    simulate->add_option("motion", sim.motion_file, "Motion document (JSON)")->required();
    simulate->add_option("output", sim.out_csv, "Output IMU CSV")->required();
    simulate->add_option("--joint", sim.joint, "Joint the sensor is attached to")->required();
    simulate->add_option("--mount-rot", sim.mount_rot,
                         "Sensor mount rotation, axis-angle 'x,y,z' (radians)");
    simulate->add_option("--mount-off", sim.mount_off,
                         "Sensor mount offset in the joint frame, 'x,y,z' (meters)");
    simulate->add_option("--rate", sim.rate, "Resample the sensor track to this rate (Hz)");
    simulate->add_flag("--normalize-height,!--no-normalize-height", sim.normalize,
                       "Rescale the skeleton to the target height (default on)");
    simulate->add_option("--height", sim.height, "Target height in meters (default 1.7)");
    simulate->add_flag("--rebase,!--no-rebase", sim.rebase,
                       "Move the feet midpoint to the origin and zero the heading (default on)");
    simulate->add_option("--feet", sim.feet, "Feet joint names 'left,right' used by --rebase");
    simulate->add_option("--gravity", sim.gravity, "Gravity vector 'x,y,z' (default 0,-9.8,0)");
    simulate->add_option("--plot", sim.plot_file, "Also write a gnuplot-compatible data file");

    std::string rs_in, rs_out;
    double rs_rate = 0.0;
    auto* resample = app.add_subcommand("resample", "Resample an IMU trace to a new rate");
    resample->add_option("input", rs_in, "Input IMU CSV")->required();
    resample->add_option("output", rs_out, "Output IMU CSV")->required();
    resample->add_option("--rate", rs_rate, "Target rate (Hz)")->required();

    std::string cal_in, cal_out, cal_stats;
    auto* calibrate_cmd = app.add_subcommand(
        "calibrate", "Match a synthetic trace's per-channel mean/std to reference stats");
    calibrate_cmd->add_option("input", cal_in, "Input IMU CSV")->required();
    calibrate_cmd->add_option("output", cal_out, "Output IMU CSV")->required();
    calibrate_cmd->add_option("--ref-stats", cal_stats, "Reference stats JSON")->required();

    std::string st_in, st_out;
    auto* stats_cmd = app.add_subcommand("stats", "Compute per-channel stats of an IMU trace");
    stats_cmd->add_option("input", st_in, "Input IMU CSV")->required();
    stats_cmd->add_option("output", st_out, "Output stats JSON")->required();

    LossOptions loss;
    auto* loss_cmd = app.add_subcommand("loss", "Evaluate a pretraining loss kernel");
    loss_cmd->add_option("--kind", loss.kind, "infonce | total | mse | xent")->required();
    loss_cmd->add_option("inputs", loss.inputs, "Input files (count depends on --kind)");
    loss_cmd->add_option("--tau", loss.tau, "Softmax temperature (default 0.07)");
    loss_cmd->add_flag("--symmetrize", loss.symmetrize,
                       "Average each contrastive pair with its reversed direction");
    loss_cmd->add_option("--window", loss.window_len,
                         "Window length for mse (default: whole trace)");
    loss_cmd->add_option("--stride", loss.stride, "Window stride for mse (default: length)");

    auto* check_cmd =
        app.add_subcommand("check", "Run the built-in analytic-oracle property suite");

    std::vector<std::string> argv_strings;
    argv_strings.reserve(args.size() + 1);
    argv_strings.emplace_back("vimu");
    argv_strings.insert(argv_strings.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(argv_strings.size());
    for (const auto& s : argv_strings) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim);
        if (resample->parsed()) {
            write_file_atomic(rs_out,
                              write_imu_csv(resample_trace(read_imu_csv(read_file(rs_in)),
                                                           rs_rate)));
            return 0;
        }
        if (calibrate_cmd->parsed()) {
            const ChannelStats ref = read_stats_json(read_file(cal_stats));
            write_file_atomic(
                cal_out, write_imu_csv(vimu::calibrate(read_imu_csv(read_file(cal_in)), ref)));
            return 0;
        }
        if (stats_cmd->parsed()) {
            write_file_atomic(st_out,
                              write_stats_json(compute_stats(read_imu_csv(read_file(st_in)))));
            return 0;
        }
        if (loss_cmd->parsed()) return run_loss(loss);
        if (check_cmd->parsed()) return run_check();
    } catch (const ParseError& e) {
        std::cerr << "vimu: parse error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "vimu: validation error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "vimu: i/o error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace vimu::cli
