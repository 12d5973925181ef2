#include "vimu/io.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include <json.hpp>

#include "vimu/errors.hpp"

namespace vimu {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

double parse_double(std::string_view field, const std::string& context) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw ParseError(context + ": malformed number '" + std::string(field) + "'");
    }
    if (!std::isfinite(v)) {
        throw ValidationError(context + ": non-finite value '" + std::string(field) + "'");
    }
    return v;
}

namespace {

long parse_int(std::string_view field, const std::string& context) {
    long v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw ParseError(context + ": malformed integer '" + std::string(field) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> split_lines(std::string_view text) {
    auto lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    for (auto& l : lines) {
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    }
    return lines;
}

struct CsvDoc {
    double rate = 0.0;
    bool has_rate = false;
    std::vector<std::string_view> header;
    std::vector<std::vector<std::string_view>> rows;
};

// Comment lines ("#...") may precede the header; "# rate_hz=<v>" is parsed.
CsvDoc read_csv(std::string_view text, const std::vector<std::string_view>& expected_header) {
    CsvDoc doc;
    const auto lines = split_lines(text);
    std::size_t i = 0;
    for (; i < lines.size() && !lines[i].empty() && lines[i].front() == '#'; ++i) {
        const std::string_view comment = lines[i];
        constexpr std::string_view kRateKey = "# rate_hz=";
        if (comment.substr(0, kRateKey.size()) == kRateKey) {
            doc.rate = parse_double(comment.substr(kRateKey.size()), "rate_hz");
            if (!(doc.rate > 0.0)) {
                throw ValidationError("rate_hz: must be > 0");
            }
            doc.has_rate = true;
        }
    }
    if (i >= lines.size()) {
        throw ParseError("csv: missing header line");
    }
    doc.header = split(lines[i], ',');
    if (doc.header.size() != expected_header.size()) {
        throw ParseError("csv: expected " + std::to_string(expected_header.size()) +
                         " columns, got " + std::to_string(doc.header.size()));
    }
    for (std::size_t c = 0; c < expected_header.size(); ++c) {
        if (doc.header[c] != expected_header[c]) {
            throw ParseError("csv: column " + std::to_string(c) + ": expected '" +
                             std::string(expected_header[c]) + "', got '" +
                             std::string(doc.header[c]) + "'");
        }
    }
    ++i;
    for (; i < lines.size(); ++i) {
        auto fields = split(lines[i], ',');
        if (fields.size() != expected_header.size()) {
            throw ParseError("csv: ragged row at line " + std::to_string(i + 1) + " (" +
                             std::to_string(fields.size()) + " fields)");
        }
        doc.rows.push_back(std::move(fields));
    }
    if (doc.rows.empty()) {
        throw ValidationError("empty trace: csv has no data rows");
    }
    return doc;
}

std::string row_context(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

double infer_rate_from_time_column(const CsvDoc& doc) {
    if (doc.rows.size() < 2) {
        throw ValidationError("track csv: cannot infer rate from a single row; "
                              "add a '# rate_hz=' comment");
    }
    std::vector<double> t(doc.rows.size());
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        t[r] = parse_double(doc.rows[r][0], row_context(r, 0));
    }
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) {
        throw ValidationError("track csv: time column is not increasing");
    }
    for (std::size_t r = 1; r < t.size(); ++r) {
        const double expect = t[0] + static_cast<double>(r) * dt;
        if (std::abs(t[r] - expect) > 1e-6 * std::max(1.0, std::abs(expect))) {
            throw ValidationError("track csv: time column is not uniformly spaced at row " +
                                  std::to_string(r));
        }
    }
    return 1.0 / dt;
}

}  // namespace

WorldTrack parse_track_csv(std::string_view text) {
    const CsvDoc doc = read_csv(text, {"t", "px", "py", "pz", "qw", "qx", "qy", "qz"});
    WorldTrack track;
    track.rate = doc.has_rate ? doc.rate : infer_rate_from_time_column(doc);
    track.position.reserve(doc.rows.size());
    track.orientation.reserve(doc.rows.size());
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        double f[8];
        for (std::size_t c = 0; c < 8; ++c) {
            f[c] = parse_double(doc.rows[r][c], row_context(r, c));
        }
        const double norm = std::sqrt(f[4] * f[4] + f[5] * f[5] + f[6] * f[6] + f[7] * f[7]);
        if (std::abs(norm - 1.0) > 1e-6) {
            throw ValidationError("track csv: quaternion at row " + std::to_string(r) +
                                  " is not unit-norm");
        }
        track.position.emplace_back(f[1], f[2], f[3]);
        track.orientation.emplace_back(f[4], f[5], f[6], f[7]);
    }
    return track;
}

std::string write_track_csv(const WorldTrack& track) {
    std::string out = "# rate_hz=" + format_double(track.rate) + "\n";
    out += "t,px,py,pz,qw,qx,qy,qz\n";
    for (std::size_t i = 0; i < track.position.size(); ++i) {
        const auto& p = track.position[i];
        const auto& q = track.orientation[i];
        out += format_double(static_cast<double>(i) / track.rate);
        out += ',';
        out += format_double(p.x());
        out += ',';
        out += format_double(p.y());
        out += ',';
        out += format_double(p.z());
        out += ',';
        out += format_double(q.w());
        out += ',';
        out += format_double(q.x());
        out += ',';
        out += format_double(q.y());
        out += ',';
        out += format_double(q.z());
        out += '\n';
    }
    return out;
}

ImuTrace read_imu_csv(std::string_view text) {
    const CsvDoc doc = read_csv(text, {"t", "ax", "ay", "az", "gx", "gy", "gz"});
    if (!doc.has_rate) {
        throw ParseError("imu csv: missing '# rate_hz=' comment");
    }
    ImuTrace trace;
    trace.rate = doc.rate;
    trace.accel.reserve(doc.rows.size());
    trace.gyro.reserve(doc.rows.size());
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        double f[7];
        for (std::size_t c = 0; c < 7; ++c) {
            f[c] = parse_double(doc.rows[r][c], row_context(r, c));
        }
        trace.accel.emplace_back(f[1], f[2], f[3]);
        trace.gyro.emplace_back(f[4], f[5], f[6]);
    }
    return trace;
}

std::string write_imu_csv(const ImuTrace& trace) {
    std::string out = "# rate_hz=" + format_double(trace.rate) + "\n";
    out += "t,ax,ay,az,gx,gy,gz\n";
    for (std::size_t i = 0; i < trace.accel.size(); ++i) {
        out += format_double(static_cast<double>(i) / trace.rate);
        for (std::size_t c = 0; c < 3; ++c) {
            out += ',';
            out += format_double(trace.accel[i][static_cast<Eigen::Index>(c)]);
        }
        for (std::size_t c = 0; c < 3; ++c) {
            out += ',';
            out += format_double(trace.gyro[i][static_cast<Eigen::Index>(c)]);
        }
        out += '\n';
    }
    return out;
}

Eigen::MatrixXd read_matrix_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) {
        throw ParseError("csv: missing header line");
    }
    const auto header = split(lines[0], ',');
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string expect = "e" + std::to_string(c);
        if (header[c] != expect) {
            throw ParseError("csv: column " + std::to_string(c) + ": expected '" + expect +
                             "', got '" + std::string(header[c]) + "'");
        }
    }
    if (lines.size() < 2) {
        throw ValidationError("empty trace: csv has no data rows");
    }
    const std::size_t dim = header.size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(lines.size() - 1),
                      static_cast<Eigen::Index>(dim));
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split(lines[r], ',');
        if (fields.size() != dim) {
            throw ParseError("csv: ragged row at line " + std::to_string(r + 1) + " (" +
                             std::to_string(fields.size()) + " fields)");
        }
        for (std::size_t c = 0; c < dim; ++c) {
            m(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
                parse_double(fields[c], row_context(r - 1, c));
        }
    }
    return m;
}

std::string write_matrix_csv(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out += ',';
        out += "e" + std::to_string(c);
    }
    out += '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

EmbeddingBatch read_embeddings_csv(std::string_view text, EmbeddingRole role) {
    return EmbeddingBatch(read_matrix_csv(text), role);
}

std::string write_embeddings_csv(const EmbeddingBatch& batch) {
    return write_matrix_csv(batch.data());
}

std::vector<int> read_labels_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "label") {
        throw ParseError("labels csv: header must be 'label'");
    }
    if (lines.size() < 2) {
        throw ValidationError("empty trace: csv has no data rows");
    }
    std::vector<int> out;
    out.reserve(lines.size() - 1);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        out.push_back(static_cast<int>(parse_int(lines[r], "row " + std::to_string(r - 1))));
    }
    return out;
}

namespace {

const json& require_field(const json& obj, const char* name, const std::string& where) {
    const auto it = obj.find(name);
    if (it == obj.end()) {
        throw ParseError("schema: missing field '" + std::string(name) + "' in " + where);
    }
    return *it;
}

double require_number(const json& v, const std::string& where) {
    if (!v.is_number()) {
        throw ParseError("schema: " + where + " must be a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ValidationError("non-finite: " + where);
    }
    return d;
}

Eigen::Vector3d require_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) {
        throw ParseError("schema: " + where + " must be an array of 3 numbers");
    }
    return {require_number(v[0], where + "[0]"), require_number(v[1], where + "[1]"),
            require_number(v[2], where + "[2]")};
}

}  // namespace

std::pair<Skeleton, MotionSequence> parse_motion(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError("schema: invalid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) {
        throw ParseError("schema: document root must be an object");
    }

    double fps = 60.0;
    if (const auto it = doc.find("fps"); it != doc.end()) {
        fps = require_number(*it, "fps");
        if (!(fps > 0.0)) {
            throw ValidationError("fps: must be > 0, got " + format_double(fps));
        }
    }

    const json& fmt = require_field(doc, "rotation_format", "document");
    if (!fmt.is_string()) {
        throw ParseError("schema: rotation_format must be a string");
    }
    const std::string format = fmt.get<std::string>();
    const bool axis_angle = format == "axis_angle";
    if (!axis_angle && format != "quaternion_wxyz") {
        throw ParseError("schema: rotation_format must be 'axis_angle' or 'quaternion_wxyz', "
                         "got '" + format + "'");
    }

    const json& sk_obj = require_field(doc, "skeleton", "document");
    if (!sk_obj.is_object()) {
        throw ParseError("schema: skeleton must be an object");
    }
    const json& names_j = require_field(sk_obj, "names", "skeleton");
    const json& parents_j = require_field(sk_obj, "parents", "skeleton");
    const json& offsets_j = require_field(sk_obj, "rest_offsets", "skeleton");
    if (!names_j.is_array() || !parents_j.is_array() || !offsets_j.is_array()) {
        throw ParseError("schema: skeleton.names/parents/rest_offsets must be arrays");
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < names_j.size(); ++i) {
        if (!names_j[i].is_string()) {
            throw ParseError("schema: skeleton.names[" + std::to_string(i) +
                             "] must be a string");
        }
        names.push_back(names_j[i].get<std::string>());
    }
    std::vector<int> parents;
    for (std::size_t i = 0; i < parents_j.size(); ++i) {
        if (!parents_j[i].is_number_integer()) {
            throw ParseError("schema: skeleton.parents[" + std::to_string(i) +
                             "] must be an integer");
        }
        parents.push_back(parents_j[i].get<int>());
    }
    std::vector<Eigen::Vector3d> offsets;
    for (std::size_t i = 0; i < offsets_j.size(); ++i) {
        offsets.push_back(
            require_vec3(offsets_j[i], "skeleton.rest_offsets[" + std::to_string(i) + "]"));
    }
    Skeleton sk(std::move(names), std::move(parents), std::move(offsets));

    const json& frames_j = require_field(doc, "frames", "document");
    if (!frames_j.is_array()) {
        throw ParseError("schema: frames must be an array");
    }
    MotionSequence seq;
    seq.fps = fps;
    seq.frames.reserve(frames_j.size());
    const std::size_t rot_arity = axis_angle ? 3 : 4;
    for (std::size_t f = 0; f < frames_j.size(); ++f) {
        const std::string where = "frames[" + std::to_string(f) + "]";
        const json& fr = frames_j[f];
        if (!fr.is_object()) {
            throw ParseError("schema: " + where + " must be an object");
        }
        PoseFrame frame;
        frame.root_translation = require_vec3(require_field(fr, "root_t", where),
                                              where + ".root_t");
        const json& rots = require_field(fr, "rotations", where);
        if (!rots.is_array()) {
            throw ParseError("schema: " + where + ".rotations must be an array");
        }
        if (rots.size() != sk.joint_count()) {
            throw ValidationError(where + ": expected " + std::to_string(sk.joint_count()) +
                                  " rotations, got " + std::to_string(rots.size()));
        }
        for (std::size_t j = 0; j < rots.size(); ++j) {
            const std::string rwhere = where + ".rotations[" + std::to_string(j) + "]";
            const json& r = rots[j];
            if (!r.is_array() || r.size() != rot_arity) {
                throw ParseError("schema: " + rwhere + " must be an array of " +
                                 std::to_string(rot_arity) + " numbers");
            }
            try {
                if (axis_angle) {
                    frame.joint_rotation.push_back(
                        UnitQuaternion::from_rotation_vector(require_vec3(r, rwhere)));
                } else {
                    frame.joint_rotation.emplace_back(
                        require_number(r[0], rwhere + "[0]"), require_number(r[1], rwhere + "[1]"),
                        require_number(r[2], rwhere + "[2]"),
                        require_number(r[3], rwhere + "[3]"));
                }
            } catch (const ValidationError& e) {
                throw ValidationError(rwhere + ": " + e.what());
            }
        }
        seq.frames.push_back(std::move(frame));
    }
    return {std::move(sk), std::move(seq)};
}

std::string write_motion(const Skeleton& sk, const MotionSequence& seq) {
    json doc;
    doc["fps"] = seq.fps;
    doc["rotation_format"] = "quaternion_wxyz";
    json sk_obj;
    sk_obj["names"] = sk.joint_names();
    sk_obj["parents"] = sk.parents();
    json offsets = json::array();
    for (const auto& o : sk.rest_offsets()) {
        offsets.push_back({o.x(), o.y(), o.z()});
    }
    sk_obj["rest_offsets"] = std::move(offsets);
    doc["skeleton"] = std::move(sk_obj);
    json frames = json::array();
    for (const auto& f : seq.frames) {
        json fr;
        fr["root_t"] = {f.root_translation.x(), f.root_translation.y(), f.root_translation.z()};
        json rots = json::array();
        for (const auto& q : f.joint_rotation) {
            rots.push_back({q.w(), q.x(), q.y(), q.z()});
        }
        fr["rotations"] = std::move(rots);
        frames.push_back(std::move(fr));
    }
    doc["frames"] = std::move(frames);
    return doc.dump(2) + "\n";
}

ChannelStats read_stats_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError("schema: invalid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) {
        throw ParseError("schema: stats root must be an object");
    }
    const json& channels = require_field(doc, "channels", "stats");
    ChannelStats st;
    for (std::size_t c = 0; c < 6; ++c) {
        const json& ch = require_field(channels, kChannelNames[c], "stats.channels");
        st.mean[c] = require_number(require_field(ch, "mean", kChannelNames[c]),
                                    std::string(kChannelNames[c]) + ".mean");
        st.stddev[c] = require_number(require_field(ch, "std", kChannelNames[c]),
                                      std::string(kChannelNames[c]) + ".std");
        if (st.stddev[c] < 0.0) {
            throw ValidationError(std::string(kChannelNames[c]) + ".std: must be >= 0");
        }
    }
    const json& count = require_field(doc, "count", "stats");
    if (!count.is_number_unsigned() || count.get<std::uint64_t>() < 2) {
        throw ValidationError("stats.count: must be an integer >= 2");
    }
    st.count = count.get<std::size_t>();
    return st;
}

std::string write_stats_json(const ChannelStats& stats) {
    json channels;
    for (std::size_t c = 0; c < 6; ++c) {
        channels[kChannelNames[c]] = {{"mean", stats.mean[c]}, {"std", stats.stddev[c]}};
    }
    json doc;
    doc["channels"] = std::move(channels);
    doc["count"] = stats.count;
    return doc.dump(2) + "\n";
}

}  // namespace vimu
