#include "fmd/motion_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fmd/errors.hpp"
#include "text_util.hpp"

namespace fmd {

using detail::fmt17;
using detail::parse_double;
using detail::parse_int;
using detail::split_ws;

namespace {

// Reads the next line, counting physical lines. Returns false at EOF.
bool next_line(std::istream& in, std::string& line, long& lineno) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno;
    return true;
}

bool blank(const std::string& line) { return detail::trim(line).empty(); }

}  // namespace

MotionClip read_motion(std::istream& in) {
    std::string line;
    long lineno = 0;

    // Comments are only permitted before the header.
    for (;;) {
        if (!next_line(in, line, lineno)) throw ParseError(lineno, "missing MOT1 header");
        if (!line.empty() && line[0] == '#') continue;
        break;
    }

    const auto header = split_ws(line);
    if (header.size() != 4 || header[0] != "MOT1") {
        throw ParseError(lineno, "expected 'MOT1 <J> <F> <fps>'");
    }
    const long long joints = parse_int(header[1], lineno);
    const long long frames = parse_int(header[2], lineno);
    const double fps = parse_double(header[3], lineno);
    if (joints < 2) throw ParseError(lineno, "joint count must be >= 2");
    if (frames < 1) throw ParseError(lineno, "frame count must be >= 1");
    if (!(fps > 0.0)) throw ParseError(lineno, "fps must be positive");

    if (!next_line(in, line, lineno)) throw ParseError(lineno, "missing parent index line");
    const auto parent_tokens = split_ws(line);
    if (static_cast<long long>(parent_tokens.size()) != joints) {
        throw ParseError(lineno, "expected " + std::to_string(joints) + " parent indices, got " +
                                     std::to_string(parent_tokens.size()));
    }

    MotionClip clip;
    clip.skeleton.parents.reserve(joints);
    clip.skeleton.joint_names.reserve(joints);
    for (long long j = 0; j < joints; ++j) {
        clip.skeleton.parents.push_back(static_cast<int>(parse_int(parent_tokens[j], lineno)));
        clip.skeleton.joint_names.push_back("joint_" + std::to_string(j));
    }
    clip.skeleton.validate();  // throws TopologyError

    clip.frame_rate = fps;
    clip.positions.resize(frames, 3 * joints);
    for (long long f = 0; f < frames; ++f) {
        if (!next_line(in, line, lineno)) {
            throw ParseError(lineno, "expected " + std::to_string(frames) + " frame lines, got " +
                                         std::to_string(f));
        }
        const auto values = split_ws(line);
        if (static_cast<long long>(values.size()) != 3 * joints) {
            throw ParseError(lineno, "expected " + std::to_string(3 * joints) +
                                         " values per frame, got " + std::to_string(values.size()));
        }
        for (long long k = 0; k < 3 * joints; ++k) {
            const double v = parse_double(values[k], lineno);
            if (!std::isfinite(v)) throw ParseError(lineno, "non-finite coordinate");
            clip.positions(f, k) = v;
        }
    }
    while (next_line(in, line, lineno)) {
        if (!blank(line)) throw ParseError(lineno, "unexpected content after last frame");
    }
    return clip;
}

MotionClip load_motion(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open '" + path + "' for reading");
    return read_motion(in);
}

void write_motion(const MotionClip& clip, std::ostream& out) {
    clip.validate();
    out << "MOT1 " << clip.joints() << ' ' << clip.frames() << ' ' << fmt17(clip.frame_rate)
        << '\n';
    for (int j = 0; j < clip.joints(); ++j) {
        if (j) out << ' ';
        out << clip.skeleton.parents[j];
    }
    out << '\n';
    for (int f = 0; f < clip.frames(); ++f) {
        for (int k = 0; k < clip.positions.cols(); ++k) {
            if (k) out << ' ';
            out << fmt17(clip.positions(f, k));
        }
        out << '\n';
    }
}

void save_motion(const MotionClip& clip, const std::string& path) {
    std::ostringstream buf;
    write_motion(clip, buf);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out << buf.str();
    if (!out) throw IOError("failed writing '" + path + "'");
}

}  // namespace fmd
