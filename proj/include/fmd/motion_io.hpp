#pragma once

#include <iosfwd>
#include <string>

#include "fmd/motion.hpp"

namespace fmd {

// MOT1 text format:
//   optional leading '#' comment lines
//   MOT1 <J> <F> <fps>
//   <J parent indices, root = -1>
//   F lines of 3*J reals (x y z per joint, joint-major), 17 significant digits
//
// Joint names are not serialized; loading assigns joint_0..joint_{J-1}.

MotionClip load_motion(const std::string& path);
MotionClip read_motion(std::istream& in);

void save_motion(const MotionClip& clip, const std::string& path);
void write_motion(const MotionClip& clip, std::ostream& out);

}  // namespace fmd
