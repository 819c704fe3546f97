#pragma once

#include <Eigen/Core>
#include <string>

#include "fmd/motion.hpp"

namespace fmd {

// Image encoding of a directional motion: height = bones, width = frames,
// x/y/z mapped to the R/G/B channels via the affine bijection (v+1)/2.
// Pixels are stored flattened in (bone, frame, channel) row-major order,
// which is also the flattening the embedder consumes.
struct MotionImage {
    int height = 0;
    int width = 0;
    Eigen::VectorXd pixels;  // size height*width*3, values in [0,1]

    double at(int b, int f, int c) const { return pixels[(b * width + f) * 3 + c]; }
    double& at(int b, int f, int c) { return pixels[(b * width + f) * 3 + c]; }

    // Throws ValidationError on empty dimensions or values outside [0,1].
    void validate() const;
};

// Maps unit direction components from [-1,1] into [0,1]. Requires the
// unit-norm invariant; never clamps.
MotionImage to_image(const DirectionalMotion& dm);

// Inverse map 2*pixel - 1. Output vectors are not re-normalized; callers
// that need the unit-norm invariant must check it downstream.
DirectionalMotion from_image(const MotionImage& img);

// 8-bit RGB PNG export for visual inspection. Quantization makes this lossy;
// it is never part of the metric path.
void write_png(const MotionImage& img, const std::string& path);

}  // namespace fmd
