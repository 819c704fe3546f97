#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fmd/skeleton.hpp"

namespace fmd {

// A motion clip: joint positions in meters over F frames. Row f of
// `positions` holds [x0 y0 z0 x1 y1 z1 ...] for the J joints of `skeleton`.
struct MotionClip {
    Skeleton skeleton;
    Eigen::MatrixXd positions;  // F x 3J
    double frame_rate = 30.0;

    int frames() const { return static_cast<int>(positions.rows()); }
    int joints() const { return skeleton.joints(); }

    Eigen::Vector3d joint_position(int frame, int joint) const {
        return positions.block<1, 3>(frame, 3 * joint).transpose();
    }
    void set_joint_position(int frame, int joint, const Eigen::Vector3d& p) {
        positions.block<1, 3>(frame, 3 * joint) = p.transpose();
    }

    // Throws ValidationError on shape mismatch, empty clip, non-finite
    // values or a non-positive frame rate.
    void validate() const;
};

// Unit bone-direction vectors per frame. Row f holds [x0 y0 z0 x1 ...] for
// the B = J-1 bones, in the skeleton's bone order.
struct DirectionalMotion {
    Eigen::MatrixXd vectors;  // F x 3B

    int frames() const { return static_cast<int>(vectors.rows()); }
    int bones() const { return static_cast<int>(vectors.cols()) / 3; }

    Eigen::Vector3d bone(int frame, int b) const {
        return vectors.block<1, 3>(frame, 3 * b).transpose();
    }

    // Throws ValidationError unless every 3-vector has unit norm within tol.
    void require_unit_norm(double tol = 1e-9) const;
};

// Converts joint positions to unit parent-to-child direction vectors.
// Throws DegenerateBone when a bone's length drops below 1e-8 m.
DirectionalMotion to_directional(const MotionClip& clip);

// Cuts the clip into windows of exactly `length` frames starting at offsets
// 0, stride, 2*stride, ... Trailing partial windows are discarded.
// Throws TooShort when the clip has fewer than `length` frames.
std::vector<MotionClip> window(const MotionClip& clip, int length, int stride);

// Deterministic procedural motion dataset. Each clip superimposes 2-4 seeded
// sinusoids (amplitude <= 0.3 m, frequency <= 2 Hz) per channel on top of a
// seeded rest pose whose bone lengths lie in [0.1, 0.5] m. Bone directions
// are animated and rescaled to the rest length, so bone lengths are constant
// across frames.
std::vector<MotionClip> synth_dataset(std::uint64_t seed, int n_clips, const Skeleton& skeleton,
                                      int frames, double frame_rate = 30.0);

}  // namespace fmd
