#include "fmd/motion.hpp"

#include <array>
#include <cmath>
#include <string>

#include "fmd/errors.hpp"
#include "fmd/rng.hpp"

namespace fmd {

void MotionClip::validate() const {
    skeleton.validate();
    if (frames() < 1) throw ValidationError("motion clip has no frames");
    if (positions.cols() != 3 * skeleton.joints()) {
        throw ValidationError("positions have " + std::to_string(positions.cols() / 3) +
                              " joints but skeleton has " + std::to_string(skeleton.joints()));
    }
    if (!positions.allFinite()) throw ValidationError("motion clip contains non-finite values");
    if (!(frame_rate > 0.0)) throw ValidationError("frame rate must be positive");
}

void DirectionalMotion::require_unit_norm(double tol) const {
    for (int f = 0; f < frames(); ++f) {
        for (int b = 0; b < bones(); ++b) {
            const double n = bone(f, b).norm();
            if (std::abs(n - 1.0) > tol) {
                throw ValidationError("bone " + std::to_string(b) + " at frame " +
                                      std::to_string(f) + " has norm " + std::to_string(n));
            }
        }
    }
}

DirectionalMotion to_directional(const MotionClip& clip) {
    const auto children = clip.skeleton.bone_children();
    const int bones = static_cast<int>(children.size());
    const int frames = clip.frames();

    DirectionalMotion dm;
    dm.vectors.resize(frames, 3 * bones);
    for (int f = 0; f < frames; ++f) {
        for (int b = 0; b < bones; ++b) {
            const int child = children[b];
            const int parent = clip.skeleton.parents[child];
            Eigen::Vector3d diff = clip.joint_position(f, child) - clip.joint_position(f, parent);
            const double norm = diff.norm();
            if (norm < 1e-8) throw DegenerateBone(f, b);
            Eigen::Vector3d unit = diff / norm;
            // Normalization can overshoot |1| by an ulp; snap so the image
            // encoding stays inside [0,1] without clamping real data.
            for (int c = 0; c < 3; ++c) {
                if (unit[c] > 1.0) unit[c] = 1.0;
                if (unit[c] < -1.0) unit[c] = -1.0;
            }
            dm.vectors.block<1, 3>(f, 3 * b) = unit.transpose();
        }
    }
    return dm;
}

std::vector<MotionClip> window(const MotionClip& clip, int length, int stride) {
    if (length < 1) throw ValidationError("window length must be >= 1");
    if (stride < 1) throw ValidationError("window stride must be >= 1");
    const int frames = clip.frames();
    if (frames < length) {
        throw TooShort("clip has " + std::to_string(frames) + " frames, window needs " +
                       std::to_string(length));
    }
    std::vector<MotionClip> out;
    for (int offset = 0; offset + length <= frames; offset += stride) {
        MotionClip w;
        w.skeleton = clip.skeleton;
        w.frame_rate = clip.frame_rate;
        w.positions = clip.positions.middleRows(offset, length);
        out.push_back(std::move(w));
    }
    return out;
}

namespace {

// Superposition of 2-4 seeded sinusoids, zero-centered.
struct Oscillator {
    struct Term {
        double amplitude;
        double frequency;
        double phase;
    };
    std::vector<Term> terms;

    // Total amplitude budget <= max_amplitude, frequencies <= 2 Hz.
    static Oscillator random(Rng& rng, double max_amplitude) {
        Oscillator osc;
        const int k = 2 + static_cast<int>(rng.uniform_int(3));
        std::vector<double> weights(k);
        double total = 0.0;
        for (double& w : weights) {
            w = 0.25 + 0.75 * rng.uniform01();
            total += w;
        }
        const double budget = max_amplitude * (0.2 + 0.8 * rng.uniform01());
        osc.terms.reserve(k);
        for (int i = 0; i < k; ++i) {
            Oscillator::Term t;
            t.amplitude = budget * weights[i] / total;
            t.frequency = 0.1 + 1.9 * rng.uniform01();
            t.phase = 2.0 * 3.14159265358979323846 * rng.uniform01();
            osc.terms.push_back(t);
        }
        return osc;
    }

    double value(double t) const {
        double v = 0.0;
        for (const Term& term : terms) {
            v += term.amplitude * std::sin(2.0 * 3.14159265358979323846 * term.frequency * t + term.phase);
        }
        return v;
    }
};

Eigen::Vector3d random_unit(Rng& rng) {
    Eigen::Vector3d v;
    double norm = 0.0;
    do {
        v = {rng.normal(), rng.normal(), rng.normal()};
        norm = v.norm();
    } while (norm < 1e-3);
    return v / norm;
}

}  // namespace

std::vector<MotionClip> synth_dataset(std::uint64_t seed, int n_clips, const Skeleton& skeleton,
                                      int frames, double frame_rate) {
    if (n_clips < 1) throw ValidationError("n_clips must be >= 1");
    if (frames < 1) throw ValidationError("frames must be >= 1");
    skeleton.validate();

    Rng rng(seed);
    const int joints = skeleton.joints();
    const auto order = skeleton.topological_order();
    const auto children = skeleton.bone_children();
    const int bones = static_cast<int>(children.size());

    // Seeded rest pose: one length and direction per bone, shared by all
    // clips of the dataset.
    std::vector<double> bone_length(bones);
    std::vector<Eigen::Vector3d> rest_direction(bones);
    std::vector<int> bone_of_joint(joints, -1);
    for (int b = 0; b < bones; ++b) {
        bone_length[b] = 0.1 + 0.4 * rng.uniform01();
        rest_direction[b] = random_unit(rng);
        bone_of_joint[children[b]] = b;
    }

    const double dt = 1.0 / frame_rate;
    std::vector<MotionClip> clips;
    clips.reserve(n_clips);

    for (int c = 0; c < n_clips; ++c) {
        // Root trajectory in meters; bone directions wobble around the rest
        // direction and are re-normalized, so bone lengths never change.
        Oscillator root[3];
        for (auto& osc : root) osc = Oscillator::random(rng, 0.3);
        std::vector<std::array<Oscillator, 3>> wobble(bones);
        for (auto& w : wobble) {
            for (auto& osc : w) osc = Oscillator::random(rng, 0.3);
        }

        MotionClip clip;
        clip.skeleton = skeleton;
        clip.frame_rate = frame_rate;
        clip.positions.resize(frames, 3 * joints);

        for (int f = 0; f < frames; ++f) {
            const double t = f * dt;
            for (int j : order) {
                if (skeleton.parents[j] == -1) {
                    clip.set_joint_position(
                        f, j, {root[0].value(t), root[1].value(t), root[2].value(t)});
                    continue;
                }
                const int b = bone_of_joint[j];
                Eigen::Vector3d dir = rest_direction[b];
                for (int axis = 0; axis < 3; ++axis) dir[axis] += wobble[b][axis].value(t);
                dir.normalize();
                clip.set_joint_position(
                    f, j, clip.joint_position(f, skeleton.parents[j]) + bone_length[b] * dir);
            }
        }
        clips.push_back(std::move(clip));
    }
    return clips;
}

}  // namespace fmd
