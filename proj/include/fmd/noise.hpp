#pragma once

#include <cstdint>
#include <string>

#include "fmd/motion.hpp"
#include "fmd/rng.hpp"

namespace fmd {

enum class NoiseKind { gaussian, salt_pepper, temporal };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

// Impulse amplitude of salt-and-pepper noise, meters.
inline constexpr double kSaltPepperAmplitude = 0.2;
// Standard deviation of the per-coordinate perturbation inside a temporal
// noise burst, meters.
inline constexpr double kTemporalSigma = 0.003;

// A degradation applied to joint positions. zeta is the intensity:
//   gaussian:    standard deviation in meters, >= 0
//   salt_pepper: total impulse probability in [0,1]
//   temporal:    number of corrupted consecutive frames, integer >= 0
struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double zeta = 0.0;
    std::uint64_t seed = 0;

    // Throws ValidationError when zeta is outside the per-kind domain.
    // Pass the clip's frame count to also check temporal zeta <= F.
    void validate(int frames = -1) const;
};

// Adds an independent Normal(0, zeta^2) draw to every coordinate.
MotionClip add_gaussian(const MotionClip& clip, double zeta, Rng& rng);

// Per coordinate: draw u ~ U(0,1); add -0.2 m if u <= zeta/2, +0.2 m if
// zeta/2 < u <= zeta, nothing otherwise.
MotionClip add_salt_pepper(const MotionClip& clip, double zeta, Rng& rng);

// Picks a uniform start r in {0..F-zeta} and adds Normal(0, kTemporalSigma^2)
// to every coordinate of the zeta consecutive frames starting there. All
// other frames are copied bit-identically.
MotionClip add_temporal(const MotionClip& clip, int zeta, Rng& rng);

// Validates the spec and dispatches with a fresh Rng(spec.seed).
MotionClip apply_noise(const MotionClip& clip, const NoiseSpec& spec);

}  // namespace fmd
