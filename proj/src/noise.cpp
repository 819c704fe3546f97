#include "fmd/noise.hpp"

#include <cmath>

#include "fmd/errors.hpp"

namespace fmd {

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::salt_pepper: return "salt_pepper";
        case NoiseKind::temporal: return "temporal";
    }
    throw ValidationError("unknown noise kind");
}

NoiseKind noise_kind_from_string(const std::string& name) {
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "salt_pepper") return NoiseKind::salt_pepper;
    if (name == "temporal") return NoiseKind::temporal;
    throw ValidationError("unknown noise kind '" + name +
                          "' (expected gaussian, salt_pepper or temporal)");
}

void NoiseSpec::validate(int frames) const {
    switch (kind) {
        case NoiseKind::gaussian:
            if (!(zeta >= 0.0)) throw ValidationError("gaussian zeta must be >= 0");
            break;
        case NoiseKind::salt_pepper:
            if (!(zeta >= 0.0 && zeta <= 1.0)) {
                throw ValidationError("salt_pepper zeta must lie in [0,1]");
            }
            break;
        case NoiseKind::temporal:
            if (!(zeta >= 0.0) || zeta != std::floor(zeta)) {
                throw ValidationError("temporal zeta must be a non-negative integer");
            }
            if (frames >= 0 && zeta > frames) {
                throw ValidationError("temporal zeta exceeds the clip's frame count");
            }
            break;
    }
}

MotionClip add_gaussian(const MotionClip& clip, double zeta, Rng& rng) {
    if (!(zeta >= 0.0)) throw ValidationError("gaussian zeta must be >= 0");
    MotionClip out = clip;
    for (int f = 0; f < out.frames(); ++f) {
        for (int k = 0; k < out.positions.cols(); ++k) {
            out.positions(f, k) += zeta * rng.normal();
        }
    }
    return out;
}

MotionClip add_salt_pepper(const MotionClip& clip, double zeta, Rng& rng) {
    if (!(zeta >= 0.0 && zeta <= 1.0)) throw ValidationError("salt_pepper zeta must lie in [0,1]");
    MotionClip out = clip;
    for (int f = 0; f < out.frames(); ++f) {
        for (int k = 0; k < out.positions.cols(); ++k) {
            const double u = rng.uniform01();
            if (u <= zeta / 2.0) {
                out.positions(f, k) -= kSaltPepperAmplitude;
            } else if (u <= zeta) {
                out.positions(f, k) += kSaltPepperAmplitude;
            }
        }
    }
    return out;
}

MotionClip add_temporal(const MotionClip& clip, int zeta, Rng& rng) {
    const int frames = clip.frames();
    if (zeta < 0 || zeta > frames) {
        throw ValidationError("temporal zeta must lie in [0, frames]");
    }
    MotionClip out = clip;
    if (zeta == 0) return out;
    const int start = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(frames - zeta) + 1));
    for (int f = start; f < start + zeta; ++f) {
        for (int k = 0; k < out.positions.cols(); ++k) {
            out.positions(f, k) += kTemporalSigma * rng.normal();
        }
    }
    return out;
}

MotionClip apply_noise(const MotionClip& clip, const NoiseSpec& spec) {
    spec.validate(clip.frames());
    Rng rng(spec.seed);
    switch (spec.kind) {
        case NoiseKind::gaussian: return add_gaussian(clip, spec.zeta, rng);
        case NoiseKind::salt_pepper: return add_salt_pepper(clip, spec.zeta, rng);
        case NoiseKind::temporal: return add_temporal(clip, static_cast<int>(spec.zeta), rng);
    }
    throw ValidationError("unknown noise kind");
}

}  // namespace fmd
