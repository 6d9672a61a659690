#pragma once

#include <string>
#include <vector>

#include "vidiff/denoiser.hpp"
#include "vidiff/diffusion.hpp"
#include "vidiff/rng.hpp"
#include "vidiff/tensor.hpp"

namespace vidiff {

enum class WarpMode {
    wrap_integer,    // shift rounded to integers, torus permutation of entries
    clamp_bilinear,  // fractional shift, bilinear interpolation, edge clamp
};

WarpMode warp_mode_from_string(const std::string& s);
std::string to_string(WarpMode mode);

/// Constant-velocity translation field: frame k is displaced by
/// delta_k = lambda * (k - 1) * delta.
struct MotionField {
    double lambda = 1.0;
    Vec2 delta{1.0, 1.0};
    int m = 1;
    WarpMode mode = WarpMode::wrap_integer;

    void validate() const;
};

/// The per-frame translation vectors [delta_1 .. delta_m]; delta_1 = (0, 0).
std::vector<Vec2> translation_flow(const MotionField& field);

/// Translates a tensor by `shift`; positive components move content toward
/// increasing row/column index. Wrap mode reduces shifts modulo the grid.
Tensor warp_translate(const Tensor& x, Vec2 shift, WarpMode mode);

/// Motion-enriched latent codes: Delta-t DDIM backward steps on frame 1,
/// per-frame warp of the intermediate latent, then a DDPM forward jump back
/// to T for frames 2..m. Frame 1 of the output is the input, untouched.
/// Frame k's forward noise comes from rng.substream(k), so results do not
/// depend on loop order.
FrameSequence motion_latents(const Latent& x1_T, const TimeWindow& window,
                             const MotionField& field, const Denoiser& denoiser,
                             const NoiseSchedule& schedule, const Conditioning& cond,
                             const RngStream& rng);

}  // namespace vidiff
