#include "vidiff/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vidiff {

WarpMode warp_mode_from_string(const std::string& s) {
    if (s == "wrap") return WarpMode::wrap_integer;
    if (s == "bilinear") return WarpMode::clamp_bilinear;
    throw std::invalid_argument("unknown warp mode: " + s);
}

std::string to_string(WarpMode mode) {
    return mode == WarpMode::wrap_integer ? "wrap" : "bilinear";
}

void MotionField::validate() const {
    if (m < 1) {
        throw std::invalid_argument("MotionField: frame count must be >= 1");
    }
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("MotionField: lambda must be >= 0");
    }
}

std::vector<Vec2> translation_flow(const MotionField& field) {
    field.validate();
    std::vector<Vec2> flow(field.m);
    for (int k = 1; k <= field.m; ++k) {
        flow[k - 1] = (field.lambda * (k - 1)) * field.delta;
    }
    return flow;
}

namespace {

// Positive modulo for torus indexing.
int wrap_index(long long i, int n) {
    long long r = i % n;
    if (r < 0) r += n;
    return static_cast<int>(r);
}

Tensor warp_wrap(const Tensor& x, Vec2 shift) {
    const int si = wrap_index(std::llround(shift.x), x.h);
    const int sj = wrap_index(std::llround(shift.y), x.w);
    if (si == 0 && sj == 0) {
        return x;
    }
    Tensor out(x.h, x.w, x.c);
    for (int i = 0; i < x.h; ++i) {
        const int src_i = wrap_index(i - si, x.h);
        for (int j = 0; j < x.w; ++j) {
            const int src_j = wrap_index(j - sj, x.w);
            for (int ch = 0; ch < x.c; ++ch) {
                out.at(i, j, ch) = x.at(src_i, src_j, ch);
            }
        }
    }
    return out;
}

Tensor warp_bilinear(const Tensor& x, Vec2 shift) {
    Tensor out(x.h, x.w, x.c);
    for (int i = 0; i < x.h; ++i) {
        const double src_i = std::clamp(i - shift.x, 0.0, static_cast<double>(x.h - 1));
        const int i0 = static_cast<int>(std::floor(src_i));
        const int i1 = std::min(i0 + 1, x.h - 1);
        const double fi = src_i - i0;
        for (int j = 0; j < x.w; ++j) {
            const double src_j = std::clamp(j - shift.y, 0.0, static_cast<double>(x.w - 1));
            const int j0 = static_cast<int>(std::floor(src_j));
            const int j1 = std::min(j0 + 1, x.w - 1);
            const double fj = src_j - j0;
            for (int ch = 0; ch < x.c; ++ch) {
                const double top = (1.0 - fj) * x.at(i0, j0, ch) + fj * x.at(i0, j1, ch);
                const double bot = (1.0 - fj) * x.at(i1, j0, ch) + fj * x.at(i1, j1, ch);
                out.at(i, j, ch) = (1.0 - fi) * top + fi * bot;
            }
        }
    }
    return out;
}

}  // namespace

Tensor warp_translate(const Tensor& x, Vec2 shift, WarpMode mode) {
    if (!all_finite(x)) {
        throw std::invalid_argument("warp_translate: input must be finite");
    }
    return mode == WarpMode::wrap_integer ? warp_wrap(x, shift) : warp_bilinear(x, shift);
}

FrameSequence motion_latents(const Latent& x1_T, const TimeWindow& window,
                             const MotionField& field, const Denoiser& denoiser,
                             const NoiseSchedule& schedule, const Conditioning& cond,
                             const RngStream& rng) {
    field.validate();
    window.validate(schedule);
    if (x1_T.t != window.t_start) {
        throw std::invalid_argument("motion_latents: frame 1 latent must sit at T");
    }

    FrameSequence out;
    out.t = window.t_start;
    out.frames.push_back(x1_T.data);
    if (field.m == 1) {
        return out;
    }

    // Delta-t single DDIM backward steps: x^1_T -> x^1_{T'}.
    Latent mid = x1_T;
    for (int t = window.t_start; t > window.t_mid; --t) {
        const Tensor eps = denoiser.eval_frame(mid.data, t, cond);
        mid = ddim_step(mid, t, t - 1, eps, schedule);
    }

    const std::vector<Vec2> flow = translation_flow(field);
    for (int k = 2; k <= field.m; ++k) {
        const Tensor warped = warp_translate(mid.data, flow[k - 1], field.mode);
        RngStream frame_rng = rng.substream(static_cast<uint64_t>(k));
        Latent noised = ddpm_forward({warped, window.t_mid}, window.t_start, schedule, frame_rng);
        out.frames.push_back(std::move(noised.data));
    }
    return out;
}

}  // namespace vidiff
