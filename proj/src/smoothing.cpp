#include "vidiff/smoothing.hpp"

#include <cmath>
#include <stdexcept>

namespace vidiff {

std::vector<ForegroundMask> disk_masks(int h, int w, const DiskMaskParams& params,
                                       const std::vector<Vec2>& flow) {
    if (h < 1 || w < 1) {
        throw std::invalid_argument("disk_masks: grid dimensions must be positive");
    }
    if (params.radius < 0.0) {
        throw std::invalid_argument("disk_masks: radius must be >= 0");
    }
    std::vector<ForegroundMask> masks;
    masks.reserve(flow.size());
    const double r2 = params.radius * params.radius;
    for (const Vec2& shift : flow) {
        ForegroundMask mask(h, w);
        if (params.radius > 0.0) {
            const double cx = params.center_x + shift.x;
            const double cy = params.center_y + shift.y;
            for (int i = 0; i < h; ++i) {
                for (int j = 0; j < w; ++j) {
                    const double di = i - cx;
                    const double dj = j - cy;
                    if (di * di + dj * dj <= r2) {
                        mask.at(i, j) = 1;
                    }
                }
            }
        }
        masks.push_back(std::move(mask));
    }
    return masks;
}

std::vector<ForegroundMask> threshold_masks(const FrameSequence& frames, double level) {
    frames.validate();
    std::vector<ForegroundMask> masks;
    masks.reserve(frames.frames.size());
    for (const Tensor& f : frames.frames) {
        ForegroundMask mask(f.h, f.w);
        for (int i = 0; i < f.h; ++i) {
            for (int j = 0; j < f.w; ++j) {
                double acc = 0.0;
                for (int ch = 0; ch < f.c; ++ch) {
                    acc += std::abs(f.at(i, j, ch));
                }
                if (acc / f.c > level) {
                    mask.at(i, j) = 1;
                }
            }
        }
        masks.push_back(std::move(mask));
    }
    return masks;
}

Tensor background_smooth(const Tensor& x_k, const Tensor& x_1, const ForegroundMask& mask,
                         Vec2 shift, double alpha, WarpMode mode) {
    if (!x_k.same_shape(x_1)) {
        throw std::invalid_argument("background_smooth: frame shapes must match");
    }
    if (mask.h != x_k.h || mask.w != x_k.w) {
        throw std::invalid_argument("background_smooth: mask dims must match latent spatial dims");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("background_smooth: alpha must lie in [0, 1]");
    }

    if (alpha == 0.0) {
        return x_k;
    }
    const Tensor warped = warp_translate(x_1, shift, mode);

    Tensor out(x_k.h, x_k.w, x_k.c);
    for (int i = 0; i < x_k.h; ++i) {
        for (int j = 0; j < x_k.w; ++j) {
            for (int ch = 0; ch < x_k.c; ++ch) {
                const double cur = x_k.at(i, j, ch);
                const double ref = warped.at(i, j, ch);
                if (mask.at(i, j) || ref == cur) {
                    out.at(i, j, ch) = cur;
                } else if (alpha == 1.0) {
                    out.at(i, j, ch) = ref;
                } else {
                    out.at(i, j, ch) = alpha * ref + (1.0 - alpha) * cur;
                }
            }
        }
    }
    return out;
}

}  // namespace vidiff
