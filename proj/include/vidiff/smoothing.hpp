#pragma once

#include <cstdint>
#include <vector>

#include "vidiff/motion.hpp"
#include "vidiff/tensor.hpp"

namespace vidiff {

/// Binary per-frame foreground mask: 1 = foreground (kept as-is),
/// 0 = background (blended toward the warped first frame).
struct ForegroundMask {
    int h = 0;
    int w = 0;
    std::vector<uint8_t> m;

    ForegroundMask() = default;
    ForegroundMask(int height, int width, uint8_t fill = 0)
        : h(height), w(width), m(static_cast<size_t>(height) * width, fill) {}

    uint8_t at(int i, int j) const { return m[static_cast<size_t>(i) * w + j]; }
    uint8_t& at(int i, int j) { return m[static_cast<size_t>(i) * w + j]; }
};

/// Convex-combination weight and the timesteps at which smoothing runs
/// during sampling.
struct SmoothingParams {
    double alpha = 0.6;
    std::vector<int> apply_at;
};

struct DiskMaskParams {
    double center_x = 0.0;  // first (row) axis
    double center_y = 0.0;  // second (column) axis
    double radius = 0.0;
};

/// Per-frame disk masks whose center follows the translation flow. Pixels
/// within `radius` of the moved center (inclusive) are foreground; a zero
/// radius produces empty masks.
std::vector<ForegroundMask> disk_masks(int h, int w, const DiskMaskParams& params,
                                       const std::vector<Vec2>& flow);

/// Marks pixels whose channel-mean absolute value exceeds `level`.
std::vector<ForegroundMask> threshold_masks(const FrameSequence& frames, double level);

/// Background smoothing: warps frame 1 by `shift`, then takes the convex
/// combination alpha * warped + (1 - alpha) * x_k on background pixels;
/// foreground pixels pass x_k through untouched (bit-identical, as are the
/// alpha = 0 and alpha = 1 degenerate blends).
Tensor background_smooth(const Tensor& x_k, const Tensor& x_1, const ForegroundMask& mask,
                         Vec2 shift, double alpha, WarpMode mode);

}  // namespace vidiff
