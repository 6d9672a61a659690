#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vidiff {

/// Dense real tensor of shape height x width x channels, row-major with
/// channels innermost: index = (i * w + j) * c + ch.
///
/// Spatial convention used throughout the project: the first axis (i) is the
/// row axis, the second (j) the column axis. Token flattening for attention
/// is row-major over (i, j).
struct Tensor {
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int height, int width, int channels, double fill = 0.0)
        : h(height), w(width), c(channels) {
        if (height < 1 || width < 1 || channels < 1) {
            throw std::invalid_argument("Tensor: dimensions must be positive");
        }
        v.assign(static_cast<size_t>(height) * width * channels, fill);
    }

    double& at(int i, int j, int ch) {
        return v[(static_cast<size_t>(i) * w + j) * c + ch];
    }
    double at(int i, int j, int ch) const {
        return v[(static_cast<size_t>(i) * w + j) * c + ch];
    }

    int numel() const { return h * w * c; }
    int tokens() const { return h * w; }

    bool same_shape(const Tensor& o) const {
        return h == o.h && w == o.w && c == o.c;
    }
};

/// 2-vector for translations. `x` displaces the first (row) axis toward
/// increasing index ("down"), `y` the second (column) axis ("right").
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

/// Latent tensor tagged with its diffusion timestep (0 = clean data).
struct Latent {
    Tensor data;
    int t = 0;
};

/// m latent frames sharing one shape and one timestep.
struct FrameSequence {
    std::vector<Tensor> frames;
    int t = 0;

    int m() const { return static_cast<int>(frames.size()); }

    void validate() const {
        if (frames.empty()) {
            throw std::invalid_argument("FrameSequence: at least one frame required");
        }
        for (const Tensor& f : frames) {
            if (!f.same_shape(frames.front())) {
                throw std::invalid_argument("FrameSequence: frames must share one shape");
            }
        }
    }
};

/// Small dense matrix, row-major. Used for attention tensors (tokens x c)
/// and projection weights (c x c).
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int cc, double fill = 0.0) : rows(r), cols(cc) {
        if (r < 1 || cc < 1) {
            throw std::invalid_argument("Mat: dimensions must be positive");
        }
        a.assign(static_cast<size_t>(r) * cc, fill);
    }

    double& at(int r, int cc) { return a[static_cast<size_t>(r) * cols + cc]; }
    double at(int r, int cc) const { return a[static_cast<size_t>(r) * cols + cc]; }
};

inline bool all_finite(const Tensor& t) {
    for (double x : t.v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline double l2_norm(const Tensor& t) {
    double s = 0.0;
    for (double x : t.v) s += x * x;
    return std::sqrt(s);
}

/// Relative L2 distance ||a - b|| / max(||b||, eps).
inline double rel_l2_diff(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("rel_l2_diff: shape mismatch");
    }
    double num = 0.0;
    double den = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        num += d * d;
        den += b.v[i] * b.v[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

/// Root-mean-square distance between two same-shaped tensors.
inline double rms_dist(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("rms_dist: shape mismatch");
    }
    double s = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.v.size()));
}

/// Mean squared per-element difference.
inline double mse(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("mse: shape mismatch");
    }
    double s = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        s += d * d;
    }
    return s / static_cast<double>(a.v.size());
}

}  // namespace vidiff
