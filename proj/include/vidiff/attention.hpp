#pragma once

#include <vector>

#include "vidiff/tensor.hpp"

namespace vidiff {

/// Query/key/value features for one frame, tokens x channels.
struct FrameQKV {
    Mat q;
    Mat k;
    Mat v;
};

/// The three c x c projection matrices shared by all frames.
struct QKVProjection {
    Mat wq;
    Mat wk;
    Mat wv;
};

/// Flattens the spatial dims of a feature map to tokens (row-major) and
/// applies the linear projections: Q = xWq, K = xWk, V = xWv.
FrameQKV project_qkv(const Tensor& x, const QKVProjection& weights);

/// Token-matrix variant of project_qkv for features already flattened.
FrameQKV project_qkv_tokens(const Mat& tokens, const QKVProjection& weights);

/// Softmax(Q K^T / sqrt(c)) V with max-subtracted, row-stable softmax.
Mat self_attention(const Mat& q, const Mat& k, const Mat& v);

/// Cross-frame attention of each frame on the first:
/// output_k = Softmax(Q_k K_1^T / sqrt(c)) V_1. Keys and values of frames
/// 2..m are never read.
std::vector<Mat> cross_frame_attention(const std::vector<FrameQKV>& frames);

/// Same math as self_attention for tokens laid out on an h x w torus, but
/// each query enumerates keys in offset order relative to its own grid
/// position. The summation order is then invariant under wrap translation,
/// so the result commutes with torus shifts bit-exactly. Agrees with
/// self_attention up to floating-point reassociation.
Mat attention_wrap_ordered(const Mat& q, const Mat& k, const Mat& v, int h, int w);

}  // namespace vidiff
