#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vidiff/denoiser.hpp"
#include "vidiff/motion.hpp"
#include "vidiff/tensor.hpp"

namespace vidiff {

/// Temporal-consistency scores for one generated sequence.
struct MetricsReport {
    double inter_frame_mse = 0.0;          // mean MSE over consecutive frame pairs
    double warped_inconsistency = 0.0;     // mean_k MSE(W_k^-1(frame k), frame 1)
    double mean_displacement = 0.0;        // mean |argmax cross-correlation| over pairs
    std::vector<double> nearest_mode_distance;  // per frame, RMS distance to closest mean
    uint64_t seed = 0;
    std::string config_hash;
};

/// Computes the consistency metrics for clean frames. The warped metric
/// undoes each frame's flow translation in the configured warp mode before
/// comparing against frame 1. Mixture means, when given, provide the
/// nearest-mode distances.
MetricsReport consistency_metrics(const FrameSequence& frames, const MotionField& field,
                                  const std::optional<MixtureModel>& mixture = std::nullopt);

/// Displacement of `b` relative to `a`: the torus shift maximizing their
/// cross-correlation, components reported as minimal signed representatives.
std::pair<int, int> estimate_displacement(const Tensor& a, const Tensor& b);

}  // namespace vidiff
