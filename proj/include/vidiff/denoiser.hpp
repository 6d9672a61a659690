#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "vidiff/schedule.hpp"
#include "vidiff/tensor.hpp"

namespace vidiff {

enum class AttentionMode {
    per_frame_self,     // each frame attends to itself; frames stay independent
    cross_frame_first,  // every frame's queries attend to frame 1's keys/values
};

/// Opaque stand-in for the text prompt: a small class label, or empty for
/// unconditional generation.
struct Conditioning {
    std::optional<int> label;
};

/// Noise-prediction interface. Implementations are immutable after
/// construction and eval is pure, so concurrent calls are safe.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    /// Predicts the noise tensor for every frame of `x`, all at timestep `t`.
    /// With per_frame_self, frame k's output depends on frame k only.
    virtual FrameSequence eval(const FrameSequence& x, int t, const Conditioning& cond,
                               AttentionMode mode) const = 0;

    /// Single-frame convenience wrapper around eval().
    Tensor eval_frame(const Tensor& x, int t, const Conditioning& cond,
                      AttentionMode mode = AttentionMode::per_frame_self) const;
};

/// Weighted point-mass mixture standing in for the image distribution, so the
/// optimal noise prediction has a closed form.
struct MixtureModel {
    struct Component {
        double weight = 0.0;
        Tensor mean;
    };
    std::vector<Component> components;

    void validate() const;
};

/// Exact MMSE noise prediction for a point-mass mixture under the forward
/// marginal x_t | x_0 = mu_j ~ N(sqrt(ab_t) mu_j, (1 - ab_t) I):
/// responsibilities in log space, posterior mean x0_hat = sum r_j mu_j,
/// eps_hat = (x_t - sqrt(ab_t) x0_hat) / sqrt(1 - ab_t).
Tensor mixture_posterior_eps(const Tensor& x_t, int t, const MixtureModel& mixture,
                             const NoiseSchedule& schedule);

/// Adapter exposing the mixture oracle through the sequence interface.
/// Applies the oracle frame-wise and ignores the attention mode; the
/// conditioning label selects the mixture (empty label -> mixture 0).
class MixtureSequenceDenoiser final : public Denoiser {
public:
    explicit MixtureSequenceDenoiser(std::vector<MixtureModel> mixtures_by_label,
                                     const NoiseSchedule& schedule);

    FrameSequence eval(const FrameSequence& x, int t, const Conditioning& cond,
                       AttentionMode mode) const override;

    const MixtureModel& mixture(const Conditioning& cond) const;

private:
    std::vector<MixtureModel> mixtures_;
    NoiseSchedule schedule_;
};

/// Fixed-weight toy denoiser: per-pixel linear lift with an additive class
/// embedding, one attention block routed per AttentionMode, per-pixel head
/// back to latent channels. Shared weights and torus-canonical attention make
/// eval commute with wrap translations bit-exactly in per_frame_self mode.
/// Weights are drawn once from the seed and never trained.
class ToyAttentionDenoiser final : public Denoiser {
public:
    ToyAttentionDenoiser(uint64_t seed, int h, int w, int latent_channels,
                         int embed_channels, int vocab);

    FrameSequence eval(const FrameSequence& x, int t, const Conditioning& cond,
                       AttentionMode mode) const override;

    int vocab() const { return vocab_; }

private:
    int h_, w_, c_lat_, c_emb_, vocab_;
    Mat w_in_;                                // c_emb x c_lat
    Mat w_q_, w_k_, w_v_;                     // c_emb x c_emb
    Mat w_out_;                               // c_lat x c_emb
    std::vector<std::vector<double>> embed_;  // vocab x c_emb

    Mat lift(const Tensor& x, const Conditioning& cond) const;
};

std::unique_ptr<Denoiser> build_toy_attention_denoiser(uint64_t seed, int h, int w,
                                                       int latent_channels,
                                                       int embed_channels, int vocab);

}  // namespace vidiff
