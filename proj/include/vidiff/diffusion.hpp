#pragma once

#include <vector>

#include "vidiff/denoiser.hpp"
#include "vidiff/rng.hpp"
#include "vidiff/schedule.hpp"
#include "vidiff/tensor.hpp"

namespace vidiff {

/// Single-shot DDPM noising jump from x's timestep to t_to, using the
/// closed-form marginal of the forward process:
///   x_to = sqrt(ab_to/ab_from) x + sqrt(1 - ab_to/ab_from) eps.
/// A zero-length jump returns the input unchanged and consumes no rng.
Latent ddpm_forward(const Latent& x, int t_to, const NoiseSchedule& schedule, RngStream& rng);

/// One deterministic DDIM step from t to t_prev given the noise prediction:
///   x_prev = sqrt(ab_prev) (x_t - sqrt(1-ab_t) eps) / sqrt(ab_t)
///          + sqrt(1-ab_prev) eps,   with ab_0 := 1.
Latent ddim_step(const Latent& x_t, int t, int t_prev, const Tensor& eps,
                 const NoiseSchedule& schedule);

/// Folds ddim_step over a strictly descending list of query timesteps,
/// asking the denoiser for eps at each one; the final step lands on t = 0.
Latent ddim_sample(const Latent& x_start, const Denoiser& denoiser,
                   const NoiseSchedule& schedule, const std::vector<int>& step_indices,
                   const Conditioning& cond,
                   AttentionMode mode = AttentionMode::per_frame_self);

/// DDIM recurrence run in reverse over a strictly ascending list of target
/// timesteps, reconstructing a latent code from clean data. The denoiser is
/// queried at each target timestep with the current latent (the standard
/// first-order inversion approximation).
Latent ddim_invert(const Latent& x_0, const Denoiser& denoiser,
                   const NoiseSchedule& schedule, const std::vector<int>& step_indices,
                   const Conditioning& cond,
                   AttentionMode mode = AttentionMode::per_frame_self);

/// Solves the DDPM posterior-mean relation
///   mu = (x_t - (beta_t / sqrt(1-ab_t)) eps) / sqrt(1-beta_t)
/// for eps.
Tensor eps_from_mu(const Tensor& mu, const Latent& x_t, int t, const NoiseSchedule& schedule);

}  // namespace vidiff
