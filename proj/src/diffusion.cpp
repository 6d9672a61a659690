#include "vidiff/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace vidiff {

Latent ddpm_forward(const Latent& x, int t_to, const NoiseSchedule& schedule, RngStream& rng) {
    const int t_from = x.t;
    if (t_to < t_from) {
        throw std::invalid_argument("ddpm_forward: t_to must be >= t_from (forward only)");
    }
    if (t_from < 0 || t_to > schedule.length()) {
        throw std::invalid_argument("ddpm_forward: timestep outside schedule");
    }
    if (t_to == t_from) {
        return x;
    }

    const double ratio = schedule.alpha_bar(t_to) / schedule.alpha_bar(t_from);
    const double keep = std::sqrt(ratio);
    const double noise = std::sqrt(1.0 - ratio);

    Latent out{Tensor(x.data.h, x.data.w, x.data.c), t_to};
    for (size_t i = 0; i < x.data.v.size(); ++i) {
        out.data.v[i] = keep * x.data.v[i] + noise * rng.gaussian();
    }
    return out;
}

Latent ddim_step(const Latent& x_t, int t, int t_prev, const Tensor& eps,
                 const NoiseSchedule& schedule) {
    if (t_prev >= t) {
        throw std::invalid_argument("ddim_step: t_prev must be < t");
    }
    if (t_prev < 0 || t > schedule.length()) {
        throw std::invalid_argument("ddim_step: timestep outside schedule");
    }
    if (x_t.t != t) {
        throw std::invalid_argument("ddim_step: latent is not at timestep t");
    }
    if (!eps.same_shape(x_t.data)) {
        throw std::invalid_argument("ddim_step: eps shape mismatch");
    }

    const double ab_t = schedule.alpha_bar(t);
    const double ab_prev = schedule.alpha_bar(t_prev);
    const double sqrt_ab_t = std::sqrt(ab_t);
    const double sig_t = std::sqrt(1.0 - ab_t);
    const double sqrt_ab_prev = std::sqrt(ab_prev);
    const double sig_prev = std::sqrt(1.0 - ab_prev);

    Latent out{Tensor(x_t.data.h, x_t.data.w, x_t.data.c), t_prev};
    for (size_t i = 0; i < x_t.data.v.size(); ++i) {
        const double x0_pred = (x_t.data.v[i] - sig_t * eps.v[i]) / sqrt_ab_t;
        out.data.v[i] = sqrt_ab_prev * x0_pred + sig_prev * eps.v[i];
    }
    return out;
}

namespace {

void check_strictly_descending(const std::vector<int>& idx) {
    for (size_t i = 1; i < idx.size(); ++i) {
        if (idx[i] >= idx[i - 1]) {
            throw std::invalid_argument("ddim_sample: step indices must be strictly descending");
        }
    }
}

}  // namespace

Latent ddim_sample(const Latent& x_start, const Denoiser& denoiser,
                   const NoiseSchedule& schedule, const std::vector<int>& step_indices,
                   const Conditioning& cond, AttentionMode mode) {
    if (step_indices.empty()) {
        return x_start;
    }
    check_strictly_descending(step_indices);
    if (step_indices.front() != x_start.t) {
        throw std::invalid_argument("ddim_sample: first step index must match the latent timestep");
    }
    if (step_indices.back() < 1) {
        throw std::invalid_argument("ddim_sample: step indices must stay >= 1");
    }

    Latent x = x_start;
    for (size_t i = 0; i < step_indices.size(); ++i) {
        const int t = step_indices[i];
        const int t_next = (i + 1 < step_indices.size()) ? step_indices[i + 1] : 0;
        const Tensor eps = denoiser.eval_frame(x.data, t, cond, mode);
        x = ddim_step(x, t, t_next, eps, schedule);
    }
    return x;
}

Latent ddim_invert(const Latent& x_0, const Denoiser& denoiser,
                   const NoiseSchedule& schedule, const std::vector<int>& step_indices,
                   const Conditioning& cond, AttentionMode mode) {
    if (step_indices.empty()) {
        return x_0;
    }
    for (size_t i = 1; i < step_indices.size(); ++i) {
        if (step_indices[i] <= step_indices[i - 1]) {
            throw std::invalid_argument("ddim_invert: step indices must be strictly ascending");
        }
    }
    if (x_0.t != 0) {
        throw std::invalid_argument("ddim_invert: input latent must be clean (t = 0)");
    }
    if (step_indices.front() < 1 || step_indices.back() > schedule.length()) {
        throw std::invalid_argument("ddim_invert: step index outside schedule");
    }

    Latent x = x_0;
    for (int t_target : step_indices) {
        const int t_cur = x.t;
        const Tensor eps = denoiser.eval_frame(x.data, t_target, cond, mode);

        const double ab_cur = schedule.alpha_bar(t_cur);
        const double ab_tgt = schedule.alpha_bar(t_target);
        const double sqrt_ab_cur = std::sqrt(ab_cur);
        const double sig_cur = std::sqrt(1.0 - ab_cur);
        const double sqrt_ab_tgt = std::sqrt(ab_tgt);
        const double sig_tgt = std::sqrt(1.0 - ab_tgt);

        Latent next{Tensor(x.data.h, x.data.w, x.data.c), t_target};
        for (size_t i = 0; i < x.data.v.size(); ++i) {
            const double x0_pred = (x.data.v[i] - sig_cur * eps.v[i]) / sqrt_ab_cur;
            next.data.v[i] = sqrt_ab_tgt * x0_pred + sig_tgt * eps.v[i];
        }
        x = std::move(next);
    }
    return x;
}

Tensor eps_from_mu(const Tensor& mu, const Latent& x_t, int t, const NoiseSchedule& schedule) {
    if (t < 1 || t > schedule.length()) {
        throw std::invalid_argument("eps_from_mu: timestep out of range");
    }
    if (!mu.same_shape(x_t.data)) {
        throw std::invalid_argument("eps_from_mu: shape mismatch");
    }

    const double beta = schedule.beta(t);
    const double sig = std::sqrt(1.0 - schedule.alpha_bar(t));
    const double sqrt_alpha = std::sqrt(1.0 - beta);
    const double scale = sig / beta;

    Tensor eps(mu.h, mu.w, mu.c);
    for (size_t i = 0; i < mu.v.size(); ++i) {
        eps.v[i] = (x_t.data.v[i] - sqrt_alpha * mu.v[i]) * scale;
    }
    return eps;
}

}  // namespace vidiff
