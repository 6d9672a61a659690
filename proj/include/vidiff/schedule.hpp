#pragma once

#include <string>
#include <vector>

namespace vidiff {

enum class ScheduleKind {
    linear,         // beta interpolated linearly
    scaled_linear,  // sqrt(beta) interpolated linearly (Stable Diffusion convention)
};

/// Beta schedule plus cumulative signal-retention factors.
///
/// Timesteps are 1-based: t in {1..N}. alpha_bar(t) is the running product
/// prod_{i<=t}(1 - beta_i), with the convention alpha_bar(0) = 1 so t = 0 is
/// the clean-data boundary.
struct NoiseSchedule {
    std::vector<double> betas;       // betas[t-1]
    std::vector<double> alpha_bars;  // alpha_bars[t-1]

    int length() const { return static_cast<int>(betas.size()); }

    double beta(int t) const;       // t in [1..N]
    double alpha_bar(int t) const;  // t in [0..N]
};

NoiseSchedule build_schedule(int n, double beta_start, double beta_end, ScheduleKind kind);

ScheduleKind schedule_kind_from_string(const std::string& s);
std::string to_string(ScheduleKind kind);

/// Sampling window [T', T] inside a schedule: delta_t = T - T' DDIM backward /
/// DDPM forward steps are taken between them when building motion latents.
struct TimeWindow {
    int t_start = 0;  // T
    int t_mid = 0;    // T'

    int delta() const { return t_start - t_mid; }

    void validate(const NoiseSchedule& schedule) const;
};

/// Descending DDIM query timesteps: `steps` indices uniformly strided over
/// (0, t_start], first entry exactly t_start. The terminal step to 0 is
/// implicit. Duplicates from coarse grids on short windows are removed.
std::vector<int> make_step_grid(int t_start, int steps);

}  // namespace vidiff
