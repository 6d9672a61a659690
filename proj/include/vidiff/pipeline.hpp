#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vidiff/denoiser.hpp"
#include "vidiff/metrics.hpp"
#include "vidiff/motion.hpp"
#include "vidiff/schedule.hpp"
#include "vidiff/smoothing.hpp"
#include "vidiff/tensor.hpp"

namespace vidiff {

enum class DenoiserKind { toy, mixture };
enum class MaskKind { disk, threshold, files };
enum class SmoothTrigger { once, every_step };

/// One mixture component as configured: a constant fill, explicit values,
/// or a gaussian blob bump.
struct MixtureComponentSpec {
    double weight = 0.0;
    std::string kind = "fill";  // fill | values | blob
    double fill = 0.0;
    std::vector<double> values;
    double blob_center_x = 0.0;
    double blob_center_y = 0.0;
    double blob_sigma = 2.0;
    double blob_amp = 1.0;
};

/// Flat experiment configuration; keys mirror the CLI flags and the JSON
/// config file one to one.
struct GenerationConfig {
    int frames = 8;
    int height = 16;
    int width = 16;
    int channels = 2;

    int schedule_steps = 1000;
    ScheduleKind schedule_kind = ScheduleKind::scaled_linear;
    double beta_start = 0.00085;
    double beta_end = 0.012;

    int t_start = 941;  // T
    int t_mid = 881;    // T'

    bool motion = true;
    double lambda = 1.0;
    double delta_x = 1.0;
    double delta_y = 1.0;
    WarpMode warp_mode = WarpMode::wrap_integer;

    AttentionMode attn = AttentionMode::cross_frame_first;

    bool smooth = false;
    double smooth_alpha = 0.6;
    SmoothTrigger smooth_trigger = SmoothTrigger::once;
    int smooth_timestep = -1;  // -1: use t_mid
    MaskKind mask_kind = MaskKind::disk;
    double mask_center_x = -1.0;  // -1: grid center
    double mask_center_y = -1.0;
    double mask_radius = -1.0;  // -1: min(h, w) / 4
    double mask_threshold = 1.0;
    std::string mask_dir;

    DenoiserKind denoiser = DenoiserKind::toy;
    int toy_channels = 8;
    int toy_vocab = 4;
    uint64_t toy_weight_seed = 77;
    std::vector<std::vector<MixtureComponentSpec>> mixtures;  // per label; empty: default
    std::optional<int> cond_label;

    int steps = 50;
    uint64_t seed = 0;
};

void validate_config(const GenerationConfig& config);

NoiseSchedule make_schedule(const GenerationConfig& config);
MotionField make_motion_field(const GenerationConfig& config);

/// Materializes one mixture from its component specs at the latent shape.
MixtureModel build_mixture(const std::vector<MixtureComponentSpec>& specs, int h, int w, int c);

/// All configured mixtures by label (a default two-mode mixture when the
/// config specifies none).
std::vector<MixtureModel> config_mixtures(const GenerationConfig& config);

std::unique_ptr<Denoiser> make_denoiser(const GenerationConfig& config,
                                        const NoiseSchedule& schedule);

struct StepTrace {
    int step = 0;
    int t_from = 0;
    int t_to = 0;
    int frame = 0;
    double eps_norm = 0.0;
    double x_norm = 0.0;
};

struct GenerationResult {
    FrameSequence frames;  // clean latents at t = 0
    std::vector<StepTrace> trace;
};

/// End-to-end generation: sample or construct the starting latents (motion
/// dynamics when enabled), denoise all frames jointly with DDIM routing the
/// attention per config, optionally background-smooth at the configured
/// timesteps, and return clean frames plus the per-step trace.
GenerationResult generate_video(const GenerationConfig& config);

struct AblationVariant {
    std::string name;
    bool motion = false;
    bool cross_frame_attention = false;
    MetricsReport metrics;
};

/// The 2x2 ablation grid {motion on/off} x {cross-frame attention on/off}
/// under one shared seed; motion off falls back to i.i.d. starting latents.
std::vector<AblationVariant> ablate(const GenerationConfig& config);

}  // namespace vidiff
