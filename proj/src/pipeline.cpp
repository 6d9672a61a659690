#include "vidiff/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vidiff/diffusion.hpp"
#include "vidiff/image_io.hpp"
#include "vidiff/rng.hpp"

namespace vidiff {

namespace {

// Substream keys for the root rng; fixed so results never depend on
// evaluation order.
constexpr uint64_t kInitLatentKey = 1;
constexpr uint64_t kMotionKey = 2;
constexpr uint64_t kIidBaseKey = 100;

}  // namespace

void validate_config(const GenerationConfig& config) {
    if (config.frames < 1) throw std::invalid_argument("config: frames must be >= 1");
    if (config.height < 1 || config.width < 1 || config.channels < 1) {
        throw std::invalid_argument("config: latent shape must be positive");
    }
    if (config.steps < 1) throw std::invalid_argument("config: steps must be >= 1");
    if (config.t_mid < 1 || config.t_mid > config.t_start ||
        config.t_start > config.schedule_steps) {
        throw std::invalid_argument("config: need 1 <= t_mid <= t_start <= schedule_steps");
    }
    if (!(config.smooth_alpha >= 0.0 && config.smooth_alpha <= 1.0)) {
        throw std::invalid_argument("config: smooth_alpha must lie in [0, 1]");
    }
    if (config.smooth && config.mask_kind == MaskKind::files && config.mask_dir.empty()) {
        throw std::invalid_argument("config: mask_kind=files requires mask_dir");
    }
    if (config.denoiser == DenoiserKind::toy &&
        (config.toy_channels < 1 || config.toy_vocab < 1)) {
        throw std::invalid_argument("config: toy denoiser needs positive channels and vocab");
    }
    if (config.cond_label.has_value()) {
        const int label = *config.cond_label;
        const int vocab = config.denoiser == DenoiserKind::toy
                              ? config.toy_vocab
                              : static_cast<int>(std::max<size_t>(config.mixtures.size(), 1));
        if (label < 0 || label >= vocab) {
            throw std::invalid_argument("config: cond_label outside configured vocabulary");
        }
    }
}

NoiseSchedule make_schedule(const GenerationConfig& config) {
    return build_schedule(config.schedule_steps, config.beta_start, config.beta_end,
                          config.schedule_kind);
}

MotionField make_motion_field(const GenerationConfig& config) {
    MotionField field;
    field.lambda = config.lambda;
    field.delta = {config.delta_x, config.delta_y};
    field.m = config.frames;
    field.mode = config.warp_mode;
    return field;
}

MixtureModel build_mixture(const std::vector<MixtureComponentSpec>& specs, int h, int w, int c) {
    MixtureModel mix;
    for (const MixtureComponentSpec& spec : specs) {
        Tensor mean(h, w, c);
        if (spec.kind == "fill") {
            std::fill(mean.v.begin(), mean.v.end(), spec.fill);
        } else if (spec.kind == "values") {
            if (static_cast<int>(spec.values.size()) != mean.numel()) {
                throw std::invalid_argument("mixture component: values size must equal h*w*c");
            }
            mean.v = spec.values;
        } else if (spec.kind == "blob") {
            const double inv = 1.0 / (2.0 * spec.blob_sigma * spec.blob_sigma);
            for (int i = 0; i < h; ++i) {
                for (int j = 0; j < w; ++j) {
                    const double di = i - spec.blob_center_x;
                    const double dj = j - spec.blob_center_y;
                    const double g = spec.blob_amp * std::exp(-(di * di + dj * dj) * inv);
                    for (int ch = 0; ch < c; ++ch) mean.at(i, j, ch) = g;
                }
            }
        } else {
            throw std::invalid_argument("mixture component: unknown kind " + spec.kind);
        }
        mix.components.push_back({spec.weight, std::move(mean)});
    }
    mix.validate();
    return mix;
}

std::vector<MixtureModel> config_mixtures(const GenerationConfig& config) {
    std::vector<std::vector<MixtureComponentSpec>> specs = config.mixtures;
    if (specs.empty()) {
        // Default: two well-separated constant modes.
        MixtureComponentSpec pos;
        pos.weight = 0.5;
        pos.fill = 2.0;
        MixtureComponentSpec neg;
        neg.weight = 0.5;
        neg.fill = -2.0;
        specs.push_back({pos, neg});
    }
    std::vector<MixtureModel> mixtures;
    mixtures.reserve(specs.size());
    for (const auto& label_specs : specs) {
        mixtures.push_back(
            build_mixture(label_specs, config.height, config.width, config.channels));
    }
    return mixtures;
}

std::unique_ptr<Denoiser> make_denoiser(const GenerationConfig& config,
                                        const NoiseSchedule& schedule) {
    if (config.denoiser == DenoiserKind::toy) {
        return build_toy_attention_denoiser(config.toy_weight_seed, config.height, config.width,
                                            config.channels, config.toy_channels,
                                            config.toy_vocab);
    }
    return std::make_unique<MixtureSequenceDenoiser>(config_mixtures(config), schedule);
}

namespace {

std::vector<ForegroundMask> make_masks(const GenerationConfig& config,
                                       const FrameSequence& current,
                                       const std::vector<Vec2>& flow) {
    switch (config.mask_kind) {
        case MaskKind::disk: {
            DiskMaskParams params;
            params.center_x =
                config.mask_center_x >= 0.0 ? config.mask_center_x : (config.height - 1) / 2.0;
            params.center_y =
                config.mask_center_y >= 0.0 ? config.mask_center_y : (config.width - 1) / 2.0;
            params.radius =
                config.mask_radius >= 0.0 ? config.mask_radius
                                          : std::min(config.height, config.width) / 4.0;
            return disk_masks(config.height, config.width, params, flow);
        }
        case MaskKind::threshold:
            return threshold_masks(current, config.mask_threshold);
        case MaskKind::files:
            return read_mask_directory(config.mask_dir, config.frames, config.height,
                                       config.width);
    }
    throw std::invalid_argument("config: unknown mask kind");
}

void smooth_sequence(const GenerationConfig& config, FrameSequence& seq,
                     const std::vector<Vec2>& flow) {
    const std::vector<ForegroundMask> masks = make_masks(config, seq, flow);
    const Tensor frame1 = seq.frames.front();
    for (int k = 0; k < seq.m(); ++k) {
        seq.frames[k] = background_smooth(seq.frames[k], frame1, masks[k], flow[k],
                                          config.smooth_alpha, config.warp_mode);
    }
}

}  // namespace

GenerationResult generate_video(const GenerationConfig& config) {
    validate_config(config);

    const NoiseSchedule schedule = make_schedule(config);
    const TimeWindow window{config.t_start, config.t_mid};
    const MotionField field = make_motion_field(config);
    const Conditioning cond{config.cond_label};
    const std::unique_ptr<Denoiser> denoiser = make_denoiser(config, schedule);
    const std::vector<Vec2> flow = translation_flow(field);

    RngStream root(config.seed);

    // Starting latents at T.
    FrameSequence seq;
    seq.t = config.t_start;
    if (config.motion) {
        RngStream init = root.substream(kInitLatentKey);
        const Latent x1{init.gaussian_tensor(config.height, config.width, config.channels),
                        config.t_start};
        seq = motion_latents(x1, window, field, *denoiser, schedule, cond,
                             root.substream(kMotionKey));
    } else {
        for (int k = 1; k <= config.frames; ++k) {
            RngStream frame_rng = root.substream(kIidBaseKey + static_cast<uint64_t>(k));
            seq.frames.push_back(
                frame_rng.gaussian_tensor(config.height, config.width, config.channels));
        }
    }

    const std::vector<int> grid = make_step_grid(config.t_start, config.steps);

    // Timesteps at which background smoothing runs: every grid point, or
    // once at the first grid point at or below the configured timestep.
    SmoothingParams smoothing;
    smoothing.alpha = config.smooth_alpha;
    if (config.smooth) {
        const int target = config.smooth_timestep >= 0 ? config.smooth_timestep : config.t_mid;
        if (config.smooth_trigger == SmoothTrigger::every_step) {
            smoothing.apply_at = grid;
        } else {
            for (int t : grid) {
                if (t <= target) {
                    smoothing.apply_at.push_back(t);
                    break;
                }
            }
        }
    }

    GenerationResult result;
    result.trace.reserve(grid.size() * static_cast<size_t>(config.frames));

    for (size_t i = 0; i < grid.size(); ++i) {
        const int t = grid[i];
        const int t_next = (i + 1 < grid.size()) ? grid[i + 1] : 0;
        try {
            if (std::find(smoothing.apply_at.begin(), smoothing.apply_at.end(), t) !=
                smoothing.apply_at.end()) {
                smooth_sequence(config, seq, flow);
            }

            const FrameSequence eps = denoiser->eval(seq, t, cond, config.attn);

            FrameSequence next;
            next.t = t_next;
            next.frames.reserve(seq.frames.size());
            for (int k = 0; k < seq.m(); ++k) {
                Latent stepped =
                    ddim_step({seq.frames[k], t}, t, t_next, eps.frames[k], schedule);
                result.trace.push_back({static_cast<int>(i), t, t_next, k + 1,
                                        l2_norm(eps.frames[k]), l2_norm(stepped.data)});
                next.frames.push_back(std::move(stepped.data));
            }
            seq = std::move(next);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("generate_video: step t=" + std::to_string(t) + ": " +
                                        e.what());
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("generate_video: step t=" + std::to_string(t) + ": " +
                                     e.what());
        }
    }

    result.frames = std::move(seq);
    return result;
}

std::vector<AblationVariant> ablate(const GenerationConfig& config) {
    validate_config(config);
    const std::optional<MixtureModel> scoring_mixture =
        config.denoiser == DenoiserKind::mixture
            ? std::optional<MixtureModel>(config_mixtures(config)[config.cond_label.value_or(0)])
            : std::nullopt;

    struct Cell {
        const char* name;
        bool motion;
        bool cross;
    };
    // Row order mirrors the ablation figure: the naive baseline first, the
    // full method last.
    const Cell cells[] = {
        {"no_motion_self_attention", false, false},
        {"motion_self_attention", true, false},
        {"no_motion_cross_frame_attention", false, true},
        {"motion_cross_frame_attention", true, true},
    };

    std::vector<AblationVariant> variants;
    variants.reserve(4);
    for (const Cell& cell : cells) {
        GenerationConfig variant_config = config;
        variant_config.motion = cell.motion;
        variant_config.attn =
            cell.cross ? AttentionMode::cross_frame_first : AttentionMode::per_frame_self;

        const GenerationResult result = generate_video(variant_config);
        AblationVariant variant;
        variant.name = cell.name;
        variant.motion = cell.motion;
        variant.cross_frame_attention = cell.cross;
        variant.metrics =
            consistency_metrics(result.frames, make_motion_field(config), scoring_mixture);
        variant.metrics.seed = config.seed;
        variants.push_back(std::move(variant));
    }
    return variants;
}

}  // namespace vidiff
