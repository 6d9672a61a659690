#include "vidiff/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "vidiff/config.hpp"
#include "vidiff/diffusion.hpp"
#include "vidiff/image_io.hpp"
#include "vidiff/metrics.hpp"
#include "vidiff/pipeline.hpp"
#include "vidiff/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vidiff {

namespace {

// CLI flag values; only flags the user actually passed override the config.
struct Overrides {
    std::optional<std::string> config_path;
    std::optional<uint64_t> seed;
    std::optional<int> frames;
    std::optional<double> lambda;
    std::optional<double> delta_x;
    std::optional<double> delta_y;
    std::optional<int> dt;
    std::optional<int> t_start;
    std::optional<int> t_mid;
    std::optional<double> smooth_alpha;
    std::optional<std::string> attn;
    std::optional<int> steps;
    std::optional<std::string> out;
    std::optional<std::string> warp;
    std::optional<std::string> denoiser;
    std::optional<std::string> format;
    std::optional<int> height;
    std::optional<int> width;
    std::optional<int> channels;
    std::optional<int> label;
    bool no_smooth = false;
    bool smooth_every_step = false;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
    cmd->add_option("--seed", o.seed, "Root seed for all random streams");
    cmd->add_option("--frames", o.frames, "Number of frames m");
    cmd->add_option("--lambda", o.lambda, "Global motion gain");
    cmd->add_option("--delta-x", o.delta_x, "Per-frame translation, row axis");
    cmd->add_option("--delta-y", o.delta_y, "Per-frame translation, column axis");
    cmd->add_option("--dt", o.dt, "Backward/forward step count T - T'");
    cmd->add_option("--t-start", o.t_start, "Sampling start timestep T");
    cmd->add_option("--t-mid", o.t_mid, "Intermediate timestep T'");
    cmd->add_option("--smooth-alpha", o.smooth_alpha,
                    "Background smoothing weight (enables smoothing)");
    cmd->add_option("--attn", o.attn, "Attention routing")
        ->check(CLI::IsMember({"self", "cross"}));
    cmd->add_option("--steps", o.steps, "DDIM grid size");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--warp", o.warp, "Warp mode")->check(CLI::IsMember({"wrap", "bilinear"}));
    cmd->add_option("--denoiser", o.denoiser, "Denoiser backend")
        ->check(CLI::IsMember({"toy", "mixture"}));
    cmd->add_option("--format", o.format, "Frame file format")
        ->check(CLI::IsMember({"pgm", "png"}));
    cmd->add_option("--height", o.height, "Latent height");
    cmd->add_option("--width", o.width, "Latent width");
    cmd->add_option("--channels", o.channels, "Latent channels");
    cmd->add_option("--label", o.label, "Conditioning class label");
    cmd->add_flag("--no-smooth", o.no_smooth, "Disable background smoothing");
    cmd->add_flag("--smooth-every-step", o.smooth_every_step,
                  "Apply background smoothing at every sampling step");
}

GenerationConfig build_config(const Overrides& o) {
    GenerationConfig c;
    if (o.config_path) c = load_config_file(*o.config_path);

    if (o.seed) c.seed = *o.seed;
    if (o.frames) c.frames = *o.frames;
    if (o.lambda) c.lambda = *o.lambda;
    if (o.delta_x) c.delta_x = *o.delta_x;
    if (o.delta_y) c.delta_y = *o.delta_y;
    if (o.t_start) c.t_start = *o.t_start;
    if (o.t_mid) c.t_mid = *o.t_mid;
    if (o.dt) {
        if (*o.dt < 0) throw std::invalid_argument("--dt must be >= 0");
        if (o.t_mid) {
            if (c.t_start - c.t_mid != *o.dt) {
                throw std::invalid_argument("--dt disagrees with --t-start/--t-mid");
            }
        } else {
            c.t_mid = c.t_start - *o.dt;
        }
    }
    if (o.smooth_alpha) {
        c.smooth = true;
        c.smooth_alpha = *o.smooth_alpha;
    }
    if (o.no_smooth) c.smooth = false;
    if (o.smooth_every_step) c.smooth_trigger = SmoothTrigger::every_step;
    if (o.attn) c.attn = *o.attn == "self" ? AttentionMode::per_frame_self
                                           : AttentionMode::cross_frame_first;
    if (o.steps) c.steps = *o.steps;
    if (o.warp) c.warp_mode = warp_mode_from_string(*o.warp);
    if (o.denoiser) c.denoiser = *o.denoiser == "toy" ? DenoiserKind::toy : DenoiserKind::mixture;
    if (o.height) c.height = *o.height;
    if (o.width) c.width = *o.width;
    if (o.channels) c.channels = *o.channels;
    if (o.label) c.cond_label = *o.label;
    return c;
}

json variant_record(const std::string& name, bool motion, bool cross,
                    const MetricsReport& metrics) {
    json rec;
    rec["name"] = name;
    rec["motion"] = motion;
    rec["cross_frame_attention"] = cross;
    rec["inter_frame_mse"] = metrics.inter_frame_mse;
    rec["warped_inconsistency"] = metrics.warped_inconsistency;
    rec["mean_displacement"] = metrics.mean_displacement;
    rec["nearest_mode_distance"] = metrics.nearest_mode_distance;
    return rec;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_metrics_file(const std::string& directory, const std::string& command,
                        const GenerationConfig& config, const std::vector<json>& variants) {
    json j;
    j["schema"] = "vidiff.metrics.v1";
    j["command"] = command;
    j["seed"] = config.seed;
    j["config_hash"] = config_hash(config);
    j["variants"] = variants;
    write_json_file((fs::path(directory) / "metrics.json").string(), j);
}

void write_trace_file(const std::string& directory, const std::vector<StepTrace>& trace) {
    json records = json::array();
    for (const StepTrace& r : trace) {
        records.push_back({r.step, r.t_from, r.t_to, r.frame, r.eps_norm, r.x_norm});
    }
    json j;
    j["schema"] = "vidiff.trace.v1";
    j["columns"] = {"step", "t_from", "t_to", "frame", "eps_norm", "x_norm"};
    j["records"] = records;
    write_json_file((fs::path(directory) / "trace.json").string(), j);
}

std::optional<MixtureModel> scoring_mixture(const GenerationConfig& config) {
    if (config.denoiser != DenoiserKind::mixture) return std::nullopt;
    return config_mixtures(config)[config.cond_label.value_or(0)];
}

int cmd_generate(const Overrides& o) {
    GenerationConfig config = build_config(o);
    const std::string out_dir = o.out.value_or("out");
    const FrameFormat format =
        o.format ? frame_format_from_string(*o.format) : FrameFormat::pgm;

    const GenerationResult result = generate_video(config);

    MetricsReport metrics =
        consistency_metrics(result.frames, make_motion_field(config), scoring_mixture(config));
    metrics.seed = config.seed;
    metrics.config_hash = config_hash(config);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + out_dir);

    const std::vector<std::string> files = write_frames(result.frames, out_dir, format);
    write_metrics_file(out_dir, "generate",
                       config, {variant_record("generate", config.motion,
                                               config.attn == AttentionMode::cross_frame_first,
                                               metrics)});
    write_trace_file(out_dir, result.trace);
    write_json_file((fs::path(out_dir) / "config.json").string(), config_to_json(config));

    std::cout << "wrote " << files.size() << " frames to " << out_dir << "\n"
              << "inter_frame_mse      " << metrics.inter_frame_mse << "\n"
              << "warped_inconsistency " << metrics.warped_inconsistency << "\n"
              << "mean_displacement    " << metrics.mean_displacement << "\n"
              << "config_hash          " << metrics.config_hash << "\n";
    return 0;
}

int cmd_ablate(const Overrides& o) {
    GenerationConfig config = build_config(o);
    const std::vector<AblationVariant> variants = ablate(config);

    std::cout << "variant                            inter_frame_mse  warped_inconsistency\n";
    std::vector<json> records;
    for (const AblationVariant& v : variants) {
        std::printf("%-34s %15.6f %21.6f\n", v.name.c_str(), v.metrics.inter_frame_mse,
                    v.metrics.warped_inconsistency);
        records.push_back(
            variant_record(v.name, v.motion, v.cross_frame_attention, v.metrics));
    }
    if (o.out) {
        std::error_code ec;
        fs::create_directories(*o.out, ec);
        if (ec) throw std::runtime_error("cannot create output directory: " + *o.out);
        write_metrics_file(*o.out, "ablate", config, records);
    }
    return 0;
}

int cmd_invert(const Overrides& o) {
    GenerationConfig config = build_config(o);
    config.denoiser = DenoiserKind::mixture;
    validate_config(config);

    const NoiseSchedule schedule = make_schedule(config);

    // Default oracle for the report: a dense lattice of constant fills. Its
    // posterior stays smooth at every queried noise level, so the round-trip
    // error reflects grid resolution instead of mode collapse.
    std::vector<MixtureModel> mixtures;
    if (config.mixtures.empty()) {
        MixtureModel lattice;
        const int half = 64;
        for (int k = -half; k <= half; ++k) {
            lattice.components.push_back(
                {1.0 / (2 * half + 1),
                 Tensor(config.height, config.width, config.channels, k * 0.00125)});
        }
        mixtures.push_back(std::move(lattice));
    } else {
        mixtures = config_mixtures(config);
    }
    MixtureSequenceDenoiser denoiser(mixtures, schedule);
    const Conditioning cond{config.cond_label};

    // Clean input: a seeded off-lattice constant fill.
    RngStream rng = RngStream(config.seed).substream(3);
    const double fill = (rng.uniform() * 2.0 - 1.0) * 0.06;
    const Latent x0{Tensor(config.height, config.width, config.channels, fill), 0};

    std::cout << "steps  relative_l2\n";
    json rows = json::array();
    for (int steps : {25, 50, config.steps}) {
        std::vector<int> grid = make_step_grid(config.t_start, steps);
        std::vector<int> up(grid.rbegin(), grid.rend());
        const Latent inverted = ddim_invert(x0, denoiser, schedule, up, cond);
        const Latent recon = ddim_sample(inverted, denoiser, schedule, grid, cond);
        const double err = rel_l2_diff(recon.data, x0.data);
        std::printf("%5d  %.3e\n", steps, err);
        rows.push_back({{"steps", steps}, {"relative_l2", err}});
    }
    if (o.out) {
        std::error_code ec;
        fs::create_directories(*o.out, ec);
        if (ec) throw std::runtime_error("cannot create output directory: " + *o.out);
        json j;
        j["schema"] = "vidiff.inversion.v1";
        j["seed"] = config.seed;
        j["config_hash"] = config_hash(config);
        j["roundtrip"] = rows;
        write_json_file((fs::path(*o.out) / "inversion.json").string(), j);
    }
    return 0;
}

int cmd_metrics(const Overrides& o, const std::string& dir) {
    GenerationConfig config = build_config(o);
    const FrameSequence frames = read_frame_directory(dir);
    config.frames = frames.m();

    MetricsReport metrics = consistency_metrics(frames, make_motion_field(config));
    metrics.seed = config.seed;
    metrics.config_hash = config_hash(config);

    std::cout << "frames               " << frames.m() << "\n"
              << "inter_frame_mse      " << metrics.inter_frame_mse << "\n"
              << "warped_inconsistency " << metrics.warped_inconsistency << "\n"
              << "mean_displacement    " << metrics.mean_displacement << "\n";
    if (o.out) {
        std::error_code ec;
        fs::create_directories(*o.out, ec);
        if (ec) throw std::runtime_error("cannot create output directory: " + *o.out);
        write_metrics_file(*o.out, "metrics", config,
                           {variant_record("scored", config.motion,
                                           config.attn == AttentionMode::cross_frame_first,
                                           metrics)});
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"vidiff: training-free toy video diffusion with motion-enriched latents,\n"
                 "cross-frame attention, and background smoothing"};
    app.require_subcommand(1);

    Overrides gen_o, abl_o, inv_o, met_o;
    std::string metrics_dir;

    CLI::App* gen = app.add_subcommand("generate", "Run the full video generation pipeline");
    add_common_options(gen, gen_o);

    CLI::App* abl = app.add_subcommand("ablate", "Run the 2x2 motion x attention ablation grid");
    add_common_options(abl, abl_o);

    CLI::App* inv = app.add_subcommand("invert", "DDIM inversion round-trip report");
    add_common_options(inv, inv_o);

    CLI::App* met = app.add_subcommand("metrics", "Score an existing frame directory");
    add_common_options(met, met_o);
    met->add_option("--dir", metrics_dir, "Directory of frame_*.pgm files")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_o);
        if (abl->parsed()) return cmd_ablate(abl_o);
        if (inv->parsed()) return cmd_invert(inv_o);
        if (met->parsed()) return cmd_metrics(met_o, metrics_dir);
        std::cerr << app.help();
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace vidiff
