#include "vidiff/config.hpp"

#include <cstdio>
#include <fstream>

namespace vidiff {

namespace {

using nlohmann::json;

std::string attn_to_string(AttentionMode mode) {
    return mode == AttentionMode::per_frame_self ? "self" : "cross";
}

AttentionMode attn_from_string(const std::string& s) {
    if (s == "self") return AttentionMode::per_frame_self;
    if (s == "cross") return AttentionMode::cross_frame_first;
    throw std::invalid_argument("config: unknown attention mode: " + s);
}

std::string denoiser_to_string(DenoiserKind kind) {
    return kind == DenoiserKind::toy ? "toy" : "mixture";
}

DenoiserKind denoiser_from_string(const std::string& s) {
    if (s == "toy") return DenoiserKind::toy;
    if (s == "mixture") return DenoiserKind::mixture;
    throw std::invalid_argument("config: unknown denoiser: " + s);
}

std::string mask_kind_to_string(MaskKind kind) {
    switch (kind) {
        case MaskKind::disk: return "disk";
        case MaskKind::threshold: return "threshold";
        case MaskKind::files: return "files";
    }
    return "disk";
}

MaskKind mask_kind_from_string(const std::string& s) {
    if (s == "disk") return MaskKind::disk;
    if (s == "threshold") return MaskKind::threshold;
    if (s == "files") return MaskKind::files;
    throw std::invalid_argument("config: unknown mask kind: " + s);
}

std::string trigger_to_string(SmoothTrigger trigger) {
    return trigger == SmoothTrigger::once ? "once" : "every_step";
}

SmoothTrigger trigger_from_string(const std::string& s) {
    if (s == "once") return SmoothTrigger::once;
    if (s == "every_step") return SmoothTrigger::every_step;
    throw std::invalid_argument("config: unknown smoothing trigger: " + s);
}

json component_to_json(const MixtureComponentSpec& spec) {
    json j;
    j["weight"] = spec.weight;
    if (spec.kind == "fill") {
        j["fill"] = spec.fill;
    } else if (spec.kind == "values") {
        j["values"] = spec.values;
    } else {
        j["blob"] = {{"center_x", spec.blob_center_x},
                     {"center_y", spec.blob_center_y},
                     {"sigma", spec.blob_sigma},
                     {"amp", spec.blob_amp}};
    }
    return j;
}

MixtureComponentSpec component_from_json(const json& j) {
    MixtureComponentSpec spec;
    for (const auto& [key, value] : j.items()) {
        if (key == "weight") {
            spec.weight = value.get<double>();
        } else if (key == "fill") {
            spec.kind = "fill";
            spec.fill = value.get<double>();
        } else if (key == "values") {
            spec.kind = "values";
            spec.values = value.get<std::vector<double>>();
        } else if (key == "blob") {
            spec.kind = "blob";
            for (const auto& [bkey, bvalue] : value.items()) {
                if (bkey == "center_x") spec.blob_center_x = bvalue.get<double>();
                else if (bkey == "center_y") spec.blob_center_y = bvalue.get<double>();
                else if (bkey == "sigma") spec.blob_sigma = bvalue.get<double>();
                else if (bkey == "amp") spec.blob_amp = bvalue.get<double>();
                else throw std::invalid_argument("config: unknown blob key: " + bkey);
            }
        } else {
            throw std::invalid_argument("config: unknown mixture component key: " + key);
        }
    }
    return spec;
}

}  // namespace

nlohmann::json config_to_json(const GenerationConfig& c) {
    json j;
    j["frames"] = c.frames;
    j["height"] = c.height;
    j["width"] = c.width;
    j["channels"] = c.channels;
    j["schedule_steps"] = c.schedule_steps;
    j["schedule_kind"] = to_string(c.schedule_kind);
    j["beta_start"] = c.beta_start;
    j["beta_end"] = c.beta_end;
    j["t_start"] = c.t_start;
    j["t_mid"] = c.t_mid;
    j["motion"] = c.motion;
    j["lambda"] = c.lambda;
    j["delta_x"] = c.delta_x;
    j["delta_y"] = c.delta_y;
    j["warp_mode"] = to_string(c.warp_mode);
    j["attn"] = attn_to_string(c.attn);
    j["smooth"] = c.smooth;
    j["smooth_alpha"] = c.smooth_alpha;
    j["smooth_trigger"] = trigger_to_string(c.smooth_trigger);
    j["smooth_timestep"] = c.smooth_timestep;
    j["mask_kind"] = mask_kind_to_string(c.mask_kind);
    j["mask_center_x"] = c.mask_center_x;
    j["mask_center_y"] = c.mask_center_y;
    j["mask_radius"] = c.mask_radius;
    j["mask_threshold"] = c.mask_threshold;
    j["mask_dir"] = c.mask_dir;
    j["denoiser"] = denoiser_to_string(c.denoiser);
    j["toy_channels"] = c.toy_channels;
    j["toy_vocab"] = c.toy_vocab;
    j["toy_weight_seed"] = c.toy_weight_seed;
    json mixtures = json::array();
    for (const auto& label_specs : c.mixtures) {
        json comps = json::array();
        for (const MixtureComponentSpec& spec : label_specs) {
            comps.push_back(component_to_json(spec));
        }
        mixtures.push_back(comps);
    }
    j["mixtures"] = mixtures;
    j["cond_label"] = c.cond_label.has_value() ? json(*c.cond_label) : json(nullptr);
    j["steps"] = c.steps;
    j["seed"] = c.seed;
    return j;
}

void apply_config_json(GenerationConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("config: top-level JSON must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "frames") c.frames = value.get<int>();
        else if (key == "height") c.height = value.get<int>();
        else if (key == "width") c.width = value.get<int>();
        else if (key == "channels") c.channels = value.get<int>();
        else if (key == "schedule_steps") c.schedule_steps = value.get<int>();
        else if (key == "schedule_kind") c.schedule_kind = schedule_kind_from_string(value.get<std::string>());
        else if (key == "beta_start") c.beta_start = value.get<double>();
        else if (key == "beta_end") c.beta_end = value.get<double>();
        else if (key == "t_start") c.t_start = value.get<int>();
        else if (key == "t_mid") c.t_mid = value.get<int>();
        else if (key == "motion") c.motion = value.get<bool>();
        else if (key == "lambda") c.lambda = value.get<double>();
        else if (key == "delta_x") c.delta_x = value.get<double>();
        else if (key == "delta_y") c.delta_y = value.get<double>();
        else if (key == "warp_mode") c.warp_mode = warp_mode_from_string(value.get<std::string>());
        else if (key == "attn") c.attn = attn_from_string(value.get<std::string>());
        else if (key == "smooth") c.smooth = value.get<bool>();
        else if (key == "smooth_alpha") c.smooth_alpha = value.get<double>();
        else if (key == "smooth_trigger") c.smooth_trigger = trigger_from_string(value.get<std::string>());
        else if (key == "smooth_timestep") c.smooth_timestep = value.get<int>();
        else if (key == "mask_kind") c.mask_kind = mask_kind_from_string(value.get<std::string>());
        else if (key == "mask_center_x") c.mask_center_x = value.get<double>();
        else if (key == "mask_center_y") c.mask_center_y = value.get<double>();
        else if (key == "mask_radius") c.mask_radius = value.get<double>();
        else if (key == "mask_threshold") c.mask_threshold = value.get<double>();
        else if (key == "mask_dir") c.mask_dir = value.get<std::string>();
        else if (key == "denoiser") c.denoiser = denoiser_from_string(value.get<std::string>());
        else if (key == "toy_channels") c.toy_channels = value.get<int>();
        else if (key == "toy_vocab") c.toy_vocab = value.get<int>();
        else if (key == "toy_weight_seed") c.toy_weight_seed = value.get<uint64_t>();
        else if (key == "mixtures") {
            c.mixtures.clear();
            for (const json& comps : value) {
                std::vector<MixtureComponentSpec> specs;
                for (const json& comp : comps) {
                    specs.push_back(component_from_json(comp));
                }
                c.mixtures.push_back(std::move(specs));
            }
        } else if (key == "cond_label") {
            if (value.is_null()) c.cond_label.reset();
            else c.cond_label = value.get<int>();
        }
        else if (key == "steps") c.steps = value.get<int>();
        else if (key == "seed") c.seed = value.get<uint64_t>();
        else throw std::invalid_argument("config: unknown key: " + key);
    }
}

GenerationConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::invalid_argument("config: cannot open file: " + path);
    }
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: JSON parse error in " + path + ": " + e.what());
    }
    GenerationConfig c;
    apply_config_json(c, j);
    return c;
}

std::string config_hash(const GenerationConfig& config) {
    const std::string dump = config_to_json(config).dump();
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace vidiff
