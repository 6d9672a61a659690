#include "vidiff/denoiser.hpp"

#include <cmath>
#include <stdexcept>

#include "vidiff/attention.hpp"
#include "vidiff/rng.hpp"

namespace vidiff {

Tensor Denoiser::eval_frame(const Tensor& x, int t, const Conditioning& cond,
                            AttentionMode mode) const {
    FrameSequence seq;
    seq.frames.push_back(x);
    seq.t = t;
    return eval(seq, t, cond, mode).frames.front();
}

void MixtureModel::validate() const {
    if (components.empty()) {
        throw std::invalid_argument("MixtureModel: at least one component required");
    }
    double sum = 0.0;
    for (const Component& comp : components) {
        if (!(comp.weight > 0.0)) {
            throw std::invalid_argument("MixtureModel: weights must be positive");
        }
        if (!all_finite(comp.mean)) {
            throw std::invalid_argument("MixtureModel: means must be finite");
        }
        if (!comp.mean.same_shape(components.front().mean)) {
            throw std::invalid_argument("MixtureModel: means must share one shape");
        }
        sum += comp.weight;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("MixtureModel: weights must sum to 1");
    }
    for (size_t i = 0; i < components.size(); ++i) {
        for (size_t j = i + 1; j < components.size(); ++j) {
            if (components[i].mean.v == components[j].mean.v) {
                throw std::invalid_argument("MixtureModel: means must be pairwise distinct");
            }
        }
    }
}

Tensor mixture_posterior_eps(const Tensor& x_t, int t, const MixtureModel& mixture,
                             const NoiseSchedule& schedule) {
    if (t < 1 || t > schedule.length()) {
        throw std::invalid_argument("mixture_posterior_eps: timestep out of range");
    }
    const double ab = schedule.alpha_bar(t);
    const double var = 1.0 - ab;
    if (!(var > 0.0)) {
        throw std::runtime_error("mixture_posterior_eps: degenerate noise level (alpha_bar = 1)");
    }
    const double sqrt_ab = std::sqrt(ab);
    const size_t n_comp = mixture.components.size();
    if (!mixture.components.front().mean.same_shape(x_t)) {
        throw std::invalid_argument("mixture_posterior_eps: mean shape mismatch");
    }

    // Log-space responsibilities, max-subtracted.
    std::vector<double> log_r(n_comp);
    double max_lr = -1e300;
    for (size_t j = 0; j < n_comp; ++j) {
        const MixtureModel::Component& comp = mixture.components[j];
        double d2 = 0.0;
        for (size_t i = 0; i < x_t.v.size(); ++i) {
            const double d = x_t.v[i] - sqrt_ab * comp.mean.v[i];
            d2 += d * d;
        }
        log_r[j] = std::log(comp.weight) - d2 / (2.0 * var);
        if (log_r[j] > max_lr) max_lr = log_r[j];
    }
    double norm = 0.0;
    for (size_t j = 0; j < n_comp; ++j) {
        log_r[j] = std::exp(log_r[j] - max_lr);
        norm += log_r[j];
    }

    Tensor x0_hat(x_t.h, x_t.w, x_t.c);
    for (size_t j = 0; j < n_comp; ++j) {
        const double r = log_r[j] / norm;
        const Tensor& mean = mixture.components[j].mean;
        for (size_t i = 0; i < x0_hat.v.size(); ++i) {
            x0_hat.v[i] += r * mean.v[i];
        }
    }

    const double inv_sig = 1.0 / std::sqrt(var);
    Tensor eps(x_t.h, x_t.w, x_t.c);
    for (size_t i = 0; i < eps.v.size(); ++i) {
        eps.v[i] = (x_t.v[i] - sqrt_ab * x0_hat.v[i]) * inv_sig;
    }
    return eps;
}

MixtureSequenceDenoiser::MixtureSequenceDenoiser(std::vector<MixtureModel> mixtures_by_label,
                                                 const NoiseSchedule& schedule)
    : mixtures_(std::move(mixtures_by_label)), schedule_(schedule) {
    if (mixtures_.empty()) {
        throw std::invalid_argument("MixtureSequenceDenoiser: at least one mixture required");
    }
    for (const MixtureModel& m : mixtures_) m.validate();
}

const MixtureModel& MixtureSequenceDenoiser::mixture(const Conditioning& cond) const {
    const int label = cond.label.value_or(0);
    if (label < 0 || label >= static_cast<int>(mixtures_.size())) {
        throw std::invalid_argument("MixtureSequenceDenoiser: unknown conditioning label");
    }
    return mixtures_[label];
}

FrameSequence MixtureSequenceDenoiser::eval(const FrameSequence& x, int t,
                                            const Conditioning& cond, AttentionMode) const {
    x.validate();
    if (x.t != t) {
        throw std::invalid_argument("MixtureSequenceDenoiser: sequence is not at timestep t");
    }
    const MixtureModel& mix = mixture(cond);

    FrameSequence out;
    out.t = t;
    out.frames.reserve(x.frames.size());
    for (const Tensor& frame : x.frames) {
        out.frames.push_back(mixture_posterior_eps(frame, t, mix, schedule_));
    }
    return out;
}

namespace {

Mat random_mat(RngStream& rng, int rows, int cols, double scale) {
    Mat m(rows, cols);
    for (double& x : m.a) x = rng.gaussian() * scale;
    return m;
}

}  // namespace

ToyAttentionDenoiser::ToyAttentionDenoiser(uint64_t seed, int h, int w, int latent_channels,
                                           int embed_channels, int vocab)
    : h_(h), w_(w), c_lat_(latent_channels), c_emb_(embed_channels), vocab_(vocab) {
    if (h < 1 || w < 1 || latent_channels < 1 || embed_channels < 1 || vocab < 1) {
        throw std::invalid_argument("ToyAttentionDenoiser: invalid shape parameters");
    }
    RngStream rng(seed);
    const double in_scale = 1.0 / std::sqrt(static_cast<double>(c_lat_));
    const double emb_scale = 1.0 / std::sqrt(static_cast<double>(c_emb_));
    w_in_ = random_mat(rng, c_emb_, c_lat_, in_scale);
    w_q_ = random_mat(rng, c_emb_, c_emb_, emb_scale);
    w_k_ = random_mat(rng, c_emb_, c_emb_, emb_scale);
    w_v_ = random_mat(rng, c_emb_, c_emb_, emb_scale);
    w_out_ = random_mat(rng, c_lat_, c_emb_, emb_scale * 0.5);
    embed_.resize(vocab_);
    for (int l = 0; l < vocab_; ++l) {
        embed_[l].resize(c_emb_);
        for (double& x : embed_[l]) x = rng.gaussian() * 0.5;
    }
}

Mat ToyAttentionDenoiser::lift(const Tensor& x, const Conditioning& cond) const {
    const double* emb = nullptr;
    if (cond.label.has_value()) {
        const int label = *cond.label;
        if (label < 0 || label >= vocab_) {
            throw std::invalid_argument("ToyAttentionDenoiser: conditioning label out of vocabulary");
        }
        emb = embed_[label].data();
    }

    Mat feat(x.tokens(), c_emb_);
    for (int tok = 0; tok < x.tokens(); ++tok) {
        const double* px = &x.v[static_cast<size_t>(tok) * c_lat_];
        for (int e = 0; e < c_emb_; ++e) {
            double acc = 0.0;
            for (int ch = 0; ch < c_lat_; ++ch) {
                acc += w_in_.at(e, ch) * px[ch];
            }
            feat.at(tok, e) = emb ? acc + emb[e] : acc;
        }
    }
    return feat;
}

FrameSequence ToyAttentionDenoiser::eval(const FrameSequence& x, int t, const Conditioning& cond,
                                         AttentionMode mode) const {
    x.validate();
    if (x.t != t) {
        throw std::invalid_argument("ToyAttentionDenoiser: sequence is not at timestep t");
    }
    if (x.frames.front().h != h_ || x.frames.front().w != w_ || x.frames.front().c != c_lat_) {
        throw std::invalid_argument("ToyAttentionDenoiser: latent shape mismatch");
    }

    const int m = x.m();
    const QKVProjection proj{w_q_, w_k_, w_v_};

    std::vector<Mat> feats(m);
    std::vector<FrameQKV> qkv(m);
    for (int k = 0; k < m; ++k) {
        feats[k] = lift(x.frames[k], cond);
        qkv[k] = project_qkv_tokens(feats[k], proj);
    }

    FrameSequence out;
    out.t = t;
    out.frames.reserve(m);
    for (int k = 0; k < m; ++k) {
        const bool cross = mode == AttentionMode::cross_frame_first;
        const Mat& keys = cross ? qkv[0].k : qkv[k].k;
        const Mat& vals = cross ? qkv[0].v : qkv[k].v;
        const Mat attn = attention_wrap_ordered(qkv[k].q, keys, vals, h_, w_);

        Tensor eps(h_, w_, c_lat_);
        for (int tok = 0; tok < h_ * w_; ++tok) {
            for (int ch = 0; ch < c_lat_; ++ch) {
                double acc = 0.0;
                for (int e = 0; e < c_emb_; ++e) {
                    acc += w_out_.at(ch, e) * (feats[k].at(tok, e) + attn.at(tok, e));
                }
                eps.v[static_cast<size_t>(tok) * c_lat_ + ch] = acc;
            }
        }
        out.frames.push_back(std::move(eps));
    }
    return out;
}

std::unique_ptr<Denoiser> build_toy_attention_denoiser(uint64_t seed, int h, int w,
                                                       int latent_channels, int embed_channels,
                                                       int vocab) {
    return std::make_unique<ToyAttentionDenoiser>(seed, h, w, latent_channels, embed_channels,
                                                  vocab);
}

}  // namespace vidiff
