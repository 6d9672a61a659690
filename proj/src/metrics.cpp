#include "vidiff/metrics.hpp"

#include <cmath>
#include <limits>

namespace vidiff {

std::pair<int, int> estimate_displacement(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("estimate_displacement: shape mismatch");
    }
    double best = -std::numeric_limits<double>::infinity();
    int best_si = 0;
    int best_sj = 0;
    for (int si = 0; si < a.h; ++si) {
        for (int sj = 0; sj < a.w; ++sj) {
            double corr = 0.0;
            for (int i = 0; i < a.h; ++i) {
                const int bi = i + si < a.h ? i + si : i + si - a.h;
                for (int j = 0; j < a.w; ++j) {
                    const int bj = j + sj < a.w ? j + sj : j + sj - a.w;
                    for (int ch = 0; ch < a.c; ++ch) {
                        corr += a.at(i, j, ch) * b.at(bi, bj, ch);
                    }
                }
            }
            if (corr > best) {
                best = corr;
                best_si = si;
                best_sj = sj;
            }
        }
    }
    // Minimal signed representatives in (-n/2, n/2].
    if (best_si > a.h / 2) best_si -= a.h;
    if (best_sj > a.w / 2) best_sj -= a.w;
    return {best_si, best_sj};
}

MetricsReport consistency_metrics(const FrameSequence& frames, const MotionField& field,
                                  const std::optional<MixtureModel>& mixture) {
    frames.validate();
    const int m = frames.m();

    MetricsReport report;

    if (m > 1) {
        double mse_sum = 0.0;
        double disp_sum = 0.0;
        for (int k = 0; k + 1 < m; ++k) {
            mse_sum += mse(frames.frames[k], frames.frames[k + 1]);
            const auto [di, dj] = estimate_displacement(frames.frames[k], frames.frames[k + 1]);
            disp_sum += std::sqrt(static_cast<double>(di) * di + static_cast<double>(dj) * dj);
        }
        report.inter_frame_mse = mse_sum / (m - 1);
        report.mean_displacement = disp_sum / (m - 1);
    }

    MotionField scoring_field = field;
    scoring_field.m = m;
    const std::vector<Vec2> flow = translation_flow(scoring_field);
    double warp_sum = 0.0;
    for (int k = 0; k < m; ++k) {
        const Tensor unwarped = warp_translate(frames.frames[k], -flow[k], field.mode);
        warp_sum += mse(unwarped, frames.frames[0]);
    }
    report.warped_inconsistency = warp_sum / m;

    if (mixture.has_value()) {
        mixture->validate();
        report.nearest_mode_distance.reserve(m);
        for (int k = 0; k < m; ++k) {
            double best = std::numeric_limits<double>::infinity();
            for (const MixtureModel::Component& comp : mixture->components) {
                best = std::min(best, rms_dist(frames.frames[k], comp.mean));
            }
            report.nearest_mode_distance.push_back(best);
        }
    }
    return report;
}

}  // namespace vidiff
