#include "vidiff/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace vidiff {

double NoiseSchedule::beta(int t) const {
    if (t < 1 || t > length()) {
        throw std::invalid_argument("NoiseSchedule::beta: timestep out of range");
    }
    return betas[t - 1];
}

double NoiseSchedule::alpha_bar(int t) const {
    if (t == 0) return 1.0;
    if (t < 0 || t > length()) {
        throw std::invalid_argument("NoiseSchedule::alpha_bar: timestep out of range");
    }
    return alpha_bars[t - 1];
}

NoiseSchedule build_schedule(int n, double beta_start, double beta_end, ScheduleKind kind) {
    if (n < 1) {
        throw std::invalid_argument("build_schedule: step count must be >= 1");
    }
    if (!(beta_start > 0.0) || !(beta_end < 1.0) || beta_start > beta_end) {
        throw std::invalid_argument("build_schedule: need 0 < beta_start <= beta_end < 1");
    }

    NoiseSchedule s;
    s.betas.resize(n);
    s.alpha_bars.resize(n);

    if (n == 1) {
        s.betas[0] = beta_start;
    } else if (kind == ScheduleKind::linear) {
        const double step = (beta_end - beta_start) / (n - 1);
        for (int i = 0; i < n; ++i) {
            s.betas[i] = beta_start + step * i;
        }
    } else {
        const double r0 = std::sqrt(beta_start);
        const double r1 = std::sqrt(beta_end);
        const double step = (r1 - r0) / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double r = r0 + step * i;
            s.betas[i] = r * r;
        }
    }

    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
        prod *= 1.0 - s.betas[i];
        s.alpha_bars[i] = prod;
    }
    return s;
}

ScheduleKind schedule_kind_from_string(const std::string& str) {
    if (str == "linear") return ScheduleKind::linear;
    if (str == "scaled_linear") return ScheduleKind::scaled_linear;
    throw std::invalid_argument("unknown schedule kind: " + str);
}

std::string to_string(ScheduleKind kind) {
    return kind == ScheduleKind::linear ? "linear" : "scaled_linear";
}

void TimeWindow::validate(const NoiseSchedule& schedule) const {
    if (t_mid < 1 || t_mid > t_start || t_start > schedule.length()) {
        throw std::invalid_argument("TimeWindow: need 1 <= T' <= T <= schedule length");
    }
}

std::vector<int> make_step_grid(int t_start, int steps) {
    if (t_start < 1 || steps < 1) {
        throw std::invalid_argument("make_step_grid: t_start and steps must be >= 1");
    }
    std::vector<int> grid;
    grid.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        const int t = static_cast<int>(std::llround(
            static_cast<double>(t_start) * (steps - i) / steps));
        if (t < 1) continue;
        if (!grid.empty() && grid.back() <= t) continue;  // dedupe on short windows
        grid.push_back(t);
    }
    return grid;
}

}  // namespace vidiff
