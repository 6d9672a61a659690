#pragma once

// Independent reference computations used as test oracles. Everything here
// is deliberately written against the definitions, not against the library
// implementation paths it checks.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "vidiff/tensor.hpp"

namespace oracles {

// Running product of (1 - beta_i) in extended precision.
inline std::vector<long double> alpha_bar_product_loop(const std::vector<double>& betas) {
    std::vector<long double> out(betas.size());
    long double prod = 1.0L;
    for (size_t i = 0; i < betas.size(); ++i) {
        prod *= 1.0L - static_cast<long double>(betas[i]);
        out[i] = prod;
    }
    return out;
}

inline bool bitwise_equal(const vidiff::Tensor& a, const vidiff::Tensor& b) {
    return a.same_shape(b) &&
           std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(double)) == 0;
}

// Row-stable softmax over a full score matrix, brute force.
inline std::vector<std::vector<double>> softmax_rows(const std::vector<std::vector<double>>& s) {
    std::vector<std::vector<double>> out(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        double mx = -1e300;
        for (double x : s[i]) mx = std::max(mx, x);
        double sum = 0.0;
        out[i].resize(s[i].size());
        for (size_t j = 0; j < s[i].size(); ++j) {
            out[i][j] = std::exp(s[i][j] - mx);
            sum += out[i][j];
        }
        for (double& x : out[i]) x /= sum;
    }
    return out;
}

// Sample mean and variance.
struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
};

inline MeanVar mean_var(const std::vector<double>& xs) {
    MeanVar mv;
    for (double x : xs) mv.mean += x;
    mv.mean /= static_cast<double>(xs.size());
    for (double x : xs) mv.var += (x - mv.mean) * (x - mv.mean);
    mv.var /= static_cast<double>(xs.size() - 1);
    return mv;
}

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Spatial variance of all entries of one tensor.
inline double spatial_variance(const vidiff::Tensor& t) {
    std::vector<double> xs(t.v.begin(), t.v.end());
    return mean_var(xs).var;
}

}  // namespace oracles
