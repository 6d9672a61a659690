#include "vidiff/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace vidiff {

namespace {

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) {
        throw std::invalid_argument("matmul: inner dimension mismatch");
    }
    Mat out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int kk = 0; kk < a.cols; ++kk) {
            const double aik = a.at(i, kk);
            for (int j = 0; j < b.cols; ++j) {
                out.at(i, j) += aik * b.at(kk, j);
            }
        }
    }
    return out;
}

void check_qkv_shapes(const Mat& q, const Mat& k, const Mat& v) {
    if (q.cols != k.cols || k.rows != v.rows || q.cols < 1) {
        throw std::invalid_argument("attention: Q/K/V shapes do not conform");
    }
    for (const Mat* m : {&q, &k, &v}) {
        for (double x : m->a) {
            if (!std::isfinite(x)) {
                throw std::runtime_error("attention: non-finite input");
            }
        }
    }
}

}  // namespace

FrameQKV project_qkv_tokens(const Mat& tokens, const QKVProjection& weights) {
    if (weights.wq.rows != tokens.cols || weights.wk.rows != tokens.cols ||
        weights.wv.rows != tokens.cols) {
        throw std::invalid_argument("project_qkv: weight rows must match feature channels");
    }
    return {matmul(tokens, weights.wq), matmul(tokens, weights.wk), matmul(tokens, weights.wv)};
}

FrameQKV project_qkv(const Tensor& x, const QKVProjection& weights) {
    Mat tokens(x.tokens(), x.c);
    for (int i = 0; i < x.tokens(); ++i) {
        for (int ch = 0; ch < x.c; ++ch) {
            tokens.at(i, ch) = x.v[static_cast<size_t>(i) * x.c + ch];
        }
    }
    return project_qkv_tokens(tokens, weights);
}

Mat self_attention(const Mat& q, const Mat& k, const Mat& v) {
    check_qkv_shapes(q, k, v);
    const int n_q = q.rows;
    const int n_k = k.rows;
    const int c = q.cols;
    const double scale = 1.0 / std::sqrt(static_cast<double>(c));

    Mat out(n_q, v.cols);
    std::vector<double> scores(n_k);
    for (int i = 0; i < n_q; ++i) {
        double max_s = -1e300;
        for (int j = 0; j < n_k; ++j) {
            double s = 0.0;
            for (int ch = 0; ch < c; ++ch) {
                s += q.at(i, ch) * k.at(j, ch);
            }
            s *= scale;
            scores[j] = s;
            if (s > max_s) max_s = s;
        }
        double sum_w = 0.0;
        for (int j = 0; j < n_k; ++j) {
            scores[j] = std::exp(scores[j] - max_s);
            sum_w += scores[j];
        }
        const double inv = 1.0 / sum_w;
        for (int ch = 0; ch < v.cols; ++ch) {
            double acc = 0.0;
            for (int j = 0; j < n_k; ++j) {
                acc += scores[j] * v.at(j, ch);
            }
            out.at(i, ch) = acc * inv;
        }
    }
    return out;
}

std::vector<Mat> cross_frame_attention(const std::vector<FrameQKV>& frames) {
    if (frames.empty()) {
        throw std::invalid_argument("cross_frame_attention: need at least one frame");
    }
    const Mat& k1 = frames.front().k;
    const Mat& v1 = frames.front().v;

    std::vector<Mat> out;
    out.reserve(frames.size());
    for (const FrameQKV& f : frames) {
        out.push_back(self_attention(f.q, k1, v1));
    }
    return out;
}

Mat attention_wrap_ordered(const Mat& q, const Mat& k, const Mat& v, int h, int w) {
    check_qkv_shapes(q, k, v);
    if (q.rows != h * w || k.rows != h * w) {
        throw std::invalid_argument("attention_wrap_ordered: token count must equal h*w");
    }
    const int c = q.cols;
    const double scale = 1.0 / std::sqrt(static_cast<double>(c));

    Mat out(q.rows, v.cols);
    std::vector<double> scores(static_cast<size_t>(h) * w);
    std::vector<int> key_index(static_cast<size_t>(h) * w);
    for (int qi = 0; qi < h; ++qi) {
        for (int qj = 0; qj < w; ++qj) {
            const int row = qi * w + qj;

            // Enumerate keys by grid offset from the query position; the
            // resulting operation sequence is identical for every translate
            // of the same content.
            size_t n = 0;
            double max_s = -1e300;
            for (int di = 0; di < h; ++di) {
                const int ki = qi + di < h ? qi + di : qi + di - h;
                for (int dj = 0; dj < w; ++dj) {
                    const int kj = qj + dj < w ? qj + dj : qj + dj - w;
                    const int key_row = ki * w + kj;
                    double s = 0.0;
                    for (int ch = 0; ch < c; ++ch) {
                        s += q.at(row, ch) * k.at(key_row, ch);
                    }
                    s *= scale;
                    scores[n] = s;
                    key_index[n] = key_row;
                    ++n;
                    if (s > max_s) max_s = s;
                }
            }
            double sum_w = 0.0;
            for (size_t j = 0; j < n; ++j) {
                scores[j] = std::exp(scores[j] - max_s);
                sum_w += scores[j];
            }
            const double inv = 1.0 / sum_w;
            for (int ch = 0; ch < v.cols; ++ch) {
                double acc = 0.0;
                for (size_t j = 0; j < n; ++j) {
                    acc += scores[j] * v.at(key_index[j], ch);
                }
                out.at(row, ch) = acc * inv;
            }
        }
    }
    return out;
}

}  // namespace vidiff
