#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "arl/common.hpp"

namespace arl {

/// Clamp applied to probabilities before taking logs. Small enough not to
/// perturb rankings, large enough to keep -log finite.
inline constexpr double kLogClamp = 1e-7;

namespace detail {
inline void check_bce_args(std::span<const double> scores, std::span<const double> labels,
                           std::span<const double> weights) {
    if (scores.size() != labels.size() || scores.size() != weights.size())
        throw shape_error("weighted_bce: lengths differ (scores " +
                          std::to_string(scores.size()) + ", labels " +
                          std::to_string(labels.size()) + ", weights " +
                          std::to_string(weights.size()) + ")");
    for (double w : weights) {
        if (!(w > 0.0)) throw data_error("weighted_bce: weights must be positive");
    }
}
} // namespace detail

/// Per-example cross entropy -y log p - (1-y) log(1-p), with p clamped.
inline double bce_example(double score, double label) {
    const double p = std::clamp(score, kLogClamp, 1.0 - kLogClamp);
    return -(label * std::log(p) + (1.0 - label) * std::log1p(-p));
}

/// Weighted-mean binary cross entropy: sum(w_i * ce_i) / sum(w_i).
/// The mean convention makes the value (and its gradients) invariant to a
/// common rescaling of the weights.
inline double weighted_bce(std::span<const double> scores, std::span<const double> labels,
                           std::span<const double> weights) {
    detail::check_bce_args(scores, labels, weights);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        num += weights[i] * bce_example(scores[i], labels[i]);
        den += weights[i];
    }
    return num / den;
}

/// Gradient of weighted_bce w.r.t. the final-layer logits: w_i*(p_i - y_i)/sum(w).
/// Exact for scores produced by a sigmoid head (the clamp only affects the
/// reported value, in the saturated region where the true gradient is ~0).
inline std::vector<double> weighted_bce_logit_grad(std::span<const double> scores,
                                                   std::span<const double> labels,
                                                   std::span<const double> weights) {
    detail::check_bce_args(scores, labels, weights);
    double den = 0.0;
    for (double w : weights) den += w;
    std::vector<double> g(scores.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = weights[i] * (scores[i] - labels[i]) / den;
    return g;
}

/// Squared-hinge robust loss: mean_i [max(ce_i - eta, 0)]^2. Examples whose
/// loss already sits below eta contribute nothing, so the optimization
/// concentrates on the worst tail.
inline double dro_loss(std::span<const double> scores, std::span<const double> labels,
                       double eta) {
    if (scores.size() != labels.size()) throw shape_error("dro_loss: length mismatch");
    if (scores.empty()) throw shape_error("dro_loss: empty batch");
    double s = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double excess = std::max(bce_example(scores[i], labels[i]) - eta, 0.0);
        s += excess * excess;
    }
    return s / static_cast<double>(scores.size());
}

/// Logit gradient of dro_loss: 2*max(ce_i - eta, 0)*(p_i - y_i)/n.
inline std::vector<double> dro_logit_grad(std::span<const double> scores,
                                          std::span<const double> labels, double eta) {
    if (scores.size() != labels.size()) throw shape_error("dro_logit_grad: length mismatch");
    const double n = static_cast<double>(scores.size());
    std::vector<double> g(scores.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double excess = bce_example(scores[i], labels[i]) - eta;
        if (excess > 0.0) g[i] = 2.0 * excess * (scores[i] - labels[i]) / n;
    }
    return g;
}

/// |mean score over group-a negatives - mean score over group-b negatives|.
/// Returns 0 when either side has no negatives in the batch.
struct score_gap {
    double value = 0.0;
    double sign = 0.0; // sign of (mean_a - mean_b); 0 when inactive
    std::size_t n_a = 0, n_b = 0;
};

inline score_gap negative_score_gap(std::span<const double> scores,
                                    std::span<const double> labels,
                                    std::span<const int> side) {
    // side: 0 = group a, 1 = group b, anything else = ignore
    if (scores.size() != labels.size() || scores.size() != side.size())
        throw shape_error("negative_score_gap: length mismatch");
    double sa = 0.0, sb = 0.0;
    score_gap out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 0.0) continue;
        if (side[i] == 0) {
            sa += scores[i];
            ++out.n_a;
        } else if (side[i] == 1) {
            sb += scores[i];
            ++out.n_b;
        }
    }
    if (out.n_a == 0 || out.n_b == 0) return out;
    const double diff = sa / static_cast<double>(out.n_a) - sb / static_cast<double>(out.n_b);
    out.value = std::fabs(diff);
    out.sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    return out;
}

} // namespace arl
