#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "arl/common.hpp"
#include "arl/matrix.hpp"

namespace arl {

enum class activation { relu, sigmoid, identity };

inline std::string to_string(activation a) {
    switch (a) {
        case activation::relu: return "relu";
        case activation::sigmoid: return "sigmoid";
        case activation::identity: return "identity";
    }
    return "?";
}

inline activation activation_from_string(const std::string& s) {
    if (s == "relu") return activation::relu;
    if (s == "sigmoid") return activation::sigmoid;
    if (s == "identity") return activation::identity;
    throw config_error("unknown activation: " + s);
}

/// One fully connected layer: out = act(x * w + b), w is in_dim x out_dim.
struct layer {
    dense_matrix w;
    std::vector<double> b;
    activation act = activation::identity;

    std::size_t in_dim() const { return w.rows(); }
    std::size_t out_dim() const { return w.cols(); }
};

/// Parameters of one model (theta or phi): an ordered stack of layers whose
/// dimensions chain.
struct parameter_set {
    std::vector<layer> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }

    bool all_finite() const {
        for (const auto& l : layers) {
            if (!l.w.all_finite() || !arl::all_finite(l.b)) return false;
        }
        return true;
    }

    void check_chained() const {
        for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
            if (layers[k].out_dim() != layers[k + 1].in_dim())
                throw shape_error("layer " + std::to_string(k) + " out_dim " +
                                  std::to_string(layers[k].out_dim()) + " != layer " +
                                  std::to_string(k + 1) + " in_dim " +
                                  std::to_string(layers[k + 1].in_dim()));
        }
    }

    bool operator==(const parameter_set&) const = default;
};

/// Gradients, shape-congruent with the parameter_set they differentiate.
struct gradient_set {
    struct block {
        dense_matrix w;
        std::vector<double> b;
    };
    std::vector<block> layers;

    bool all_finite() const {
        for (const auto& l : layers) {
            if (!l.w.all_finite() || !arl::all_finite(l.b)) return false;
        }
        return true;
    }
};

inline gradient_set zeros_like(const parameter_set& p) {
    gradient_set g;
    g.layers.reserve(p.layers.size());
    for (const auto& l : p.layers) {
        g.layers.push_back({dense_matrix(l.w.rows(), l.w.cols()),
                            std::vector<double>(l.b.size(), 0.0)});
    }
    return g;
}

/// Glorot-range uniform init: w ~ U(+-sqrt(6/(fan_in+fan_out))), b = 0.
inline parameter_set init_network(const std::vector<std::size_t>& dims,
                                  const std::vector<activation>& acts, rng& gen) {
    if (dims.size() < 2 || acts.size() != dims.size() - 1)
        throw config_error("init_network: need dims(n>=2) and acts(n-1)");
    parameter_set p;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        layer l;
        l.w = dense_matrix(dims[k], dims[k + 1]);
        l.b.assign(dims[k + 1], 0.0);
        l.act = acts[k];
        const double bound = std::sqrt(6.0 / static_cast<double>(dims[k] + dims[k + 1]));
        for (std::size_t i = 0; i < l.w.size(); ++i) l.w.data()[i] = gen.uniform(-bound, bound);
        p.layers.push_back(std::move(l));
    }
    return p;
}

namespace detail {

inline void apply_activation(dense_matrix& m, activation act) {
    double* d = m.data();
    const std::size_t n = m.size();
    switch (act) {
        case activation::relu:
            for (std::size_t i = 0; i < n; ++i) d[i] = d[i] > 0.0 ? d[i] : 0.0;
            break;
        case activation::sigmoid:
            for (std::size_t i = 0; i < n; ++i) d[i] = 1.0 / (1.0 + std::exp(-d[i]));
            break;
        case activation::identity:
            break;
    }
}

// derivative expressed through the post-activation value
inline double activation_grad(double a, activation act) {
    switch (act) {
        case activation::relu: return a > 0.0 ? 1.0 : 0.0;
        case activation::sigmoid: return a * (1.0 - a);
        case activation::identity: return 1.0;
    }
    return 0.0;
}

} // namespace detail

/// Per-layer post-activation values kept around for the backward pass.
struct forward_cache {
    dense_matrix input;
    std::vector<dense_matrix> acts; // acts[k] = output of layer k
};

inline forward_cache forward_cached(const parameter_set& p, const dense_matrix& x) {
    if (p.layers.empty()) throw shape_error("forward: empty network");
    if (x.cols() != p.input_dim())
        throw shape_error("forward: input has " + std::to_string(x.cols()) +
                          " columns, layer 0 expects " + std::to_string(p.input_dim()));
    p.check_chained();
    forward_cache c;
    c.input = x;
    c.acts.reserve(p.layers.size());
    const dense_matrix* cur = &c.input;
    for (std::size_t k = 0; k < p.layers.size(); ++k) {
        const layer& l = p.layers[k];
        dense_matrix z = matmul(*cur, l.w);
        for (std::size_t i = 0; i < z.rows(); ++i) {
            double* zr = z.data() + i * z.cols();
            for (std::size_t j = 0; j < z.cols(); ++j) zr[j] += l.b[j];
        }
        detail::apply_activation(z, l.act);
        c.acts.push_back(std::move(z));
        cur = &c.acts.back();
    }
    return c;
}

/// Scores for a single-output network: one value per input row.
inline std::vector<double> forward(const parameter_set& p, const dense_matrix& x) {
    if (p.output_dim() != 1)
        throw shape_error("forward: expected single-output network, got output_dim " +
                          std::to_string(p.output_dim()));
    forward_cache c = forward_cached(p, x);
    const dense_matrix& out = c.acts.back();
    std::vector<double> s(out.rows());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = out(i, 0);
    return s;
}

/// Backpropagation seeded at the final layer's PRE-activation values.
/// For a sigmoid-output network trained with cross entropy the caller seeds
/// with w_i*(p_i - y_i)/sum(w); for a generic head use
/// dJ/dz = dJ/da * act'(a).
inline gradient_set backward(const parameter_set& p, const forward_cache& cache,
                             std::span<const double> dloss_dlogit) {
    const std::size_t n_layers = p.layers.size();
    if (cache.acts.size() != n_layers) throw shape_error("backward: cache/network mismatch");
    const std::size_t n = cache.input.rows();
    const std::size_t out_dim = p.layers.back().out_dim();
    if (dloss_dlogit.size() != n * out_dim)
        throw shape_error("backward: seed length " + std::to_string(dloss_dlogit.size()) +
                          " != n*out_dim " + std::to_string(n * out_dim));

    gradient_set g = zeros_like(p);
    dense_matrix delta(n, out_dim);
    for (std::size_t i = 0; i < delta.size(); ++i) delta.data()[i] = dloss_dlogit[i];

    for (std::size_t k = n_layers; k-- > 0;) {
        const dense_matrix& in = (k == 0) ? cache.input : cache.acts[k - 1];
        g.layers[k].w = matmul_at_b(in, delta);
        for (std::size_t j = 0; j < g.layers[k].b.size(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += delta(i, j);
            g.layers[k].b[j] = s;
        }
        if (k > 0) {
            dense_matrix prev = matmul_a_bt(delta, p.layers[k].w);
            const dense_matrix& a = cache.acts[k - 1];
            for (std::size_t i = 0; i < prev.size(); ++i)
                prev.data()[i] *= detail::activation_grad(a.data()[i], p.layers[k - 1].act);
            delta = std::move(prev);
        }
    }
    return g;
}

} // namespace arl
