#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "arl/common.hpp"
#include "arl/network.hpp"

namespace arl {

enum class optimizer_kind { sgd, adagrad, adam };

inline std::string to_string(optimizer_kind k) {
    switch (k) {
        case optimizer_kind::sgd: return "sgd";
        case optimizer_kind::adagrad: return "adagrad";
        case optimizer_kind::adam: return "adam";
    }
    return "?";
}

inline optimizer_kind optimizer_from_string(const std::string& s) {
    if (s == "sgd") return optimizer_kind::sgd;
    if (s == "adagrad") return optimizer_kind::adagrad;
    if (s == "adam") return optimizer_kind::adam;
    throw config_error("unknown optimizer: " + s);
}

struct optimizer_config {
    optimizer_kind kind = optimizer_kind::adagrad;
    double lr = 0.1;
    double adagrad_init_acc = 0.1; // initial accumulator, tames large lr early on
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Per-parameter accumulator state plus step counter. The update direction is
/// always descent; a maximizing player negates its gradient before stepping.
class optimizer_state {
public:
    optimizer_state(const parameter_set& params, optimizer_config cfg) : cfg_(cfg) {
        if (!(cfg.lr > 0.0)) throw config_error("optimizer: learning rate must be positive");
        for (const auto& l : params.layers) {
            acc_.push_back({std::vector<double>(l.w.size(), cfg.adagrad_init_acc),
                            std::vector<double>(l.b.size(), cfg.adagrad_init_acc)});
            if (cfg.kind == optimizer_kind::adam) {
                m_.push_back({std::vector<double>(l.w.size(), 0.0),
                              std::vector<double>(l.b.size(), 0.0)});
                for (auto& a : acc_.back().w) a = 0.0;
                for (auto& a : acc_.back().b) a = 0.0;
            }
        }
    }

    long step_count() const { return steps_; }
    const optimizer_config& config() const { return cfg_; }

    void step(parameter_set& params, const gradient_set& grads) {
        if (grads.layers.size() != acc_.size())
            throw shape_error("optimizer: gradient layer count mismatch");
        for (std::size_t k = 0; k < grads.layers.size(); ++k) {
            if (!grads.layers[k].w.all_finite() || !arl::all_finite(grads.layers[k].b))
                throw numeric_error("optimizer: non-finite gradient in layer " +
                                    std::to_string(k) +
                                    (grads.layers[k].w.all_finite() ? " biases" : " weights"));
        }
        ++steps_;
        for (std::size_t k = 0; k < grads.layers.size(); ++k) {
            update_block(params.layers[k].w.data(), grads.layers[k].w.data(),
                         acc_[k].w.data(), m_.empty() ? nullptr : m_[k].w.data(),
                         grads.layers[k].w.size());
            update_block(params.layers[k].b.data(), grads.layers[k].b.data(),
                         acc_[k].b.data(), m_.empty() ? nullptr : m_[k].b.data(),
                         grads.layers[k].b.size());
        }
    }

private:
    struct block {
        std::vector<double> w, b;
    };

    void update_block(double* p, const double* g, double* acc, double* m1, std::size_t n) {
        switch (cfg_.kind) {
            case optimizer_kind::sgd:
                for (std::size_t i = 0; i < n; ++i) p[i] -= cfg_.lr * g[i];
                break;
            case optimizer_kind::adagrad:
                for (std::size_t i = 0; i < n; ++i) {
                    acc[i] += g[i] * g[i];
                    p[i] -= cfg_.lr * g[i] / (std::sqrt(acc[i]) + cfg_.eps);
                }
                break;
            case optimizer_kind::adam: {
                const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
                const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
                for (std::size_t i = 0; i < n; ++i) {
                    m1[i] = cfg_.beta1 * m1[i] + (1.0 - cfg_.beta1) * g[i];
                    acc[i] = cfg_.beta2 * acc[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
                    const double mh = m1[i] / bc1;
                    const double vh = acc[i] / bc2;
                    p[i] -= cfg_.lr * mh / (std::sqrt(vh) + cfg_.eps);
                }
                break;
            }
        }
    }

    optimizer_config cfg_;
    std::vector<block> acc_; // adagrad sums / adam second moments
    std::vector<block> m_;   // adam first moments
    long steps_ = 0;
};

} // namespace arl
