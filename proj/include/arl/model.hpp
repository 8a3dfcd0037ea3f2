#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arl/common.hpp"
#include "arl/dataset.hpp"
#include "arl/network.hpp"

namespace arl {

/// What the adversary sees. X is the non-protected feature block; Y the raw
/// 0/1 label; S the protected one-hots (group-aware variants).
enum class adversary_mode { x_plus_y, s, s_plus_y, x_plus_y_plus_s };

inline std::string to_string(adversary_mode m) {
    switch (m) {
        case adversary_mode::x_plus_y: return "X+Y";
        case adversary_mode::s: return "S";
        case adversary_mode::s_plus_y: return "S+Y";
        case adversary_mode::x_plus_y_plus_s: return "X+Y+S";
    }
    return "?";
}

inline adversary_mode adversary_mode_from_string(const std::string& s) {
    if (s == "X+Y") return adversary_mode::x_plus_y;
    if (s == "S") return adversary_mode::s;
    if (s == "S+Y") return adversary_mode::s_plus_y;
    if (s == "X+Y+S") return adversary_mode::x_plus_y_plus_s;
    throw config_error("unknown adversary mode: " + s + " (use X+Y, S, S+Y or X+Y+S)");
}

inline bool mode_uses_protected(adversary_mode m) {
    return m == adversary_mode::s || m == adversary_mode::s_plus_y ||
           m == adversary_mode::x_plus_y_plus_s;
}

/// Default learner from the two-hidden-layer family: widths 64 and 32 with
/// ReLU, sigmoid output. `capacity_multiplier` scales the hidden widths
/// (rounded), giving adversary-free baselines extra units for parity.
inline std::vector<std::size_t> learner_hidden_dims(double capacity_multiplier = 1.0) {
    if (capacity_multiplier < 1.0)
        throw config_error("capacity multiplier must be >= 1");
    const auto scale = [&](double w) {
        return static_cast<std::size_t>(std::llround(w * capacity_multiplier));
    };
    return {scale(64), scale(32)};
}

inline parameter_set make_learner(std::size_t input_dim, rng& gen,
                                  double capacity_multiplier = 1.0) {
    const auto hidden = learner_hidden_dims(capacity_multiplier);
    std::vector<std::size_t> dims{input_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    std::vector<activation> acts(hidden.size(), activation::relu);
    acts.push_back(activation::sigmoid);
    return init_network(dims, acts, gen);
}

/// Linear model with sigmoid output (also the identifiability probe's
/// classifier).
inline parameter_set make_linear_model(std::size_t input_dim, rng& gen) {
    return init_network({input_dim, 1}, {activation::sigmoid}, gen);
}

/// Adversary f_phi. Linear by default; depth > 1 inserts ReLU hidden layers
/// of width 32. Deeper adversaries identify finer regions but overfit
/// outliers more easily.
inline parameter_set make_adversary(std::size_t input_dim, rng& gen, int depth = 1) {
    if (depth < 1) throw config_error("adversary depth must be >= 1");
    std::vector<std::size_t> dims{input_dim};
    std::vector<activation> acts;
    for (int d = 1; d < depth; ++d) {
        dims.push_back(32);
        acts.push_back(activation::relu);
    }
    dims.push_back(1);
    acts.push_back(activation::sigmoid);
    return init_network(dims, acts, gen);
}

inline std::size_t adversary_input_dim(const dataset& ds, adversary_mode mode) {
    switch (mode) {
        case adversary_mode::x_plus_y: return ds.m() + 1;
        case adversary_mode::s: return ds.prot.cols();
        case adversary_mode::s_plus_y: return ds.prot.cols() + 1;
        case adversary_mode::x_plus_y_plus_s: return ds.m() + 1 + ds.prot.cols();
    }
    throw config_error("bad adversary mode");
}

/// Assemble the adversary's input block for the given rows. The label is
/// appended as a raw 0/1 column (not standardized) so the adversary keeps
/// its class semantics.
inline dense_matrix adversary_input(const dataset& ds, std::span<const std::size_t> rows,
                                    adversary_mode mode) {
    if (mode_uses_protected(mode) && ds.prot.cols() == 0)
        throw config_error("adversary mode " + to_string(mode) +
                           " requires protected columns, schema declares none");
    const std::size_t n = rows.size();
    dense_matrix out(n, adversary_input_dim(ds, mode));
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = rows[r];
        std::size_t at = 0;
        if (mode == adversary_mode::x_plus_y || mode == adversary_mode::x_plus_y_plus_s) {
            for (std::size_t j = 0; j < ds.m(); ++j) out(r, at++) = ds.x(i, j);
            out(r, at++) = ds.y[i];
        }
        if (mode == adversary_mode::s_plus_y) out(r, at++) = ds.y[i];
        if (mode_uses_protected(mode)) {
            for (std::size_t j = 0; j < ds.prot.cols(); ++j) out(r, at++) = ds.prot(i, j);
        }
    }
    return out;
}

inline dense_matrix adversary_input(const dataset& ds, adversary_mode mode) {
    std::vector<std::size_t> all(ds.n());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return adversary_input(ds, all, mode);
}

/// Rescale adversary outputs into example weights:
///   lambda_i = 1 + n * f_i / sum(f).
/// Centering around the mean and adding 1 keeps every example contributing
/// (lambda >= 1) while fixing mean(lambda) = 2 over the normalization scope.
/// A uniform f (or an underflowed sum) yields exactly 2 everywhere.
inline std::vector<double> compute_lambda(std::span<const double> f) {
    if (f.empty()) throw shape_error("compute_lambda: empty vector");
    const double n = static_cast<double>(f.size());
    double sum = 0.0, lo = f[0], hi = f[0];
    for (double v : f) {
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<double> lambda(f.size());
    if (hi - lo == 0.0 || sum < 1e-12) {
        std::fill(lambda.begin(), lambda.end(), 2.0);
        return lambda;
    }
    for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] = 1.0 + n * f[i] / sum;
    return lambda;
}

/// Checkpoint: layer shapes + parameters + adversary mode + the fitted
/// standardization, enough to score new data without the training pipeline.
struct checkpoint {
    static constexpr int format_version = 1;
    std::string method;
    parameter_set learner;
    std::optional<parameter_set> adversary;
    std::string adversary_mode_name = "X+Y";
    standardization stats;
    std::vector<std::string> x_names;
    std::uint64_t seed = 0;
    nlohmann::json config; // resolved training config for reproducibility
};

namespace detail {

inline nlohmann::json params_to_json(const parameter_set& p) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : p.layers) {
        nlohmann::json jl;
        jl["in"] = l.w.rows();
        jl["out"] = l.w.cols();
        jl["act"] = to_string(l.act);
        std::vector<double> w(l.w.data(), l.w.data() + l.w.size());
        jl["w"] = w;
        jl["b"] = l.b;
        layers.push_back(std::move(jl));
    }
    return layers;
}

inline parameter_set params_from_json(const nlohmann::json& j) {
    parameter_set p;
    for (const auto& jl : j) {
        layer l;
        l.w = dense_matrix(jl.at("in").get<std::size_t>(), jl.at("out").get<std::size_t>());
        const auto w = jl.at("w").get<std::vector<double>>();
        if (w.size() != l.w.size()) throw data_error("checkpoint: weight size mismatch");
        std::copy(w.begin(), w.end(), l.w.data());
        l.b = jl.at("b").get<std::vector<double>>();
        if (l.b.size() != l.w.cols()) throw data_error("checkpoint: bias size mismatch");
        l.act = activation_from_string(jl.at("act").get<std::string>());
        p.layers.push_back(std::move(l));
    }
    p.check_chained();
    return p;
}

} // namespace detail

inline nlohmann::json checkpoint_to_json(const checkpoint& c) {
    nlohmann::json j;
    j["format_version"] = checkpoint::format_version;
    j["method"] = c.method;
    j["learner"] = detail::params_to_json(c.learner);
    if (c.adversary) j["adversary"] = detail::params_to_json(*c.adversary);
    j["adversary_mode"] = c.adversary_mode_name;
    j["standardization"] = {{"cols", c.stats.cols}, {"mean", c.stats.mean},
                            {"stdev", c.stats.stdev}};
    j["x_names"] = c.x_names;
    j["seed"] = c.seed;
    j["config"] = c.config;
    return j;
}

inline checkpoint checkpoint_from_json(const nlohmann::json& j) {
    if (j.value("format_version", -1) != checkpoint::format_version)
        throw data_error("checkpoint: unsupported format_version");
    checkpoint c;
    c.method = j.at("method").get<std::string>();
    c.learner = detail::params_from_json(j.at("learner"));
    if (j.contains("adversary")) c.adversary = detail::params_from_json(j.at("adversary"));
    c.adversary_mode_name = j.value("adversary_mode", "X+Y");
    c.stats.cols = j.at("standardization").at("cols").get<std::vector<std::size_t>>();
    c.stats.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    c.stats.stdev = j.at("standardization").at("stdev").get<std::vector<double>>();
    c.x_names = j.at("x_names").get<std::vector<std::string>>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.config = j.value("config", nlohmann::json::object());
    return c;
}

inline void save_checkpoint(const checkpoint& c, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw data_error("cannot write checkpoint: " + path.string());
        out << checkpoint_to_json(c).dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

inline checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open checkpoint: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("checkpoint " + path.string() + ": " + e.what());
    }
    return checkpoint_from_json(j);
}

} // namespace arl
