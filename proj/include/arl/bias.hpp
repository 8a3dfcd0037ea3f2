#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arl/common.hpp"
#include "arl/dataset.hpp"

namespace arl {

/// Synthetic training-distribution distortions. Each injector keeps n fixed,
/// is deterministic per seed, and never touches held-out data.
struct bias_spec {
    enum class kind { representation, label_flip, base_rate };
    kind k = kind::label_flip;
    std::string feature; // representation / base_rate
    std::string value;
    double amount = 0.0; // fraction (representation, label_flip) or rate (base_rate)
    std::uint64_t seed = 0;

    static bias_spec from_json(const nlohmann::json& j) {
        bias_spec b;
        const auto ks = j.at("kind").get<std::string>();
        if (ks == "representation")
            b.k = kind::representation;
        else if (ks == "label_flip")
            b.k = kind::label_flip;
        else if (ks == "base_rate")
            b.k = kind::base_rate;
        else
            throw config_error("unknown bias kind: " + ks);
        b.feature = j.value("feature", std::string{});
        b.value = j.value("value", std::string{});
        b.amount = j.at("amount").get<double>();
        b.seed = j.value("seed", std::uint64_t{0});
        return b;
    }

    nlohmann::json to_json() const {
        const char* ks = k == kind::representation ? "representation"
                         : k == kind::label_flip  ? "label_flip"
                                                  : "base_rate";
        nlohmann::json j{{"kind", ks}, {"amount", amount}, {"seed", seed}};
        if (!feature.empty()) j["feature"] = feature;
        if (!value.empty()) j["value"] = value;
        return j;
    }
};

namespace detail {

inline std::pair<std::size_t, int> find_coarse_group(const dataset& ds,
                                                     const std::string& feature,
                                                     const std::string& value) {
    const auto& gv = ds.groups;
    const auto fit = std::find(gv.features.begin(), gv.features.end(), feature);
    if (fit == gv.features.end()) throw data_error("unknown protected feature: " + feature);
    const std::size_t f = static_cast<std::size_t>(fit - gv.features.begin());
    const int vi = gv.value_index(f, value);
    if (vi < 0) throw data_error("value '" + value + "' not in vocabulary of " + feature);
    return {f, vi};
}

inline std::vector<std::size_t> sample_rows(const std::vector<std::size_t>& pool,
                                            std::size_t want, rng& gen) {
    std::vector<std::size_t> out;
    out.reserve(want);
    if (want <= pool.size()) {
        // under-sampling: without replacement
        std::vector<std::size_t> shuffled = pool;
        gen.shuffle(shuffled);
        out.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(want));
    } else {
        // over-sampling: with replacement
        for (std::size_t i = 0; i < want; ++i) out.push_back(pool[gen.below(pool.size())]);
    }
    return out;
}

} // namespace detail

/// Resample so the (feature=value) group's share of the fixed-size training
/// set equals `fraction`. Under-sampling draws without replacement,
/// over-sampling with replacement; the complement fills the rest by the same
/// rule.
inline dataset inject_representation_bias(const dataset& ds, const std::string& feature,
                                          const std::string& value, double fraction,
                                          std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw config_error("representation bias: fraction must be in (0,1)");
    const auto [f, vi] = detail::find_coarse_group(ds, feature, value);
    std::vector<std::size_t> members, rest;
    for (std::size_t i = 0; i < ds.n(); ++i)
        (ds.prot_value_at(i, f) == vi ? members : rest).push_back(i);
    if (members.empty()) throw data_error("representation bias: group has no examples");
    if (rest.empty()) throw data_error("representation bias: complement group is empty");
    const std::size_t n = ds.n();
    const std::size_t target =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(fraction * n)), 1, n - 1);
    rng gen = rng::stream(seed, "representation-bias");
    std::vector<std::size_t> rows = detail::sample_rows(members, target, gen);
    const auto fill = detail::sample_rows(rest, n - target, gen);
    rows.insert(rows.end(), fill.begin(), fill.end());
    return subset(ds, rows);
}

/// Flip exactly round(flip_fraction * n) labels, chosen uniformly without
/// replacement. Features, groups and n are untouched; the same seed flips
/// the same rows, so applying it twice restores the original labels.
inline dataset inject_label_bias(const dataset& ds, double flip_fraction, std::uint64_t seed) {
    if (!(flip_fraction >= 0.0 && flip_fraction <= 0.5))
        throw config_error("label bias: flip fraction must be in [0, 0.5]");
    dataset out = ds;
    const std::size_t k =
        static_cast<std::size_t>(std::llround(flip_fraction * static_cast<double>(ds.n())));
    auto perm = rng::stream(seed, "label-flip").permutation(ds.n());
    for (std::size_t i = 0; i < k; ++i) out.y[perm[i]] = 1.0 - out.y[perm[i]];
    return out;
}

/// Force the positive share inside (feature=value) to `rate` by resampling
/// that group's rows with replacement, in place. Rows outside the group are
/// bit-identical; group size is preserved.
inline dataset set_base_rate(const dataset& ds, const std::string& feature,
                             const std::string& value, double rate, std::uint64_t seed) {
    if (!(rate > 0.0 && rate < 1.0)) throw config_error("base rate must be in (0,1)");
    const auto [f, vi] = detail::find_coarse_group(ds, feature, value);
    std::vector<std::size_t> slots, pos, neg;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        if (ds.prot_value_at(i, f) != vi) continue;
        slots.push_back(i);
        (ds.y[i] != 0.0 ? pos : neg).push_back(i);
    }
    if (slots.empty()) throw data_error("base rate: group has no examples");
    const std::size_t want_pos = static_cast<std::size_t>(
        std::llround(rate * static_cast<double>(slots.size())));
    const std::size_t want_neg = slots.size() - want_pos;
    if (want_pos > 0 && pos.empty())
        throw data_error("base rate: group has no positive examples to sample");
    if (want_neg > 0 && neg.empty())
        throw data_error("base rate: group has no negative examples to sample");
    rng gen = rng::stream(seed, "base-rate");
    std::vector<std::size_t> rows(ds.n());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    for (std::size_t k = 0; k < slots.size(); ++k) {
        rows[slots[k]] =
            k < want_pos ? pos[gen.below(pos.size())] : neg[gen.below(neg.size())];
    }
    return subset(ds, rows);
}

inline dataset apply_bias(const dataset& ds, const bias_spec& b) {
    switch (b.k) {
        case bias_spec::kind::representation:
            return inject_representation_bias(ds, b.feature, b.value, b.amount, b.seed);
        case bias_spec::kind::label_flip:
            return inject_label_bias(ds, b.amount, b.seed);
        case bias_spec::kind::base_rate:
            return set_base_rate(ds, b.feature, b.value, b.amount, b.seed);
    }
    throw config_error("bad bias kind");
}

} // namespace arl
