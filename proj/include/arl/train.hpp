#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "arl/bias.hpp"
#include "arl/common.hpp"
#include "arl/dataset.hpp"
#include "arl/loss.hpp"
#include "arl/metrics.hpp"
#include "arl/model.hpp"
#include "arl/network.hpp"
#include "arl/optimizer.hpp"

namespace arl {

enum class method { erm, ipw_s, ipw_sy, arl, dro, mindiff };

inline std::string to_string(method m) {
    switch (m) {
        case method::erm: return "ERM";
        case method::ipw_s: return "IPW(S)";
        case method::ipw_sy: return "IPW(S+Y)";
        case method::arl: return "ARL";
        case method::dro: return "DRO";
        case method::mindiff: return "MinDiff";
    }
    return "?";
}

inline method method_from_string(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    if (s == "ERM" || s == "BASELINE") return method::erm;
    if (s == "IPW" || s == "IPW(S)" || s == "IPW_S") return method::ipw_s;
    if (s == "IPW(S+Y)" || s == "IPW_SY") return method::ipw_sy;
    if (s == "ARL") return method::arl;
    if (s == "DRO") return method::dro;
    if (s == "MINDIFF" || s == "MIN-DIFF") return method::mindiff;
    throw config_error("unknown method: " + s);
}

struct train_config {
    method m = method::erm;
    double learner_lr = 0.1;
    double adversary_lr = 0.1;
    std::size_t batch_size = 128;
    std::size_t train_steps = 10000;
    std::uint64_t seed = 1;
    adversary_mode adv_mode = adversary_mode::x_plus_y;
    int adversary_depth = 1;           // 1 = linear
    int learner_steps_per_adversary = 1;
    double dro_eta = 0.0;
    double dro_alpha = 0.2;
    double mindiff_mu = 1.0;
    double capacity_multiplier = 1.0;
    optimizer_kind opt = optimizer_kind::adagrad;
    std::optional<double> pin_adversary_output; // test hook: freeze f at a constant

    void validate() const {
        if (batch_size < 2) throw config_error("batch_size must be >= 2");
        if (!(learner_lr > 0.0)) throw config_error("learner_lr must be positive");
        if (!(adversary_lr > 0.0)) throw config_error("adversary_lr must be positive");
        if (train_steps < 1) throw config_error("train_steps must be >= 1");
        if (adversary_depth < 1) throw config_error("adversary_depth must be >= 1");
        if (learner_steps_per_adversary < 1)
            throw config_error("learner_steps_per_adversary must be >= 1");
        if (!(dro_eta >= 0.0)) throw config_error("dro_eta must be >= 0");
        if (!(dro_alpha > 0.0 && dro_alpha <= 1.0))
            throw config_error("dro_alpha must be in (0,1]");
        if (!(mindiff_mu >= 0.0)) throw config_error("mindiff_mu must be >= 0");
        if (!(capacity_multiplier >= 1.0))
            throw config_error("capacity_multiplier must be >= 1");
        if (pin_adversary_output &&
            !(*pin_adversary_output > 0.0 && *pin_adversary_output < 1.0))
            throw config_error("pin_adversary_output must be in (0,1)");
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["method"] = to_string(m);
        j["learner_lr"] = learner_lr;
        j["adversary_lr"] = adversary_lr;
        j["batch_size"] = batch_size;
        j["train_steps"] = train_steps;
        j["seed"] = seed;
        j["adversary_mode"] = to_string(adv_mode);
        j["adversary_depth"] = adversary_depth;
        j["learner_steps_per_adversary"] = learner_steps_per_adversary;
        j["dro_eta"] = dro_eta;
        j["dro_alpha"] = dro_alpha;
        j["mindiff_mu"] = mindiff_mu;
        j["capacity_multiplier"] = capacity_multiplier;
        j["optimizer"] = to_string(opt);
        if (pin_adversary_output) j["pin_adversary_output"] = *pin_adversary_output;
        return j;
    }

    static train_config from_json(const nlohmann::json& j) {
        train_config c;
        if (j.contains("method")) c.m = method_from_string(j["method"].get<std::string>());
        c.learner_lr = j.value("learner_lr", c.learner_lr);
        c.adversary_lr = j.value("adversary_lr", c.adversary_lr);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.train_steps = j.value("train_steps", c.train_steps);
        c.seed = j.value("seed", c.seed);
        if (j.contains("adversary_mode"))
            c.adv_mode = adversary_mode_from_string(j["adversary_mode"].get<std::string>());
        c.adversary_depth = j.value("adversary_depth", c.adversary_depth);
        c.learner_steps_per_adversary =
            j.value("learner_steps_per_adversary", c.learner_steps_per_adversary);
        c.dro_eta = j.value("dro_eta", c.dro_eta);
        c.dro_alpha = j.value("dro_alpha", c.dro_alpha);
        c.mindiff_mu = j.value("mindiff_mu", c.mindiff_mu);
        c.capacity_multiplier = j.value("capacity_multiplier", c.capacity_multiplier);
        if (j.contains("optimizer"))
            c.opt = optimizer_from_string(j["optimizer"].get<std::string>());
        if (j.contains("pin_adversary_output"))
            c.pin_adversary_output = j["pin_adversary_output"].get<double>();
        c.validate();
        return c;
    }
};

struct train_trace {
    std::vector<double> loss;
    std::vector<double> lambda_mean, lambda_max; // ARL only
    std::vector<double> wall_ms;
};

struct run_result {
    parameter_set learner;
    std::optional<parameter_set> adversary;
    train_trace trace;
    train_config config;
};

namespace detail {

/// Epoch-shuffled mini-batches; a short final batch is kept so every epoch
/// is exhaustive.
class batch_schedule {
public:
    batch_schedule(std::size_t n, std::size_t batch_size, rng gen)
        : n_(n), batch_(std::min(batch_size, n)), gen_(std::move(gen)) {
        reshuffle();
    }

    const std::vector<std::size_t>& next() {
        if (at_ >= n_) reshuffle();
        const std::size_t len = std::min(batch_, n_ - at_);
        current_.assign(perm_.begin() + static_cast<std::ptrdiff_t>(at_),
                        perm_.begin() + static_cast<std::ptrdiff_t>(at_ + len));
        at_ += len;
        return current_;
    }

private:
    void reshuffle() {
        perm_ = gen_.permutation(n_);
        at_ = 0;
    }
    std::size_t n_, batch_, at_ = 0;
    rng gen_;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> current_;
};

template <class T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<std::size_t>& rows) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (std::size_t i : rows) out.push_back(v[i]);
    return out;
}

struct learner_step_result {
    double loss;
    std::vector<double> logit_seed;
};

// Engine shared by every method: identical RNG streams for learner init and
// batch order, so two methods whose per-example weights coincide produce
// bit-identical learners.
template <class Objective, class AfterStep>
run_result run_training(const train_config& cfg, const dataset& ds, Objective&& objective,
                        AfterStep&& after_step, std::optional<parameter_set> adversary) {
    cfg.validate();
    if (ds.n() < 2) throw data_error("training needs at least 2 examples");
    rng init_gen = rng::stream(cfg.seed, "learner-init");
    run_result res;
    res.config = cfg;
    res.learner = make_learner(ds.m(), init_gen, cfg.capacity_multiplier);
    res.adversary = std::move(adversary);
    optimizer_state opt(res.learner, {cfg.opt, cfg.learner_lr});
    batch_schedule batches(ds.n(), cfg.batch_size, rng::stream(cfg.seed, "batch-order"));
    res.trace.loss.reserve(cfg.train_steps);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t step = 0; step < cfg.train_steps; ++step) {
        const auto& rows = batches.next();
        dense_matrix xb = ds.x.take_rows(rows);
        forward_cache cache = forward_cached(res.learner, xb);
        std::vector<double> scores(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) scores[i] = cache.acts.back()(i, 0);
        learner_step_result out = objective(step, rows, scores, res);
        if (!std::isfinite(out.loss))
            throw numeric_error(to_string(cfg.m) + ": loss diverged at step " +
                                std::to_string(step));
        gradient_set grads = backward(res.learner, cache, out.logit_seed);
        try {
            opt.step(res.learner, grads);
        } catch (const numeric_error& e) {
            throw numeric_error(std::string(e.what()) + " at step " + std::to_string(step));
        }
        after_step(step, rows, scores, res);
        res.trace.loss.push_back(out.loss);
        res.trace.wall_ms.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count());
    }
    return res;
}

inline learner_step_result weighted_objective(const std::vector<std::size_t>& rows,
                                              const std::vector<double>& scores,
                                              const dataset& ds,
                                              const std::vector<double>& weights) {
    const std::vector<double> yb = gather(ds.y, rows);
    return {weighted_bce(scores, yb, weights), weighted_bce_logit_grad(scores, yb, weights)};
}

} // namespace detail

/// Standard ERM: uniform weights, mini-batch descent on mean cross entropy.
inline run_result train_erm(const train_config& cfg, const dataset& ds) {
    return detail::run_training(
        cfg, ds,
        [&](std::size_t, const std::vector<std::size_t>& rows, const std::vector<double>& scores,
            run_result&) {
            const std::vector<double> w(rows.size(), 1.0);
            return detail::weighted_objective(rows, scores, ds, w);
        },
        [](std::size_t, const std::vector<std::size_t>&, const std::vector<double>&,
           run_result&) {},
        std::nullopt);
}

/// Weighted ERM with fixed inverse-probability weights 1/p(s) or 1/p(s,y).
/// Group-aware by design; weights are precomputed once from the priors.
inline run_result train_ipw(const train_config& cfg, const dataset& ds,
                            const group_priors_t& priors) {
    const bool joint = cfg.m == method::ipw_sy;
    std::vector<double> w(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
        if (ds.group[i] < 0)
            throw data_error("IPW requires an observed group for every training example");
        double p;
        if (joint) {
            const auto it = priors.p_sy.find({ds.group[i], static_cast<int>(ds.y[i])});
            p = it == priors.p_sy.end() ? 0.0 : it->second;
        } else {
            p = priors.p_s[static_cast<std::size_t>(ds.group[i])];
        }
        if (!(p > 0.0))
            throw data_error("IPW: zero-probability cell for group " +
                             ds.groups.group_name[static_cast<std::size_t>(ds.group[i])] +
                             (joint ? (", y=" + std::to_string(static_cast<int>(ds.y[i]))) : ""));
        w[i] = 1.0 / p;
    }
    return detail::run_training(
        cfg, ds,
        [&, w](std::size_t, const std::vector<std::size_t>& rows,
               const std::vector<double>& scores, run_result&) {
            return detail::weighted_objective(rows, scores, ds, detail::gather(w, rows));
        },
        [](std::size_t, const std::vector<std::size_t>&, const std::vector<double>&,
           run_result&) {},
        std::nullopt);
}

/// Adversarially reweighted training. Per batch: the adversary's scores f
/// are rescaled to weights lambda (mean 2, min > 1); the learner descends
/// the lambda-weighted cross entropy; the adversary then ascends the same
/// objective with the learner held fixed, treating lambda as a function of
/// phi.
///
/// With F = sum(f) and mean-convention J = sum(lambda_i * ce_i) / sum(lambda)
/// (the denominator is identically 2n), the adversary gradient seeds are
///   dJ/df_j = (ce_j - sum(f*ce)/F) / (2F),   dJ/dz_j = dJ/df_j * f_j(1-f_j),
/// negated for ascent.
inline run_result train_arl(const train_config& cfg, const dataset& ds) {
    if (cfg.m != method::arl) {
        train_config fixed = cfg;
        fixed.m = method::arl;
        return train_arl(fixed, ds);
    }
    const bool pinned = cfg.pin_adversary_output.has_value();
    std::optional<parameter_set> adversary;
    {
        rng adv_gen = rng::stream(cfg.seed, "adversary-init");
        adversary = make_adversary(adversary_input_dim(ds, cfg.adv_mode), adv_gen,
                                   cfg.adversary_depth);
    }
    std::optional<optimizer_state> adv_opt;
    if (!pinned) adv_opt.emplace(*adversary, optimizer_config{cfg.opt, cfg.adversary_lr});

    // per-batch state shared between the objective and the adversary update
    struct batch_state {
        std::optional<forward_cache> adv_cache;
        std::vector<double> f, lambda;
    };
    auto state = std::make_shared<batch_state>();

    return detail::run_training(
        cfg, ds,
        [&, state](std::size_t, const std::vector<std::size_t>& rows,
                   const std::vector<double>& scores, run_result& res) {
            if (pinned) {
                state->adv_cache.reset();
                state->f.assign(rows.size(), *cfg.pin_adversary_output);
            } else {
                state->adv_cache = forward_cached(*res.adversary,
                                                  adversary_input(ds, rows, cfg.adv_mode));
                const dense_matrix& fa = state->adv_cache->acts.back();
                state->f.resize(rows.size());
                for (std::size_t i = 0; i < rows.size(); ++i) state->f[i] = fa(i, 0);
            }
            state->lambda = compute_lambda(state->f);
            return detail::weighted_objective(rows, scores, ds, state->lambda);
        },
        [&, state](std::size_t step, const std::vector<std::size_t>& rows,
                   const std::vector<double>& scores, run_result& res) {
            double lsum = 0.0, lmax = 0.0;
            for (double l : state->lambda) {
                lsum += l;
                lmax = std::max(lmax, l);
            }
            res.trace.lambda_mean.push_back(lsum / static_cast<double>(state->lambda.size()));
            res.trace.lambda_max.push_back(lmax);
            if (pinned) return;
            if ((step + 1) % static_cast<std::size_t>(cfg.learner_steps_per_adversary) != 0)
                return;
            const std::vector<double> yb = detail::gather(ds.y, rows);
            double fsum = 0.0, fl = 0.0;
            std::vector<double> ce(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                ce[i] = bce_example(scores[i], yb[i]);
                fsum += state->f[i];
                fl += state->f[i] * ce[i];
            }
            std::vector<double> seed(rows.size(), 0.0);
            if (fsum >= 1e-12) {
                const double fmean_loss = fl / fsum;
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const double djdf = (ce[i] - fmean_loss) / (2.0 * fsum);
                    seed[i] = -djdf * state->f[i] * (1.0 - state->f[i]); // ascent
                }
            }
            gradient_set g = backward(*res.adversary, *state->adv_cache, seed);
            try {
                adv_opt->step(*res.adversary, g);
            } catch (const numeric_error& e) {
                throw numeric_error("adversary: " + std::string(e.what()) + " at step " +
                                    std::to_string(step));
            }
            if (!res.adversary->all_finite())
                throw numeric_error("adversary diverged at step " + std::to_string(step));
        },
        std::move(adversary));
}

/// Distributionally robust surrogate: mean of squared hinge losses
/// [max(ce_i - eta, 0)]^2. alpha enters only through how eta is chosen.
inline run_result train_dro(const train_config& cfg, const dataset& ds) {
    return detail::run_training(
        cfg, ds,
        [&](std::size_t, const std::vector<std::size_t>& rows, const std::vector<double>& scores,
            run_result&) {
            const std::vector<double> yb = detail::gather(ds.y, rows);
            return detail::learner_step_result{dro_loss(scores, yb, cfg.dro_eta),
                                               dro_logit_grad(scores, yb, cfg.dro_eta)};
        },
        [](std::size_t, const std::vector<std::size_t>&, const std::vector<double>&,
           run_result&) {},
        std::nullopt);
}

/// Equal-opportunity comparator: mean cross entropy plus, per protected
/// feature, mu * |mean score on group-a negatives - mean score on group-b
/// negatives| within the batch. Each feature must report exactly two values;
/// batches missing either side's negatives contribute no penalty.
inline run_result train_mindiff(const train_config& cfg, const dataset& ds) {
    const auto& gv = ds.groups;
    if (gv.n_features() == 0)
        throw config_error("MinDiff requires protected features at training time");
    struct feature_sides {
        std::size_t feature;
        int value_a, value_b;
    };
    std::vector<feature_sides> feats;
    for (std::size_t f = 0; f < gv.n_features(); ++f) {
        const auto it = gv.report_values.find(gv.features[f]);
        const auto& vals = it != gv.report_values.end() ? it->second : gv.values[f];
        if (vals.size() != 2)
            throw config_error("MinDiff: protected feature " + gv.features[f] + " has " +
                               std::to_string(vals.size()) + " values, only 2 supported");
        feats.push_back({f, gv.value_index(f, vals[0]), gv.value_index(f, vals[1])});
    }
    return detail::run_training(
        cfg, ds,
        [&, feats](std::size_t, const std::vector<std::size_t>& rows,
                   const std::vector<double>& scores, run_result&) {
            const std::vector<double> yb = detail::gather(ds.y, rows);
            const std::vector<double> w(rows.size(), 1.0);
            double loss = weighted_bce(scores, yb, w);
            auto seed = weighted_bce_logit_grad(scores, yb, w);
            if (cfg.mindiff_mu != 0.0) {
                for (const auto& fs : feats) {
                    std::vector<int> side(rows.size(), -1);
                    for (std::size_t i = 0; i < rows.size(); ++i) {
                        const int v = ds.prot_value_at(rows[i], fs.feature);
                        if (v == fs.value_a) side[i] = 0;
                        else if (v == fs.value_b) side[i] = 1;
                    }
                    const score_gap gap = negative_score_gap(scores, yb, side);
                    loss += cfg.mindiff_mu * gap.value;
                    if (gap.sign == 0.0) continue;
                    for (std::size_t i = 0; i < rows.size(); ++i) {
                        if (yb[i] != 0.0 || side[i] < 0) continue;
                        const double coef =
                            side[i] == 0 ? gap.sign / static_cast<double>(gap.n_a)
                                         : -gap.sign / static_cast<double>(gap.n_b);
                        seed[i] += cfg.mindiff_mu * coef * scores[i] * (1.0 - scores[i]);
                    }
                }
            }
            return detail::learner_step_result{loss, std::move(seed)};
        },
        [](std::size_t, const std::vector<std::size_t>&, const std::vector<double>&,
           run_result&) {},
        std::nullopt);
}

inline run_result train_model(const train_config& cfg, const dataset& ds) {
    switch (cfg.m) {
        case method::erm: return train_erm(cfg, ds);
        case method::ipw_s:
        case method::ipw_sy: return train_ipw(cfg, ds, group_priors(ds));
        case method::arl: return train_arl(cfg, ds);
        case method::dro: return train_dro(cfg, ds);
        case method::mindiff: return train_mindiff(cfg, ds);
    }
    throw config_error("bad method");
}

// ---------------------------------------------------------------------------
// model selection

namespace detail {
// The only quantity model selection may look at: overall AUC of (scores,
// labels). Group annotations are not in scope here by construction.
inline double selection_score(std::span<const double> scores, std::span<const double> labels) {
    return auc(scores, labels);
}
} // namespace detail

struct grid_point_result {
    train_config config;
    double mean_val_auc = std::numeric_limits<double>::quiet_NaN();
    bool diverged = false;
};

struct grid_search_result {
    train_config best;
    std::vector<grid_point_result> table;
};

/// Exhaustive search over `space` scored by k-fold CV mean overall AUC.
/// Deterministic: ties break toward smaller batch, then smaller learner lr,
/// then declaration order. Diverging points are recorded and skipped.
inline grid_search_result grid_search(const std::vector<train_config>& space, const dataset& ds,
                                      std::size_t k = 5, std::uint64_t fold_seed = 17) {
    if (space.empty()) throw config_error("grid_search: empty search space");
    const auto folds = kfold(ds.n(), k, fold_seed);
    grid_search_result res;
    bool have_best = false;
    for (const auto& cand : space) {
        grid_point_result point;
        point.config = cand;
        double sum = 0.0;
        try {
            for (const auto& f : folds) {
                const dataset fit = subset(ds, f.fit);
                const dataset val = subset(ds, f.validate);
                const run_result run = train_model(cand, fit);
                sum += detail::selection_score(forward(run.learner, val.x), val.y);
            }
            point.mean_val_auc = sum / static_cast<double>(folds.size());
        } catch (const numeric_error&) {
            point.diverged = true;
        } catch (const data_error&) {
            point.diverged = true; // e.g. single-class validation fold
        }
        if (!point.diverged && std::isfinite(point.mean_val_auc)) {
            const bool better =
                !have_best || point.mean_val_auc > best_score_ ||
                (point.mean_val_auc == best_score_ &&
                 (cand.batch_size < res.best.batch_size ||
                  (cand.batch_size == res.best.batch_size &&
                   cand.learner_lr < res.best.learner_lr)));
            if (better) {
                res.best = cand;
                best_score_ = point.mean_val_auc;
                have_best = true;
            }
        }
        res.table.push_back(std::move(point));
    }
    if (!have_best) throw numeric_error("grid_search: every grid point diverged");
    return res;
}

/// batch-size x learning-rate grid in declaration order (batch outer). For
/// ARL the adversary lr is tied to the learner lr unless `adv_lrs` supplies
/// its own axis.
inline std::vector<train_config> expand_grid(const train_config& base,
                                             const std::vector<std::size_t>& batch_sizes,
                                             const std::vector<double>& lrs,
                                             const std::vector<double>& adv_lrs = {}) {
    std::vector<train_config> space;
    for (std::size_t b : batch_sizes) {
        for (double lr : lrs) {
            if (adv_lrs.empty()) {
                train_config c = base;
                c.batch_size = b;
                c.learner_lr = lr;
                c.adversary_lr = lr;
                space.push_back(c);
            } else {
                for (double alr : adv_lrs) {
                    train_config c = base;
                    c.batch_size = b;
                    c.learner_lr = lr;
                    c.adversary_lr = alr;
                    space.push_back(c);
                }
            }
        }
    }
    return space;
}

inline const std::vector<std::size_t>& default_batch_grid() {
    static const std::vector<std::size_t> v{32, 64, 128, 256, 512};
    return v;
}
inline const std::vector<double>& default_lr_grid() {
    static const std::vector<double> v{0.001, 0.01, 0.1, 1.0, 2.0, 5.0};
    return v;
}

/// Mean loss of the worst ceil(alpha * n) examples; the held-out criterion
/// used to pick eta for the robustness-tuned DRO variant.
inline double worst_case_risk(std::span<const double> scores, std::span<const double> labels,
                              double alpha) {
    if (scores.size() != labels.size() || scores.empty())
        throw shape_error("worst_case_risk: bad input");
    std::vector<double> losses(scores.size());
    for (std::size_t i = 0; i < losses.size(); ++i)
        losses[i] = bce_example(scores[i], labels[i]);
    std::sort(losses.begin(), losses.end(), std::greater<>());
    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(alpha * static_cast<double>(losses.size()))));
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += losses[i];
    return s / static_cast<double>(k);
}

struct eta_selection {
    double best_eta = 0.0;
    std::vector<std::pair<double, double>> table; // (eta, held-out worst-case risk)
};

/// Robustness-oriented eta search: train once per candidate on 80% of the
/// data, pick the eta whose model minimizes worst-case risk at `alpha` on
/// the held-out 20%.
inline eta_selection select_dro_eta(const train_config& base, const dataset& ds,
                                    const std::vector<double>& etas, double alpha,
                                    std::uint64_t holdout_seed = 33) {
    if (etas.empty()) throw config_error("select_dro_eta: no candidates");
    auto [fit, held] = split(ds, 0.8, holdout_seed);
    eta_selection sel;
    double best = std::numeric_limits<double>::infinity();
    for (double eta : etas) {
        train_config c = base;
        c.m = method::dro;
        c.dro_eta = eta;
        double risk = std::numeric_limits<double>::infinity();
        try {
            const run_result run = train_dro(c, fit);
            risk = worst_case_risk(forward(run.learner, held.x), held.y, alpha);
        } catch (const numeric_error&) {
        }
        sel.table.emplace_back(eta, risk);
        if (risk < best) {
            best = risk;
            sel.best_eta = eta;
        }
    }
    if (!std::isfinite(best)) throw numeric_error("select_dro_eta: all candidates diverged");
    return sel;
}

// ---------------------------------------------------------------------------
// multi-seed aggregation

struct stat {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stdev = 0.0;
    std::size_t n = 0;

    static stat of(const std::vector<double>& xs) {
        stat s;
        s.n = xs.size();
        if (xs.empty()) return s;
        double m = 0.0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        s.mean = m;
        if (xs.size() >= 2) {
            double v = 0.0;
            for (double x : xs) v += (x - m) * (x - m);
            s.stdev = std::sqrt(v / static_cast<double>(xs.size() - 1));
        }
        return s;
    }

    nlohmann::json to_json() const { return {{"mean", mean}, {"std", stdev}, {"n", n}}; }
};

struct aggregate_report {
    method m = method::erm;
    std::vector<std::uint64_t> seeds;
    stat auc_overall, auc_min, auc_macro_avg, auc_minority;
    std::vector<std::string> group_names;
    std::vector<stat> group_auc;
    std::vector<metrics_report> per_seed;
    std::vector<run_result> runs; // aligned with per_seed
    std::vector<std::uint64_t> diverged_seeds;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["method"] = to_string(m);
        j["seeds"] = seeds;
        j["auc_overall"] = auc_overall.to_json();
        j["auc_min"] = auc_min.to_json();
        j["auc_macro_avg"] = auc_macro_avg.to_json();
        j["auc_minority"] = auc_minority.to_json();
        nlohmann::json groups = nlohmann::json::object();
        for (std::size_t g = 0; g < group_names.size(); ++g)
            groups[group_names[g]] = group_auc[g].to_json();
        j["groups"] = std::move(groups);
        j["diverged_seeds"] = diverged_seeds;
        return j;
    }
};

/// Train and evaluate with seeds base_seed + {0..n-1}; report mean and
/// sample std per metric. Runs are independent, so `jobs` > 1 fans them out
/// across threads; results are merged by seed index, not completion order.
/// A diverging run is excluded and flagged.
inline aggregate_report multi_run(const train_config& cfg, const dataset& train_ds,
                                  const dataset& test_ds, std::size_t n_seeds,
                                  unsigned jobs = 1) {
    if (n_seeds < 1) throw config_error("multi_run: n_seeds must be >= 1");
    aggregate_report agg;
    agg.m = cfg.m;
    std::vector<std::optional<run_result>> results(n_seeds);
    std::vector<std::string> failures(n_seeds);
    const auto worker = [&](std::size_t s) {
        train_config c = cfg;
        c.seed = cfg.seed + s;
        try {
            results[s] = train_model(c, train_ds);
        } catch (const numeric_error& e) {
            failures[s] = e.what();
        }
    };
    if (jobs <= 1) {
        for (std::size_t s = 0; s < n_seeds; ++s) worker(s);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned t = 0; t < std::min<unsigned>(jobs, n_seeds); ++t) {
            pool.emplace_back([&] {
                for (std::size_t s = next.fetch_add(1); s < n_seeds; s = next.fetch_add(1))
                    worker(s);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> overall, mins, macros, minorities;
    std::map<std::string, std::vector<double>> per_group;
    for (std::size_t s = 0; s < n_seeds; ++s) {
        const std::uint64_t seed = cfg.seed + s;
        if (!results[s]) {
            agg.diverged_seeds.push_back(seed);
            continue;
        }
        agg.seeds.push_back(seed);
        metrics_report r = group_metrics(results[s]->learner, test_ds);
        overall.push_back(r.auc_overall);
        if (r.auc_min) mins.push_back(*r.auc_min);
        if (r.auc_macro_avg) macros.push_back(*r.auc_macro_avg);
        if (r.auc_minority) minorities.push_back(*r.auc_minority);
        for (std::size_t g = 0; g < r.group_names.size(); ++g) {
            if (r.group_auc[g]) per_group[r.group_names[g]].push_back(*r.group_auc[g]);
        }
        if (agg.group_names.empty()) agg.group_names = r.group_names;
        agg.per_seed.push_back(std::move(r));
        agg.runs.push_back(std::move(*results[s]));
    }
    agg.auc_overall = stat::of(overall);
    agg.auc_min = stat::of(mins);
    agg.auc_macro_avg = stat::of(macros);
    agg.auc_minority = stat::of(minorities);
    for (const auto& name : agg.group_names) agg.group_auc.push_back(stat::of(per_group[name]));
    return agg;
}

} // namespace arl
