#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arl/common.hpp"
#include "arl/dataset.hpp"
#include "arl/network.hpp"

namespace arl {

/// Mann-Whitney AUC with half credit for ties (midranks); equals the
/// trapezoidal ROC area. Throws when labels are single-class: an undefined
/// AUC is reported absent, never as 0.
inline double auc(std::span<const double> scores, std::span<const double> labels) {
    if (scores.size() != labels.size()) throw shape_error("auc: length mismatch");
    const std::size_t n = scores.size();
    std::size_t npos = 0;
    for (double y : labels) npos += y != 0.0 ? 1 : 0;
    const std::size_t nneg = n - npos;
    if (npos == 0 || nneg == 0)
        throw data_error("auc undefined: labels contain a single class");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1); // 1-based
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] != 0.0) rank_sum_pos += midrank;
        }
        i = j + 1;
    }
    const double np = static_cast<double>(npos), nn = static_cast<double>(nneg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

inline double accuracy_at(std::span<const double> scores, std::span<const double> labels,
                          double threshold = 0.5) {
    if (scores.size() != labels.size()) throw shape_error("accuracy: length mismatch");
    if (scores.empty()) throw data_error("accuracy: empty input");
    std::size_t ok = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double pred = scores[i] >= threshold ? 1.0 : 0.0;
        ok += pred == labels[i] ? 1 : 0;
    }
    return static_cast<double>(ok) / static_cast<double>(scores.size());
}

/// A reporting group is a conjunction of (protected feature, value)
/// conditions: coarse groups have one condition, intersections one per
/// feature.
struct report_group {
    std::string name;
    std::vector<std::pair<std::size_t, int>> conditions;
};

/// Coarse per-feature groups followed by the full cross product of the
/// report values (e.g. W, B, M, F, then WM, WF, BM, BF).
inline std::vector<report_group> report_groups(const group_vocab& gv) {
    std::vector<report_group> out;
    std::vector<std::vector<int>> report_idx(gv.n_features());
    for (std::size_t f = 0; f < gv.n_features(); ++f) {
        const auto it = gv.report_values.find(gv.features[f]);
        const auto& vals = it != gv.report_values.end() ? it->second : gv.values[f];
        for (const auto& v : vals) {
            const int vi = gv.value_index(f, v);
            if (vi < 0) continue; // declared but never observed
            report_idx[f].push_back(vi);
            out.push_back({v, {{f, vi}}});
        }
    }
    if (gv.n_features() >= 2) {
        std::vector<std::size_t> at(gv.n_features(), 0);
        while (true) {
            report_group g;
            bool ok = true;
            for (std::size_t f = 0; f < gv.n_features(); ++f) {
                if (report_idx[f].empty()) {
                    ok = false;
                    break;
                }
                const int vi = report_idx[f][at[f]];
                if (f) g.name += " ";
                g.name += gv.values[f][static_cast<std::size_t>(vi)];
                g.conditions.emplace_back(f, vi);
            }
            if (!ok) break;
            out.push_back(std::move(g));
            std::size_t f = gv.n_features();
            while (f-- > 0) {
                if (++at[f] < report_idx[f].size()) break;
                at[f] = 0;
                if (f == 0) return out;
            }
        }
    }
    return out;
}

inline bool in_group(const dataset& ds, std::size_t i, const report_group& g) {
    for (const auto& [f, vi] : g.conditions) {
        if (ds.prot_value_at(i, f) != vi) return false;
    }
    return true;
}

/// Per-group AUCs plus the Rawlsian aggregates. Groups whose test labels are
/// single-class carry no AUC and are excluded from min / macro-avg /
/// minority.
struct metrics_report {
    double auc_overall = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> group_names;
    std::vector<std::optional<double>> group_auc;
    std::vector<std::size_t> group_n;
    std::vector<std::optional<double>> group_fpr, group_fnr; // at threshold 0.5
    std::optional<double> auc_min, auc_macro_avg, auc_minority;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["auc_overall"] = auc_overall;
        nlohmann::json groups = nlohmann::json::object();
        for (std::size_t g = 0; g < group_names.size(); ++g) {
            nlohmann::json jg;
            jg["n"] = group_n[g];
            if (group_auc[g]) jg["auc"] = *group_auc[g];
            if (group_fpr[g]) jg["fpr"] = *group_fpr[g];
            if (group_fnr[g]) jg["fnr"] = *group_fnr[g];
            groups[group_names[g]] = std::move(jg);
        }
        j["groups"] = std::move(groups);
        if (auc_min) j["auc_min"] = *auc_min;
        if (auc_macro_avg) j["auc_macro_avg"] = *auc_macro_avg;
        if (auc_minority) j["auc_minority"] = *auc_minority;
        return j;
    }

    /// Column order follows the comparison-table layout: overall, macro-avg,
    /// min, minority, then each reported group.
    static std::string csv_header(const std::vector<std::string>& group_names) {
        std::string h = "auc_avg,auc_macro_avg,auc_min,auc_minority";
        for (const auto& g : group_names) h += ",auc_" + g;
        return h;
    }

    std::string csv_row() const {
        std::ostringstream os;
        os.precision(17);
        const auto cell = [&](const std::optional<double>& v) {
            os << ",";
            if (v) os << *v;
        };
        os << auc_overall;
        cell(auc_macro_avg);
        cell(auc_min);
        cell(auc_minority);
        for (const auto& a : group_auc) cell(a);
        return os.str();
    }
};

/// Stratified evaluation. Scores must be computed without group access; this
/// overload only uses the groups to slice rows.
inline metrics_report group_metrics_from_scores(std::span<const double> scores,
                                                const dataset& ds) {
    if (scores.size() != ds.n()) throw shape_error("group_metrics: score count mismatch");
    metrics_report r;
    r.auc_overall = auc(scores, ds.y);
    double min_auc = 2.0, macro = 0.0;
    std::size_t present = 0, minority_n = 0;
    std::optional<double> minority_auc;
    for (const auto& g : report_groups(ds.groups)) {
        std::vector<double> s, y;
        for (std::size_t i = 0; i < ds.n(); ++i) {
            if (in_group(ds, i, g)) {
                s.push_back(scores[i]);
                y.push_back(ds.y[i]);
            }
        }
        r.group_names.push_back(g.name);
        r.group_n.push_back(s.size());
        std::optional<double> a, fpr, fnr;
        std::size_t tn = 0, fp = 0, fn = 0, tp = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const bool pred = s[i] >= 0.5;
            if (y[i] == 0.0)
                pred ? ++fp : ++tn;
            else
                pred ? ++tp : ++fn;
        }
        if (fp + tn > 0) fpr = static_cast<double>(fp) / static_cast<double>(fp + tn);
        if (fn + tp > 0) fnr = static_cast<double>(fn) / static_cast<double>(fn + tp);
        try {
            a = auc(s, y);
        } catch (const data_error&) {
            a = std::nullopt; // single-class group: reported absent
        }
        if (a) {
            ++present;
            macro += *a;
            min_auc = std::min(min_auc, *a);
            if (!minority_auc || s.size() < minority_n) {
                minority_n = s.size();
                minority_auc = a;
            }
        }
        r.group_auc.push_back(a);
        r.group_fpr.push_back(fpr);
        r.group_fnr.push_back(fnr);
    }
    if (present > 0) {
        r.auc_min = min_auc;
        r.auc_macro_avg = macro / static_cast<double>(present);
        r.auc_minority = minority_auc;
    }
    return r;
}

inline metrics_report group_metrics(const parameter_set& learner, const dataset& test) {
    return group_metrics_from_scores(forward(learner, test.x), test);
}

/// |FPR(a) - FPR(b)| between the two reported values of one protected
/// feature, at the given threshold.
inline double fpr_gap(const parameter_set& learner, const dataset& test,
                      const std::string& protected_feature, double threshold = 0.5) {
    const auto& gv = test.groups;
    const auto fit = std::find(gv.features.begin(), gv.features.end(), protected_feature);
    if (fit == gv.features.end())
        throw config_error("fpr_gap: unknown protected feature " + protected_feature);
    const std::size_t f = static_cast<std::size_t>(fit - gv.features.begin());
    const auto it = gv.report_values.find(protected_feature);
    const auto& vals = it != gv.report_values.end() ? it->second : gv.values[f];
    if (vals.size() != 2)
        throw config_error("fpr_gap: feature " + protected_feature + " must have 2 values");
    const auto scores = forward(learner, test.x);
    double fpr[2];
    for (int side = 0; side < 2; ++side) {
        const int vi = gv.value_index(f, vals[static_cast<std::size_t>(side)]);
        std::size_t fp = 0, tn = 0;
        for (std::size_t i = 0; i < test.n(); ++i) {
            if (test.prot_value_at(i, f) != vi || test.y[i] != 0.0) continue;
            scores[i] >= threshold ? ++fp : ++tn;
        }
        if (fp + tn == 0)
            throw data_error("fpr_gap: group " + vals[static_cast<std::size_t>(side)] +
                             " has no negative examples");
        fpr[side] = static_cast<double>(fp) / static_cast<double>(fp + tn);
    }
    return std::fabs(fpr[0] - fpr[1]);
}

} // namespace arl
