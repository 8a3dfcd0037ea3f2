#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "arl/common.hpp"
#include "arl/matrix.hpp"

namespace arl {

enum class column_role { numeric, categorical, label, protected_feature };

inline std::string to_string(column_role r) {
    switch (r) {
        case column_role::numeric: return "numeric";
        case column_role::categorical: return "categorical";
        case column_role::label: return "label";
        case column_role::protected_feature: return "protected";
    }
    return "?";
}

inline column_role column_role_from_string(const std::string& s) {
    if (s == "numeric") return column_role::numeric;
    if (s == "categorical") return column_role::categorical;
    if (s == "label") return column_role::label;
    if (s == "protected") return column_role::protected_feature;
    throw config_error("unknown column role: " + s);
}

/// Column roles plus the label's positive token and, optionally, the subset
/// of protected values that per-group metrics report on.
struct schema {
    std::vector<std::pair<std::string, column_role>> columns; // declared order
    std::string positive_label;
    std::map<std::string, std::vector<std::string>> report_values;

    column_role role_of(const std::string& name) const {
        for (const auto& [col, role] : columns) {
            if (col == name) return role;
        }
        throw data_error("column '" + name + "' not in schema");
    }

    bool has_column(const std::string& name) const {
        for (const auto& [col, role] : columns) {
            if (col == name) return true;
        }
        return false;
    }

    std::vector<std::string> protected_features() const {
        std::vector<std::string> out;
        for (const auto& [col, role] : columns) {
            if (role == column_role::protected_feature) out.push_back(col);
        }
        return out;
    }

    std::string label_column() const {
        for (const auto& [col, role] : columns) {
            if (role == column_role::label) return col;
        }
        throw config_error("schema has no label column");
    }

    void validate() const {
        int labels = 0;
        std::set<std::string> seen;
        for (const auto& [col, role] : columns) {
            if (!seen.insert(col).second) throw config_error("duplicate schema column: " + col);
            if (role == column_role::label) ++labels;
        }
        if (labels != 1)
            throw config_error("schema must declare exactly one label column, found " +
                               std::to_string(labels));
        if (positive_label.empty()) throw config_error("schema missing positive_label token");
        for (const auto& [feat, vals] : report_values) {
            if (role_of(feat) != column_role::protected_feature)
                throw config_error("report_values for non-protected column: " + feat);
            if (vals.empty()) throw config_error("empty report_values for " + feat);
        }
    }

    static schema from_json(const nlohmann::ordered_json& j) {
        schema s;
        if (!j.contains("columns") || !j["columns"].is_object())
            throw config_error("schema JSON needs a 'columns' object");
        for (const auto& [name, role] : j["columns"].items())
            s.columns.emplace_back(name, column_role_from_string(role.get<std::string>()));
        s.positive_label = j.value("positive_label", std::string{});
        if (j.contains("report_values")) {
            for (const auto& [feat, vals] : j["report_values"].items())
                s.report_values[feat] = vals.get<std::vector<std::string>>();
        }
        s.validate();
        return s;
    }

    static schema from_json_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open schema file: " + path.string());
        nlohmann::ordered_json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw config_error("schema file " + path.string() + ": " + e.what());
        }
        return from_json(j);
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json cols;
        for (const auto& [name, role] : columns) cols[name] = to_string(role);
        nlohmann::ordered_json j;
        j["columns"] = cols;
        j["positive_label"] = positive_label;
        if (!report_values.empty()) j["report_values"] = report_values;
        return j;
    }
};

struct raw_table {
    std::vector<std::string> columns; // file header order
    std::vector<std::vector<std::string>> rows;
    std::size_t dropped_rows = 0; // rows removed for missing values

    std::size_t col_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw data_error("column '" + name + "' not present");
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
    std::size_t b = 0, e = s.size();
    while (b < e && issp(s[b])) ++b;
    while (e > b && issp(s[e - 1])) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

inline bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

inline double parse_numeric(const std::string& cell, std::size_t row, const std::string& col) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw data_error("row " + std::to_string(row) + " column '" + col +
                         "': cannot parse '" + cell + "' as numeric");
    }
}

} // namespace detail

/// Read a comma-separated UTF-8 file with a header row. Rows containing a
/// missing value (empty cell or "?") are dropped and counted. Numeric cells
/// are validated here so a bad file fails fast with row/column context.
inline raw_table load_csv(const std::filesystem::path& path, const schema& sch) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open data file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw data_error("no data rows in " + path.string());
    raw_table t;
    t.columns = detail::split_csv_line(line);
    for (const auto& col : t.columns) {
        if (!sch.has_column(col))
            throw data_error("column '" + col + "' in " + path.string() + " is not in the schema");
    }
    for (const auto& [col, role] : sch.columns) {
        if (std::find(t.columns.begin(), t.columns.end(), col) == t.columns.end())
            throw data_error("schema column '" + col + "' missing from " + path.string());
    }
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row_no;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != t.columns.size())
            throw data_error("row " + std::to_string(row_no) + ": expected " +
                             std::to_string(t.columns.size()) + " cells, got " +
                             std::to_string(cells.size()));
        bool missing = false;
        for (const auto& c : cells) {
            if (detail::is_missing(c)) {
                missing = true;
                break;
            }
        }
        if (missing) {
            ++t.dropped_rows;
            continue;
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (sch.role_of(t.columns[i]) == column_role::numeric)
                detail::parse_numeric(cells[i], row_no, t.columns[i]);
        }
        t.rows.push_back(std::move(cells));
    }
    if (t.rows.empty()) throw data_error("no data rows in " + path.string());
    return t;
}

/// Per-column standardization parameters, indexed into the encoded matrix.
struct standardization {
    std::vector<std::size_t> cols; // numeric column positions in x
    std::vector<double> mean, stdev;
};

/// Protected-group bookkeeping: per-feature vocabularies, the cross-product
/// group ids, and the value subsets used for reporting.
struct group_vocab {
    std::vector<std::string> features;
    std::vector<std::vector<std::string>> values; // per feature, sorted
    std::vector<std::vector<int>> group_tuple;    // group id -> value index per feature
    std::vector<std::string> group_name;
    std::map<std::string, std::vector<std::string>> report_values;

    std::size_t n_features() const { return features.size(); }
    std::size_t n_groups() const { return group_tuple.size(); }

    int value_index(std::size_t feature, const std::string& v) const {
        const auto& vs = values[feature];
        const auto it = std::find(vs.begin(), vs.end(), v);
        return it == vs.end() ? -1 : static_cast<int>(it - vs.begin());
    }

    int group_of(const std::vector<int>& tuple) const {
        for (std::size_t g = 0; g < group_tuple.size(); ++g)
            if (group_tuple[g] == tuple) return static_cast<int>(g);
        return -1;
    }
};

/// Fitted encoding artifacts, reusable on held-out data.
struct encode_stats {
    std::map<std::string, std::vector<std::string>> cat_vocab;
    std::map<std::string, std::pair<double, double>> numeric_stats; // mean, std
    group_vocab groups;
};

/// Encoded dataset: standardized features, binary labels, evaluation-only
/// group assignments, and the protected one-hot block the adversary's S
/// modes consume. Protected columns never enter x.
struct dataset {
    dense_matrix x;
    dense_matrix x_raw; // pre-standardization copy, kept so splits can refit
    std::vector<double> y;
    std::vector<int> group;      // cross-product group id, -1 if outside vocabulary
    std::vector<int> prot_value; // n * n_features, value index per feature (-1 unseen)
    dense_matrix prot;           // n x sum(|values_f|) one-hots
    group_vocab groups;
    std::vector<std::string> x_names, prot_names;
    standardization stats;
    std::size_t dropped_rows = 0;
    std::size_t unseen_categories = 0;

    std::size_t n() const { return x.rows(); }
    std::size_t m() const { return x.cols(); }

    int prot_value_at(std::size_t i, std::size_t feature) const {
        return prot_value[i * groups.n_features() + feature];
    }

    double positive_rate() const {
        double s = 0.0;
        for (double v : y) s += v;
        return y.empty() ? 0.0 : s / static_cast<double>(y.size());
    }
};

namespace detail {

inline std::vector<std::string> sorted_unique(const raw_table& t, std::size_t col) {
    std::set<std::string> s;
    for (const auto& r : t.rows) s.insert(r[col]);
    return {s.begin(), s.end()};
}

inline void standardize_columns(dense_matrix& x, standardization& st) {
    const std::size_t n = x.rows();
    for (std::size_t k = 0; k < st.cols.size(); ++k) {
        const std::size_t c = st.cols[k];
        const double mu = st.mean[k];
        const double sd = st.stdev[k];
        for (std::size_t i = 0; i < n; ++i) x(i, c) = (x(i, c) - mu) / sd;
    }
}

inline standardization fit_standardization(const dense_matrix& x_raw,
                                           const std::vector<std::size_t>& numeric_cols) {
    standardization st;
    st.cols = numeric_cols;
    const double n = static_cast<double>(x_raw.rows());
    for (std::size_t c : numeric_cols) {
        double mu = 0.0;
        for (std::size_t i = 0; i < x_raw.rows(); ++i) mu += x_raw(i, c);
        mu /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < x_raw.rows(); ++i) {
            const double d = x_raw(i, c) - mu;
            var += d * d;
        }
        var /= n;
        double sd = std::sqrt(var);
        if (sd < 1e-12) sd = 1.0; // constant column: shift only
        st.mean.push_back(mu);
        st.stdev.push_back(sd);
    }
    return st;
}

} // namespace detail

/// One-hot encode categoricals, binarize the label, standardize numerics,
/// and assign protected-group ids. With `stats` given (the held-out path)
/// the fitted vocabularies and moments are reused; categorical values unseen
/// at fit time become all-zero one-hots and are counted.
inline dataset encode(const raw_table& raw, const schema& sch,
                      const std::optional<encode_stats>& stats = std::nullopt,
                      encode_stats* fitted_out = nullptr) {
    sch.validate();
    const std::size_t n = raw.rows.size();
    if (n == 0) throw data_error("encode: empty table");

    encode_stats fit;
    const bool reuse = stats.has_value();
    if (reuse) fit = *stats;

    // column plan, in file order
    struct col_plan {
        std::size_t raw_col;
        column_role role;
        std::vector<std::string> vocab; // categorical only
    };
    std::vector<col_plan> feature_cols;
    std::size_t label_col = 0;
    std::vector<std::size_t> protected_cols;
    std::vector<std::string> protected_names;
    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
        const column_role role = sch.role_of(raw.columns[c]);
        switch (role) {
            case column_role::label: label_col = c; break;
            case column_role::protected_feature:
                protected_cols.push_back(c);
                protected_names.push_back(raw.columns[c]);
                break;
            case column_role::numeric:
                feature_cols.push_back({c, role, {}});
                break;
            case column_role::categorical: {
                col_plan p{c, role, {}};
                if (reuse) {
                    const auto it = fit.cat_vocab.find(raw.columns[c]);
                    if (it == fit.cat_vocab.end())
                        throw data_error("encode: no fitted vocabulary for " + raw.columns[c]);
                    p.vocab = it->second;
                } else {
                    p.vocab = detail::sorted_unique(raw, c);
                    fit.cat_vocab[raw.columns[c]] = p.vocab;
                }
                feature_cols.push_back(std::move(p));
                break;
            }
        }
    }

    dataset ds;
    ds.dropped_rows = raw.dropped_rows;

    // width of x
    std::size_t width = 0;
    for (const auto& p : feature_cols)
        width += (p.role == column_role::numeric) ? 1 : p.vocab.size();
    ds.x_raw = dense_matrix(n, width);
    std::vector<std::size_t> numeric_positions;
    {
        std::size_t pos = 0;
        for (const auto& p : feature_cols) {
            const std::string& name = raw.columns[p.raw_col];
            if (p.role == column_role::numeric) {
                numeric_positions.push_back(pos);
                ds.x_names.push_back(name);
                for (std::size_t i = 0; i < n; ++i)
                    ds.x_raw(i, pos) = detail::parse_numeric(raw.rows[i][p.raw_col], i + 1, name);
                ++pos;
            } else {
                for (const auto& v : p.vocab) ds.x_names.push_back(name + "=" + v);
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& cell = raw.rows[i][p.raw_col];
                    const auto it = std::find(p.vocab.begin(), p.vocab.end(), cell);
                    if (it == p.vocab.end())
                        ++ds.unseen_categories; // all-zero one-hot
                    else
                        ds.x_raw(i, pos + static_cast<std::size_t>(it - p.vocab.begin())) = 1.0;
                }
                pos += p.vocab.size();
            }
        }
    }

    // label
    ds.y.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        ds.y[i] = raw.rows[i][label_col] == sch.positive_label ? 1.0 : 0.0;

    // protected features and groups
    if (reuse) {
        ds.groups = fit.groups;
    } else {
        ds.groups.features = protected_names;
        for (std::size_t f = 0; f < protected_cols.size(); ++f)
            ds.groups.values.push_back(detail::sorted_unique(raw, protected_cols[f]));
        ds.groups.report_values = sch.report_values;
        for (const auto& name : protected_names) {
            if (!ds.groups.report_values.count(name)) {
                const std::size_t f = static_cast<std::size_t>(
                    std::find(protected_names.begin(), protected_names.end(), name) -
                    protected_names.begin());
                ds.groups.report_values[name] = ds.groups.values[f];
            }
        }
    }
    const std::size_t n_feat = protected_cols.size();
    ds.prot_value.assign(n * n_feat, -1);
    std::size_t prot_width = 0;
    for (std::size_t f = 0; f < n_feat; ++f) prot_width += ds.groups.values[f].size();
    ds.prot = dense_matrix(n, prot_width);
    for (std::size_t f = 0; f < n_feat; ++f)
        for (const auto& v : ds.groups.values[f])
            ds.prot_names.push_back(ds.groups.features[f] + "=" + v);

    std::vector<int> tuple(n_feat);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t off = 0;
        bool known = true;
        for (std::size_t f = 0; f < n_feat; ++f) {
            const int vi = ds.groups.value_index(f, raw.rows[i][protected_cols[f]]);
            ds.prot_value[i * n_feat + f] = vi;
            if (vi >= 0)
                ds.prot(i, off + static_cast<std::size_t>(vi)) = 1.0;
            else
                known = false;
            tuple[f] = vi;
            off += ds.groups.values[f].size();
        }
        int gid = -1;
        if (known && n_feat > 0) {
            gid = ds.groups.group_of(tuple);
            if (gid < 0 && !reuse) {
                gid = static_cast<int>(ds.groups.group_tuple.size());
                ds.groups.group_tuple.push_back(tuple);
                std::string name;
                for (std::size_t f = 0; f < n_feat; ++f) {
                    if (f) name += " ";
                    name += ds.groups.values[f][static_cast<std::size_t>(tuple[f])];
                }
                ds.groups.group_name.push_back(name);
            }
        }
        ds.group.push_back(gid);
    }
    // canonicalize group ids to lexicographic tuple order so ids are
    // independent of row order
    if (!reuse && !ds.groups.group_tuple.empty()) {
        std::vector<std::size_t> order(ds.groups.group_tuple.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ds.groups.group_tuple[a] < ds.groups.group_tuple[b];
        });
        std::vector<int> remap(order.size());
        group_vocab reordered = ds.groups;
        for (std::size_t newid = 0; newid < order.size(); ++newid) {
            remap[order[newid]] = static_cast<int>(newid);
            reordered.group_tuple[newid] = ds.groups.group_tuple[order[newid]];
            reordered.group_name[newid] = ds.groups.group_name[order[newid]];
        }
        ds.groups = reordered;
        for (auto& g : ds.group)
            if (g >= 0) g = remap[static_cast<std::size_t>(g)];
    }

    // standardization
    if (reuse) {
        ds.stats.cols = numeric_positions;
        for (std::size_t k = 0; k < numeric_positions.size(); ++k) {
            const std::string& name = ds.x_names[numeric_positions[k]];
            const auto it = fit.numeric_stats.find(name);
            if (it == fit.numeric_stats.end())
                throw data_error("encode: no fitted stats for numeric column " + name);
            ds.stats.mean.push_back(it->second.first);
            ds.stats.stdev.push_back(it->second.second);
        }
    } else {
        ds.stats = detail::fit_standardization(ds.x_raw, numeric_positions);
        for (std::size_t k = 0; k < numeric_positions.size(); ++k)
            fit.numeric_stats[ds.x_names[numeric_positions[k]]] = {ds.stats.mean[k],
                                                                   ds.stats.stdev[k]};
        fit.groups = ds.groups;
    }
    ds.x = ds.x_raw;
    detail::standardize_columns(ds.x, ds.stats);

    if (fitted_out) *fitted_out = fit;
    return ds;
}

/// Rows of `ds` at `idx`, in order, duplicates allowed. Standardization is
/// inherited, not refit.
inline dataset subset(const dataset& ds, const std::vector<std::size_t>& idx) {
    dataset out;
    out.x = ds.x.take_rows(idx);
    out.x_raw = ds.x_raw.take_rows(idx);
    out.prot = ds.prot.take_rows(idx);
    const std::size_t f = ds.groups.n_features();
    out.y.reserve(idx.size());
    out.group.reserve(idx.size());
    out.prot_value.reserve(idx.size() * f);
    for (std::size_t i : idx) {
        out.y.push_back(ds.y[i]);
        out.group.push_back(ds.group[i]);
        for (std::size_t k = 0; k < f; ++k) out.prot_value.push_back(ds.prot_value[i * f + k]);
    }
    out.groups = ds.groups;
    out.x_names = ds.x_names;
    out.prot_names = ds.prot_names;
    out.stats = ds.stats;
    out.dropped_rows = ds.dropped_rows;
    out.unseen_categories = ds.unseen_categories;
    return out;
}

/// Seeded 70/30-style split. Standardization is refit on the training part
/// and applied to both sides, so the held-out side never leaks into the
/// moments.
inline std::pair<dataset, dataset> split(const dataset& ds, double train_fraction,
                                         std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw config_error("split: train_fraction must be in (0,1)");
    const std::size_t n = ds.n();
    if (n < 2) throw data_error("split: need at least 2 rows");
    auto perm = rng::stream(seed, "train-test-split").permutation(n);
    std::size_t n_train =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    std::vector<std::size_t> tr(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> te(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    dataset train = subset(ds, tr);
    dataset test = subset(ds, te);
    const standardization st = detail::fit_standardization(train.x_raw, ds.stats.cols);
    train.stats = st;
    test.stats = st;
    train.x = train.x_raw;
    test.x = test.x_raw;
    detail::standardize_columns(train.x, train.stats);
    detail::standardize_columns(test.x, test.stats);
    return {std::move(train), std::move(test)};
}

/// k disjoint, exhaustive (fit, validate) index pairs; fold sizes differ by
/// at most one.
struct fold {
    std::vector<std::size_t> fit, validate;
};

inline std::vector<fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw config_error("kfold: k must be >= 2");
    if (n < k) throw data_error("kfold: n=" + std::to_string(n) + " < k=" + std::to_string(k));
    auto perm = rng::stream(seed, "kfold").permutation(n);
    std::vector<fold> folds(k);
    const std::size_t base = n / k, extra = n % k;
    std::size_t at = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        folds[f].validate.assign(perm.begin() + static_cast<std::ptrdiff_t>(at),
                                 perm.begin() + static_cast<std::ptrdiff_t>(at + len));
        at += len;
    }
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t g = 0; g < k; ++g) {
            if (g == f) continue;
            folds[f].fit.insert(folds[f].fit.end(), folds[g].validate.begin(),
                                folds[g].validate.end());
        }
    }
    return folds;
}

/// Empirical group frequencies p(s) and joint p(s,y) over examples with a
/// known group id.
struct group_priors_t {
    std::vector<double> p_s; // indexed by group id
    std::map<std::pair<int, int>, double> p_sy;
};

inline group_priors_t group_priors(const dataset& ds) {
    if (ds.n() == 0) throw data_error("group_priors: empty dataset");
    group_priors_t pr;
    pr.p_s.assign(ds.groups.n_groups(), 0.0);
    std::map<std::pair<int, int>, std::size_t> joint;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        if (ds.group[i] < 0) continue;
        ++counted;
        pr.p_s[static_cast<std::size_t>(ds.group[i])] += 1.0;
        ++joint[{ds.group[i], static_cast<int>(ds.y[i])}];
    }
    if (counted == 0) throw data_error("group_priors: no examples with known group");
    for (auto& p : pr.p_s) p /= static_cast<double>(counted);
    for (const auto& [key, cnt] : joint)
        pr.p_sy[key] = static_cast<double>(cnt) / static_cast<double>(counted);
    return pr;
}

/// Audit dump of an encoded dataset: encoded feature columns in their
/// fixed order, then label and group. Byte-stable for identical inputs.
inline void dump_csv(const dataset& ds, std::ostream& out) {
    for (std::size_t j = 0; j < ds.x_names.size(); ++j) out << ds.x_names[j] << ",";
    out << "label,group\n";
    out.precision(17);
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t j = 0; j < ds.m(); ++j) out << ds.x(i, j) << ",";
        out << ds.y[i] << ","
            << (ds.group[i] >= 0 ? ds.groups.group_name[static_cast<std::size_t>(ds.group[i])]
                                 : std::string("<other>"))
            << "\n";
    }
}

/// In-memory dataset over a single protected feature; used by the synthetic
/// studies and tests. `x` is taken as already standardized.
inline dataset make_simple_dataset(dense_matrix x, std::vector<double> y,
                                   const std::vector<std::string>& group_of,
                                   const std::string& feature_name = "group") {
    if (x.rows() != y.size() || x.rows() != group_of.size())
        throw shape_error("make_simple_dataset: length mismatch");
    dataset ds;
    ds.x = std::move(x);
    ds.x_raw = ds.x;
    ds.y = std::move(y);
    std::set<std::string> vocab(group_of.begin(), group_of.end());
    ds.groups.features = {feature_name};
    ds.groups.values = {{vocab.begin(), vocab.end()}};
    ds.groups.report_values[feature_name] = ds.groups.values[0];
    for (std::size_t v = 0; v < ds.groups.values[0].size(); ++v) {
        ds.groups.group_tuple.push_back({static_cast<int>(v)});
        ds.groups.group_name.push_back(ds.groups.values[0][v]);
        ds.prot_names.push_back(feature_name + "=" + ds.groups.values[0][v]);
    }
    ds.prot = dense_matrix(ds.y.size(), ds.groups.values[0].size());
    for (std::size_t i = 0; i < group_of.size(); ++i) {
        const int vi = ds.groups.value_index(0, group_of[i]);
        ds.group.push_back(vi);
        ds.prot_value.push_back(vi);
        ds.prot(i, static_cast<std::size_t>(vi)) = 1.0;
    }
    for (std::size_t j = 0; j < ds.m(); ++j) ds.x_names.push_back("x" + std::to_string(j));
    return ds;
}

} // namespace arl
