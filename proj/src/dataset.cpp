#include "burstcast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "burstcast/core/csv.hpp"
#include "burstcast/core/error.hpp"

namespace burstcast {

namespace {

constexpr FeatureGroup kGroupOrder[] = {FeatureGroup::lag,      FeatureGroup::rolling,   FeatureGroup::temporal,
                                        FeatureGroup::casualty, FeatureGroup::geography, FeatureGroup::dummy};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

const char* to_string(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::lag: return "lag";
        case FeatureGroup::rolling: return "rolling";
        case FeatureGroup::temporal: return "temporal";
        case FeatureGroup::casualty: return "casualty";
        case FeatureGroup::geography: return "geography";
        case FeatureGroup::dummy: return "dummy";
    }
    return "unknown";
}

std::optional<FeatureGroup> parse_feature_group(std::string_view text) {
    for (auto g : kGroupOrder)
        if (text == to_string(g)) return g;
    return std::nullopt;
}

FeatureConfig FeatureConfig::compact() { return FeatureConfig{}; }

FeatureConfig FeatureConfig::extended() {
    FeatureConfig c;
    c.groups = {FeatureGroup::lag, FeatureGroup::rolling, FeatureGroup::temporal, FeatureGroup::geography};
    c.lag_set = {1, 2, 4, 12, 26, 52};
    c.calendar = CalendarEncoding::cyclic;
    c.geography_encoding = GeographyEncoding::onehot;
    c.profile_name = "extended";
    return c;
}

std::optional<FeatureConfig> FeatureConfig::profile(std::string_view name) {
    if (name == "compact") return compact();
    if (name == "extended") return extended();
    if (name == "compact_onehot") {
        auto c = compact();
        c.geography_encoding = GeographyEncoding::onehot;
        c.profile_name = "compact_onehot";
        return c;
    }
    return std::nullopt;
}

FeatureConfig FeatureConfig::without(FeatureGroup group) const {
    FeatureConfig c = *this;
    c.groups.erase(group);
    return c;
}

std::size_t FeatureConfig::group_width(FeatureGroup group, std::size_t n_geographies) const {
    if (!has(group)) return 0;
    switch (group) {
        case FeatureGroup::lag: return lag_set.size();
        case FeatureGroup::rolling: return 2 * rolling_windows.size();
        case FeatureGroup::temporal: return calendar == CalendarEncoding::compact ? 5 : 4;
        case FeatureGroup::casualty: return 3;
        case FeatureGroup::geography: return geography_encoding == GeographyEncoding::index ? 1 : n_geographies;
        case FeatureGroup::dummy: return 1;
    }
    return 0;
}

std::size_t FeatureConfig::feature_count(std::size_t n_geographies) const {
    std::size_t f = 0;
    for (auto g : kGroupOrder) f += group_width(g, n_geographies);
    return f;
}

std::size_t FeatureConfig::warm_up() const {
    std::size_t w = 52;
    for (int l : lag_set) w = std::max(w, static_cast<std::size_t>(l));
    for (int r : rolling_windows) w = std::max(w, static_cast<std::size_t>(r) - 1);
    return w;
}

FeatureMatrix build_features(const PanelSeries& panel, const FeatureConfig& config) {
    for (int l : config.lag_set)
        if (l < 1) throw std::invalid_argument("feature config: lags must be >= 1");
    for (int r : config.rolling_windows)
        if (r < 1) throw std::invalid_argument("feature config: rolling windows must be >= 1");

    const std::size_t T = panel.n_weeks();
    const std::size_t warm = config.warm_up();
    if (T < warm + 2)
        throw DataError("build_features: panel has " + std::to_string(T) + " weeks; at least " +
                        std::to_string(warm + 2) + " are required (warm-up " + std::to_string(warm) +
                        " + one row + one target week)");
    const std::size_t G = panel.n_geographies();
    const std::size_t n_rows = T - warm - 1;

    FeatureMatrix fm;
    fm.first_position = warm;
    fm.geo_ids = panel.geo_ids;
    fm.week_axis.assign(panel.week_axis.begin() + static_cast<long>(warm),
                        panel.week_axis.begin() + static_cast<long>(warm + n_rows));

    auto add_name = [&](std::string name, bool exempt) {
        fm.feature_names.push_back(std::move(name));
        fm.scale_exempt.push_back(exempt);
    };
    for (auto group : kGroupOrder) {
        if (!config.has(group)) continue;
        switch (group) {
            case FeatureGroup::lag:
                for (int l : config.lag_set) add_name("lag_" + std::to_string(l), false);
                break;
            case FeatureGroup::rolling:
                for (int w : config.rolling_windows) {
                    add_name("roll_mean_" + std::to_string(w), false);
                    add_name("roll_std_" + std::to_string(w), false);
                }
                break;
            case FeatureGroup::temporal:
                if (config.calendar == CalendarEncoding::compact) {
                    for (const char* n : {"year", "week_sin", "week_cos", "month", "quarter"}) add_name(n, false);
                } else {
                    for (const char* n : {"week_sin", "week_cos", "month_sin", "month_cos"}) add_name(n, false);
                }
                break;
            case FeatureGroup::casualty:
                for (const char* n : {"casualties_total", "killed", "wounded"}) add_name(n, false);
                break;
            case FeatureGroup::geography:
                if (config.geography_encoding == GeographyEncoding::index) {
                    add_name("geo_index", true);
                } else {
                    for (long id : panel.geo_ids) add_name("geo_" + std::to_string(id), true);
                }
                break;
            case FeatureGroup::dummy:
                add_name("dummy_zero", false);
                break;
        }
    }
    const std::size_t F = fm.feature_names.size();

    // Calendar columns are shared by every geography.
    Matrix calendar(n_rows, 5);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const Date monday = fm.week_axis[r].monday;
        const int week = iso_week_number(monday);
        const int month = static_cast<int>(static_cast<unsigned>(monday.month()));
        calendar(r, 0) = (static_cast<int>(monday.year()) - 1970) / 10.0;
        calendar(r, 1) = std::sin(kTwoPi * week / 52.0);
        calendar(r, 2) = std::cos(kTwoPi * week / 52.0);
        calendar(r, 3) = month;
        calendar(r, 4) = (month - 1) / 3 + 1;
    }

    fm.rows.assign(G, Matrix(n_rows, F));
    fm.target.assign(G, std::vector<double>(n_rows));

#pragma omp parallel for schedule(static)
    for (std::size_t g = 0; g < G; ++g) {
        const auto& y = panel.counts[g];
        Matrix& m = fm.rows[g];
        for (std::size_t r = 0; r < n_rows; ++r) {
            const std::size_t t = warm + r;
            std::size_t c = 0;
            auto row = m.row(r);
            if (config.has(FeatureGroup::lag))
                for (int l : config.lag_set) row[c++] = static_cast<double>(y[t - static_cast<std::size_t>(l)]);
            if (config.has(FeatureGroup::rolling)) {
                for (int wi : config.rolling_windows) {
                    const auto w = static_cast<std::size_t>(wi);
                    double sum = 0.0;
                    for (std::size_t k = t + 1 - w; k <= t; ++k) sum += static_cast<double>(y[k]);
                    const double mean = sum / static_cast<double>(w);
                    double ss = 0.0;
                    for (std::size_t k = t + 1 - w; k <= t; ++k) {
                        const double d = static_cast<double>(y[k]) - mean;
                        ss += d * d;
                    }
                    row[c++] = mean;
                    row[c++] = std::sqrt(ss / static_cast<double>(w));
                }
            }
            if (config.has(FeatureGroup::temporal)) {
                if (config.calendar == CalendarEncoding::compact) {
                    for (std::size_t k = 0; k < 5; ++k) row[c++] = calendar(r, k);
                } else {
                    const double month = calendar(r, 3);
                    row[c++] = calendar(r, 1);
                    row[c++] = calendar(r, 2);
                    row[c++] = std::sin(kTwoPi * month / 12.0);
                    row[c++] = std::cos(kTwoPi * month / 12.0);
                }
            }
            if (config.has(FeatureGroup::casualty)) {
                row[c++] = panel.casualties_total[g][t];
                row[c++] = panel.killed[g][t];
                row[c++] = panel.wounded[g][t];
            }
            if (config.has(FeatureGroup::geography)) {
                if (config.geography_encoding == GeographyEncoding::index) {
                    row[c++] = static_cast<double>(g);
                } else {
                    for (std::size_t k = 0; k < G; ++k) row[c++] = k == g ? 1.0 : 0.0;
                }
            }
            if (config.has(FeatureGroup::dummy)) row[c++] = 0.0;
            fm.target[g][r] = static_cast<double>(y[t + 1]);
        }
    }
    return fm;
}

void write_features_csv(std::ostream& out, const FeatureMatrix& features) {
    out << "geo_id,iso_monday";
    for (const auto& n : features.feature_names) out << ',' << n;
    out << ",target\n";
    for (std::size_t g = 0; g < features.n_geographies(); ++g) {
        for (std::size_t r = 0; r < features.n_rows(); ++r) {
            out << features.geo_ids[g] << ',' << to_iso_string(features.week_axis[r].monday);
            for (double v : features.rows[g].row(r)) out << ',' << csv::format_double(v);
            out << ',' << csv::format_double(features.target[g][r]) << '\n';
        }
    }
}

SplitIndex chronological_split(std::size_t n, SplitFractions f) {
    if (f.train <= 0.0 || f.val <= 0.0 || f.test <= 0.0 || std::fabs(f.train + f.val + f.test - 1.0) > 1e-9)
        throw std::invalid_argument("chronological_split: fractions must be positive and sum to 1");
    const auto n_train = static_cast<std::size_t>(std::floor(f.train * static_cast<double>(n) + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(f.val * static_cast<double>(n) + 1e-9));
    if (n_train < 1 || n_val < 1 || n_train + n_val >= n)
        throw DataError("chronological_split: " + std::to_string(n) +
                        " weeks cannot give every partition at least one week");
    return SplitIndex{{0, n_train}, {n_train, n_train + n_val}, {n_train + n_val, n}};
}

SplitIndex split_with_fixed_tail(std::size_t n, std::size_t val_len, std::size_t test_len) {
    if (val_len < 1 || test_len < 1 || val_len + test_len >= n)
        throw DataError("split_with_fixed_tail: axis of " + std::to_string(n) + " weeks leaves no training weeks");
    const std::size_t val_begin = n - test_len - val_len;
    return SplitIndex{{0, val_begin}, {val_begin, n - test_len}, {n - test_len, n}};
}

void Scaler::transform(std::span<const double> row, std::span<double> out) const {
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - means[j]) / stds[j];
}

Scaler fit_scaler(const FeatureMatrix& fm, const SplitIndex& split) {
    const Range tr = split.train;
    if (tr.size() == 0 || tr.end > fm.n_rows()) throw DataError("fit_scaler: empty or out-of-range train partition");
    const std::size_t F = fm.n_features();
    const std::size_t G = fm.n_geographies();
    const double n = static_cast<double>(tr.size() * G);

    Scaler s;
    s.means.assign(F, 0.0);
    s.stds.assign(F, 1.0);
    for (std::size_t j = 0; j < F; ++j) {
        if (fm.scale_exempt[j]) {
            s.means[j] = 0.0;
            s.stds[j] = 1.0;
            continue;
        }
        double sum = 0.0;
        for (std::size_t g = 0; g < G; ++g)
            for (std::size_t r = tr.begin; r < tr.end; ++r) sum += fm.rows[g](r, j);
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t g = 0; g < G; ++g)
            for (std::size_t r = tr.begin; r < tr.end; ++r) {
                const double d = fm.rows[g](r, j) - mean;
                ss += d * d;
            }
        const double sd = std::sqrt(ss / n);
        s.means[j] = mean;
        s.stds[j] = sd < kDegenerateStd ? 1.0 : sd;
    }

    // Target of row r is week r+1, so only rows whose successor is in train.
    if (tr.size() >= 2) {
        const double m = static_cast<double>((tr.size() - 1) * G);
        double sum = 0.0;
        for (std::size_t g = 0; g < G; ++g)
            for (std::size_t r = tr.begin; r + 1 < tr.end; ++r) sum += fm.target[g][r];
        const double mean = sum / m;
        double ss = 0.0;
        for (std::size_t g = 0; g < G; ++g)
            for (std::size_t r = tr.begin; r + 1 < tr.end; ++r) {
                const double d = fm.target[g][r] - mean;
                ss += d * d;
            }
        const double sd = std::sqrt(ss / m);
        s.target_mean = mean;
        s.target_std = sd < kDegenerateStd ? 1.0 : sd;
    }
    return s;
}

SequenceSet make_partition_sequences(const FeatureMatrix& fm, const Scaler& scaler, Range part, std::size_t L,
                                     std::size_t universe, const char* name) {
    if (L < 1) throw std::invalid_argument("make_sequences: lookback must be >= 1");
    const std::size_t U = std::max(L, universe);
    if (part.end > fm.n_rows()) throw DataError(std::string("make_sequences: ") + name + " partition out of range");
    if (part.size() < U + 1)
        throw DataError(std::string("make_sequences: ") + name + " partition has " + std::to_string(part.size()) +
                        " weeks; lookback " + std::to_string(U) + " needs at least " + std::to_string(U + 1));
    const std::size_t F = fm.n_features();
    const std::size_t G = fm.n_geographies();

    SequenceSet s;
    s.lookback = L;
    s.width = F;
    s.target_mean = scaler.target_mean;
    s.target_std = scaler.target_std;

    // Last input row e runs over [begin + U - 1, end - 2]; the target week e+1
    // then stays inside the partition.
    const std::size_t first_end = part.begin + U - 1;
    const std::size_t per_geo = part.end - 1 - first_end;
    const std::size_t N = per_geo * G;
    s.inputs.resize(N * L * F);
    s.targets_raw.reserve(N);

    std::vector<Matrix> scaled(G, Matrix(part.size(), F));
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t r = part.begin; r < part.end; ++r)
            scaler.transform(fm.rows[g].row(r), scaled[g].row(r - part.begin));

    std::size_t i = 0;
    for (std::size_t g = 0; g < G; ++g) {
        for (std::size_t e = first_end; e + 1 < part.end; ++e, ++i) {
            double* dst = s.inputs.data() + i * L * F;
            for (std::size_t k = 0; k < L; ++k) {
                auto src = scaled[g].row(e + 1 - L + k - part.begin);
                std::copy(src.begin(), src.end(), dst + k * F);
            }
            const double y = fm.target[g][e];
            s.targets_raw.push_back(y);
            s.targets_scaled.push_back(scaler.scale_target(y));
            s.geo_index.push_back(g);
            s.geo_ids.push_back(fm.geo_ids[g]);
            s.end_row.push_back(e);
            s.target_ordinals.push_back(fm.week_axis[e + 1].ordinal);
        }
    }
    return s;
}

SequenceSplits make_sequences(const FeatureMatrix& fm, const Scaler& scaler, const SplitIndex& split, std::size_t L,
                              std::size_t universe) {
    SequenceSplits out;
    out.train = make_partition_sequences(fm, scaler, split.train, L, universe, "train");
    out.val = make_partition_sequences(fm, scaler, split.val, L, universe, "validation");
    out.test = make_partition_sequences(fm, scaler, split.test, L, universe, "test");
    return out;
}

}  // namespace burstcast
