#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "burstcast/core/calendar.hpp"
#include "burstcast/core/matrix.hpp"
#include "burstcast/ingest.hpp"

namespace burstcast {

enum class FeatureGroup { lag, rolling, temporal, casualty, geography, dummy };
enum class GeographyEncoding { index, onehot };
/// compact: year, week sin/cos, month, quarter (5 columns).
/// cyclic: week sin/cos, month sin/cos (4 columns).
enum class CalendarEncoding { compact, cyclic };

const char* to_string(FeatureGroup group);
std::optional<FeatureGroup> parse_feature_group(std::string_view text);

struct FeatureConfig {
    std::set<FeatureGroup> groups{FeatureGroup::lag, FeatureGroup::rolling, FeatureGroup::temporal,
                                  FeatureGroup::casualty, FeatureGroup::geography};
    std::vector<int> lag_set{52};
    std::vector<int> rolling_windows{4, 12, 52};
    GeographyEncoding geography_encoding = GeographyEncoding::index;
    CalendarEncoding calendar = CalendarEncoding::compact;
    std::string profile_name = "compact";

    /// 16 features: lag-52, mean/std over 4/12/52 weeks, 5 calendar columns,
    /// 3 casualty columns, integer geography code.
    static FeatureConfig compact();
    /// Lags {1,2,4,12,26,52}, the same rolling stats, cyclic calendar and
    /// one-hot geography; no casualty columns.
    static FeatureConfig extended();
    /// "compact", "extended" or "compact_onehot" (compact with one-hot geography).
    static std::optional<FeatureConfig> profile(std::string_view name);

    FeatureConfig without(FeatureGroup group) const;
    bool has(FeatureGroup g) const { return groups.contains(g); }

    std::size_t group_width(FeatureGroup group, std::size_t n_geographies) const;
    std::size_t feature_count(std::size_t n_geographies) const;
    /// Leading weeks consumed by lag and rolling features (at least 52).
    std::size_t warm_up() const;
};

/// Engineered covariates per geography. Row r describes panel week
/// `first_position + r`; its target is the raw count one week later.
struct FeatureMatrix {
    std::vector<WeekId> week_axis;
    std::size_t first_position = 0;
    std::vector<long> geo_ids;
    /// [geo] -> rows x F
    std::vector<Matrix> rows;
    /// [geo][row] = y_{g, t+1}
    std::vector<std::vector<double>> target;
    std::vector<std::string> feature_names;
    /// Categorical columns passed through unscaled.
    std::vector<bool> scale_exempt;

    std::size_t n_rows() const { return week_axis.size(); }
    std::size_t n_features() const { return feature_names.size(); }
    std::size_t n_geographies() const { return geo_ids.size(); }
};

/// Throws DataError if the panel is shorter than warm-up + 2 weeks.
FeatureMatrix build_features(const PanelSeries& panel, const FeatureConfig& config);

/// One CSV row per geo-week; header is geo_id, iso_monday, <feature names>, target.
void write_features_csv(std::ostream& out, const FeatureMatrix& features);

struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    bool contains(std::size_t i) const { return i >= begin && i < end; }
    bool operator==(const Range&) const = default;
};

struct SplitIndex {
    Range train, val, test;
    bool operator==(const SplitIndex&) const = default;
};

struct SplitFractions {
    double train = 0.70;
    double val = 0.15;
    double test = 0.15;
};

/// train = floor(f_train * n), val = floor(f_val * n), test = the rest.
SplitIndex chronological_split(std::size_t n_weeks, SplitFractions fractions = {});

/// Train/val/test where val and test have fixed lengths at the end of the
/// axis and train takes whatever precedes them.
SplitIndex split_with_fixed_tail(std::size_t n_weeks, std::size_t val_len, std::size_t test_len);

struct Scaler {
    std::vector<double> means;
    std::vector<double> stds;
    double target_mean = 0.0;
    double target_std = 1.0;

    void transform(std::span<const double> row, std::span<double> out) const;
    double scale_target(double y) const { return (y - target_mean) / target_std; }
    double unscale_target(double z) const { return z * target_std + target_mean; }

    bool operator==(const Scaler&) const = default;
};

inline constexpr double kDegenerateStd = 1e-12;

/// Statistics from training rows only; targets contribute only when their
/// week is also inside the training partition.
Scaler fit_scaler(const FeatureMatrix& features, const SplitIndex& split);

/// Fixed-length windows of scaled feature rows with next-week targets.
struct SequenceSet {
    std::size_t lookback = 0;
    std::size_t width = 0;
    /// N x lookback x width
    std::vector<double> inputs;
    std::vector<double> targets_raw;
    std::vector<double> targets_scaled;
    std::vector<std::size_t> geo_index;
    std::vector<long> geo_ids;
    /// Feature-matrix row of the last input week.
    std::vector<std::size_t> end_row;
    std::vector<long> target_ordinals;
    double target_mean = 0.0;
    double target_std = 1.0;

    std::size_t size() const { return targets_raw.size(); }
    std::size_t sample_size() const { return lookback * width; }
    std::span<const double> sample(std::size_t i) const {
        return {inputs.data() + i * sample_size(), sample_size()};
    }
};

struct SequenceSplits {
    SequenceSet train, val, test;
};

/// Windows never straddle partitions. With `universe_lookback` > lookback the
/// first `universe_lookback - lookback` admissible targets of each partition
/// are skipped, so models with different lookbacks see the same targets.
SequenceSplits make_sequences(const FeatureMatrix& features, const Scaler& scaler, const SplitIndex& split,
                              std::size_t lookback, std::size_t universe_lookback = 0);

/// Windows for one partition only.
SequenceSet make_partition_sequences(const FeatureMatrix& features, const Scaler& scaler, Range partition,
                                     std::size_t lookback, std::size_t universe_lookback, const char* name);

}  // namespace burstcast
