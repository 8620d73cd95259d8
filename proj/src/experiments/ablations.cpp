#include "burstcast/experiments/ablations.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "burstcast/core/error.hpp"

namespace burstcast::experiments {

using nlohmann::json;

namespace {

ResultTable empty_table(const std::string& family, const RunContext& ctx) {
    ResultTable t;
    t.family = family;
    t.seed = ctx.config.seed;
    t.config_hash = config_hash(ctx.config);
    return t;
}

ResultRow row_from(const ModelRun& r) {
    ResultRow row;
    row.config_label = r.label;
    row.model = r.model;
    row.samples = r.samples;
    row.rmse = r.metrics.macro.rmse;
    row.mae = r.metrics.macro.mae;
    row.mse = r.metrics.macro.mse;
    row.r2 = r.metrics.macro.r2;
    row.pooled_rmse = r.metrics.pooled.rmse;
    row.epochs_ran = r.epochs;
    row.n_features = r.n_features;
    row.parameters = r.parameters;
    return row;
}

ResultRow failed_row(const std::string& label, const std::string& model, const std::string& why) {
    ResultRow row;
    row.config_label = label;
    row.model = model;
    row.rmse = row.mae = row.mse = row.r2 = row.pooled_rmse = std::nan("");
    row.status = "failed: " + why;
    return row;
}

ResultRow skipped_row(const std::string& label, const std::string& model, const std::string& why) {
    ResultRow row = failed_row(label, model, why);
    row.status = "skipped: " + why;
    return row;
}

bool is_baseline(const std::string& name) {
    return std::find(kBaselineModels.begin(), kBaselineModels.end(), name) != kBaselineModels.end();
}

DeepRunOptions deep_options(const RunContext& ctx, nn::Variant v, std::size_t lookback, std::size_t universe = 0,
                            std::uint64_t seed_offset = 0) {
    DeepRunOptions o;
    o.variant = v;
    o.lookback = lookback;
    o.universe_lookback = universe;
    o.train = ctx.config.train;
    o.train.seed = ctx.config.seed + seed_offset;
    o.log = ctx.log;
    return o;
}

std::vector<double> per_geo_rmse(const MetricReport& m) {
    std::vector<double> v;
    for (const auto& g : m.per_geo) v.push_back(g.rmse);
    return v;
}

void say(const RunContext& ctx, const std::string& msg) {
    if (ctx.log) ctx.log(msg);
}

void fill_pct_change(ResultTable& t, const std::string& reference_label) {
    const ResultRow* ref = t.find(reference_label);
    if (!ref || !ref->ok() || !(ref->rmse > 0.0)) return;
    const double base = ref->rmse;
    for (auto& r : t.rows)
        if (r.ok()) r.pct_change_vs_baseline = 100.0 * (r.rmse / base - 1.0);
}

}  // namespace

ResultTable run_main_comparison(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    ResultTable t = empty_table("main", ctx);
    const Prepared d = prepare(ctx.panel, cfg.features, cfg.split);
    const EvalTargets targets = evaluable_targets(d, cfg.lookback);
    TestGate gate;
    std::map<std::string, MetricReport> reports;

    for (const auto& name : cfg.models) {
        say(ctx, "main: " + name);
        try {
            ModelRun r = is_baseline(name)
                             ? run_baseline(name, d, targets, cfg, gate, name)
                             : run_deep(d, targets, deep_options(ctx, *nn::parse_variant(name), cfg.lookback), gate,
                                        name);
            reports[name] = r.metrics;
            t.rows.push_back(row_from(r));
        } catch (const std::exception& e) {
            t.rows.push_back(failed_row(name, name, e.what()));
        }
    }

    const ResultRow* best = nullptr;
    for (const auto& r : t.rows)
        if (is_baseline(r.config_label) && r.ok() && (!best || r.rmse < best->rmse)) best = &r;
    if (best && best->rmse > 0.0) {
        const std::string best_label = best->config_label;
        const double best_rmse = best->rmse;
        t.notes["reference_baseline"] = best_label;
        json sig = json::object();
        for (auto& r : t.rows) {
            if (is_baseline(r.config_label)) {
                if (r.config_label == best_label) r.note = "best baseline";
                continue;
            }
            if (!r.ok()) continue;
            r.improvement = improvement_pct(r.rmse, best_rmse);
            if (reports[r.config_label].per_geo.size() >= 2)
                sig[r.config_label] = significance_to_json(
                    paired_t_test(per_geo_rmse(reports[best_label]), per_geo_rmse(reports[r.config_label])));
        }
        t.notes["paired_t_vs_reference"] = sig;
    }
    t.notes["test_targets"] = targets.size();
    return t;
}

ResultTable run_history_ablation(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    const auto& ab = cfg.ablations;
    ResultTable t = empty_table("history", ctx);
    const Prepared main = prepare(ctx.panel, cfg.features, cfg.split);
    const EvalTargets main_targets = evaluable_targets(main, cfg.lookback);
    const std::size_t val_len = main.split.val.size();
    const std::size_t test_len = main.split.test.size();
    const std::size_t val_start = main.features.first_position + main.split.val.begin;
    TestGate gate;
    const std::string model = nn::to_string(ab.model);

    for (const auto& span : ab.history_spans) {
        const std::string label = span ? std::to_string(*span) + "y" : "full";
        say(ctx, "history: " + label);
        std::optional<Prepared> sub;
        if (!span) {
            sub = main;
        } else {
            const std::size_t weeks = static_cast<std::size_t>(*span) * 52;
            if (weeks > val_start) {
                t.rows.push_back(skipped_row(label, model,
                                             "span of " + std::to_string(weeks) + " weeks exceeds the " +
                                                 std::to_string(val_start) + " weeks before validation"));
                continue;
            }
            try {
                sub = prepare_with_split(slice_panel(ctx.panel, val_start - weeks, ctx.panel.n_weeks()), cfg.features,
                                         [&](std::size_t n) { return split_with_fixed_tail(n, val_len, test_len); });
            } catch (const std::exception& e) {
                t.rows.push_back(skipped_row(label, model, e.what()));
                continue;
            }
            if (sub->split.train.size() < cfg.lookback + 1) {
                t.rows.push_back(skipped_row(label, model, "too few training weeks for the lookback"));
                continue;
            }
        }
        try {
            const EvalTargets targets = evaluable_targets(*sub, cfg.lookback);
            if (targets.ordinal != main_targets.ordinal || targets.geo_id != main_targets.geo_id)
                throw std::logic_error("history span does not share the common test window");
            auto r = run_deep(*sub, targets, deep_options(ctx, ab.model, cfg.lookback), gate, label);
            auto row = row_from(r);
            if (!span) row.note = "Baseline";
            t.rows.push_back(row);
        } catch (const std::exception& e) {
            t.rows.push_back(failed_row(label, model, e.what()));
        }
    }
    fill_pct_change(t, "full");
    return t;
}

ResultTable run_seqlen_ablation(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    const auto& ab = cfg.ablations;
    ResultTable t = empty_table("seqlen", ctx);
    const Prepared d = prepare(ctx.panel, cfg.features, cfg.split);
    const std::size_t U = *std::max_element(ab.sequence_lengths.begin(), ab.sequence_lengths.end());
    const EvalTargets targets = evaluable_targets(d, U);
    TestGate gate;
    const std::string model = nn::to_string(ab.model);
    std::string reference;

    for (const auto L : ab.sequence_lengths) {
        const std::string label = "L=" + std::to_string(L);
        say(ctx, "seqlen: " + label);
        try {
            auto r = run_deep(d, targets, deep_options(ctx, ab.model, L, U), gate, label);
            auto row = row_from(r);
            if (L == ab.reference_lookback) {
                row.note = "Baseline";
                reference = label;
            }
            t.rows.push_back(row);
        } catch (const std::exception& e) {
            t.rows.push_back(failed_row(label, model, e.what()));
        }
    }
    if (!reference.empty()) fill_pct_change(t, reference);
    t.notes["universe_lookback"] = U;
    return t;
}

ResultTable run_feature_ablation(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    const auto& ab = cfg.ablations;
    ResultTable t = empty_table("features", ctx);
    const std::string model = nn::to_string(ab.model);
    TestGate gate;

    auto train_with = [&](const FeatureConfig& fc, const std::string& label, std::uint64_t seed_offset) {
        const Prepared d = prepare(ctx.panel, fc, cfg.split);
        const EvalTargets targets = evaluable_targets(d, cfg.lookback);
        return run_deep(d, targets, deep_options(ctx, ab.model, cfg.lookback, 0, seed_offset), gate, label);
    };

    say(ctx, "features: baseline");
    std::optional<double> base_rmse;
    try {
        auto r = train_with(cfg.features, "baseline", 0);
        auto row = row_from(r);
        row.note = "Baseline";
        row.delta_rmse = 0.0;
        base_rmse = row.rmse;
        t.rows.push_back(row);
    } catch (const std::exception& e) {
        t.rows.push_back(failed_row("baseline", model, e.what()));
    }

    for (const auto g : ab.feature_groups) {
        FeatureConfig fc = cfg.features;
        std::string label;
        if (g == FeatureGroup::dummy) {
            fc.groups.insert(FeatureGroup::dummy);
            label = "+dummy";
        } else {
            label = std::string("-") + to_string(g);
            if (!fc.has(g)) {
                t.rows.push_back(skipped_row(label, model, "group not in the configured feature set"));
                continue;
            }
            fc = fc.without(g);
        }
        say(ctx, "features: " + label);
        try {
            auto r = train_with(fc, label, 0);
            auto row = row_from(r);
            if (base_rmse) row.delta_rmse = row.rmse - *base_rmse;
            t.rows.push_back(row);
        } catch (const std::exception& e) {
            t.rows.push_back(failed_row(label, model, e.what()));
        }
    }

    if (base_rmse && ab.noise_floor_seeds > 0) {
        json rmses = json::array();
        double floor = 0.0;
        bool complete = true;
        for (std::size_t i = 1; i <= ab.noise_floor_seeds; ++i) {
            say(ctx, "features: noise floor seed " + std::to_string(cfg.seed + i));
            try {
                auto r = train_with(cfg.features, "noise_seed_" + std::to_string(cfg.seed + i), i);
                rmses.push_back(r.metrics.macro.rmse);
                floor = std::max(floor, std::abs(r.metrics.macro.rmse - *base_rmse));
            } catch (const std::exception& e) {
                complete = false;
                rmses.push_back(nullptr);
            }
        }
        t.notes["noise_floor"] = floor;
        t.notes["noise_floor_seeds"] = ab.noise_floor_seeds;
        t.notes["noise_floor_rmse"] = rmses;
        t.notes["noise_floor_complete"] = complete;
        for (auto& r : t.rows)
            if (r.ok() && r.delta_rmse && r.config_label != "baseline")
                r.note = std::abs(*r.delta_rmse) < floor ? "within noise floor" : "exceeds noise floor";
    }
    fill_pct_change(t, "baseline");
    return t;
}

ResultTable run_architecture_ablation(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    const auto& ab = cfg.ablations;
    ResultTable t = empty_table("architecture", ctx);
    const Prepared d = prepare(ctx.panel, cfg.features, cfg.split);
    const EvalTargets targets = evaluable_targets(d, cfg.lookback);
    TestGate gate;
    std::map<std::string, MetricReport> reports;

    for (const auto v : ab.architectures) {
        const std::string label = nn::to_string(v);
        say(ctx, "architecture: " + label);
        try {
            auto r = run_deep(d, targets, deep_options(ctx, v, cfg.lookback), gate, label);
            reports[label] = r.metrics;
            t.rows.push_back(row_from(r));
        } catch (const std::exception& e) {
            t.rows.push_back(failed_row(label, label, e.what()));
        }
    }
    const std::string ref = t.find("bilstm") ? "bilstm" : (t.rows.empty() ? "" : t.rows.front().config_label);
    if (!ref.empty()) {
        if (auto* r = const_cast<ResultRow*>(t.find(ref))) r->note = "Baseline";
        fill_pct_change(t, ref);
        json sig = json::object();
        if (reports.contains(ref))
            for (const auto& [label, rep] : reports)
                if (label != ref && rep.per_geo.size() >= 2)
                    sig[label] = significance_to_json(paired_t_test(per_geo_rmse(rep), per_geo_rmse(reports[ref])));
        t.notes["reference"] = ref;
        t.notes["paired_t_vs_reference"] = sig;
    }
    return t;
}

ResultTable run_family(const std::string& family, const RunContext& ctx) {
    if (family == "main") return run_main_comparison(ctx);
    if (family == "history") return run_history_ablation(ctx);
    if (family == "seqlen") return run_seqlen_ablation(ctx);
    if (family == "features") return run_feature_ablation(ctx);
    if (family == "architecture") return run_architecture_ablation(ctx);
    throw std::invalid_argument("unknown ablation family '" + family + "'");
}

}  // namespace burstcast::experiments
