#include "burstcast/experiments/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "burstcast/baselines/naive.hpp"
#include "burstcast/core/error.hpp"
#include "burstcast/nn/params.hpp"

namespace burstcast::experiments {

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

LoadedData load_data(const DataSource& src) {
    LoadedData out;
    switch (src.kind) {
        case SourceKind::synth: out.panel = generate_panel(src.synth).panel; break;
        case SourceKind::panel: {
            if (src.path.extension() == ".json") {
                out.panel = panel_from_json(read_file(src.path));
            } else {
                std::ifstream in(src.path);
                if (!in) throw DataError("cannot open " + src.path.string());
                out.panel = read_panel_csv(in);
            }
            break;
        }
        case SourceKind::csv: {
            std::ifstream in(src.path);
            if (!in) throw DataError("cannot open " + src.path.string());
            auto parsed = parse_incidents(in, src.columns);
            AggregateReport agg;
            out.panel = aggregate_weekly(parsed.records, src.grain, {}, &agg);
            out.rejections = parsed.report;
            out.aggregation = agg;
            break;
        }
    }
    out.panel.validate();
    return out;
}

PanelSeries slice_panel(const PanelSeries& p, std::size_t begin, std::size_t end) {
    if (begin > end || end > p.n_weeks()) throw std::out_of_range("slice_panel: bad week range");
    PanelSeries s;
    s.grain = p.grain;
    s.geo_ids = p.geo_ids;
    s.week_axis.assign(p.week_axis.begin() + static_cast<std::ptrdiff_t>(begin),
                       p.week_axis.begin() + static_cast<std::ptrdiff_t>(end));
    auto cut = [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        V out;
        for (const auto& row : v)
            out.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(begin),
                             row.begin() + static_cast<std::ptrdiff_t>(end));
        return out;
    };
    s.counts = cut(p.counts);
    s.casualties_total = cut(p.casualties_total);
    s.killed = cut(p.killed);
    s.wounded = cut(p.wounded);
    return s;
}

Prepared prepare_with_split(const PanelSeries& panel, const FeatureConfig& features,
                            const std::function<SplitIndex(std::size_t)>& make_split) {
    Prepared d;
    d.panel = panel;
    d.features = build_features(panel, features);
    d.split = make_split(d.features.n_rows());
    d.scaler = fit_scaler(d.features, d.split);
    return d;
}

Prepared prepare(const PanelSeries& panel, const FeatureConfig& features, SplitFractions fractions) {
    return prepare_with_split(panel, features, [&](std::size_t n) { return chronological_split(n, fractions); });
}

EvalTargets evaluable_targets(const Prepared& d, std::size_t U) {
    const Range test = d.split.test;
    if (U == 0) U = 1;
    if (test.size() < U + 1)
        throw DataError("test partition has " + std::to_string(test.size()) + " weeks; lookback " +
                        std::to_string(U) + " needs at least " + std::to_string(U + 1));
    const auto& fm = d.features;
    EvalTargets t;
    for (std::size_t g = 0; g < fm.n_geographies(); ++g)
        for (std::size_t e = test.begin + U - 1; e + 1 < test.end; ++e) {
            t.geo.push_back(g);
            t.row.push_back(e);
            t.geo_id.push_back(fm.geo_ids[g]);
            t.ordinal.push_back(fm.week_axis[e + 1].ordinal);
            t.actual.push_back(fm.target[g][e]);
        }
    return t;
}

MetricReport TestGate::evaluate(const std::string& label, std::span<const double> pred, const EvalTargets& t) {
    if (!seen_.insert(label).second)
        throw std::logic_error("test window already evaluated for '" + label + "' in this run");
    return compute_metrics(pred, t.actual, t.geo_id);
}

namespace {

std::vector<double> series_of(const PanelSeries& p, std::size_t g) {
    return {p.counts[g].begin(), p.counts[g].end()};
}

}  // namespace

std::vector<double> predict_seasonal_naive(const Prepared& d, const EvalTargets& t) {
    std::vector<double> out(t.size());
    std::vector<std::vector<double>> series(d.panel.n_geographies());
    for (std::size_t g = 0; g < series.size(); ++g) series[g] = series_of(d.panel, g);
    for (std::size_t i = 0; i < t.size(); ++i)
        out[i] = baselines::seasonal_naive_forecast(series[t.geo[i]], d.features.first_position + t.row[i] + 1);
    return out;
}

std::vector<double> predict_moving_average(const Prepared& d, const EvalTargets& t, std::size_t k) {
    std::vector<double> out(t.size());
    std::vector<std::vector<double>> series(d.panel.n_geographies());
    for (std::size_t g = 0; g < series.size(); ++g) series[g] = series_of(d.panel, g);
    for (std::size_t i = 0; i < t.size(); ++i)
        out[i] = baselines::moving_average_forecast(series[t.geo[i]], d.features.first_position + t.row[i] + 1, k);
    return out;
}

SarimaRun run_sarima(const Prepared& d, const EvalTargets& t, Exec exec) {
    const std::size_t G = d.panel.n_geographies();
    const std::size_t train_end = d.features.first_position + d.split.train.end;
    std::vector<std::vector<double>> full(G), train(G);
    for (std::size_t g = 0; g < G; ++g) {
        full[g] = series_of(d.panel, g);
        train[g].assign(full[g].begin(), full[g].begin() + static_cast<std::ptrdiff_t>(train_end));
    }
    const auto grid = baselines::default_grid();
    SarimaRun run;
    run.fits = baselines::fit_sarima_panel(train, grid, exec);
    std::size_t start = 0;
    for (const auto& o : grid) start = std::max(start, baselines::default_burn_in(o));
    std::vector<std::vector<double>> one_step(G);
    for (std::size_t g = 0; g < G; ++g) {
        if (!run.fits.fits[g])
            throw DataError("SARIMA fit failed for geography " + std::to_string(d.panel.geo_ids[g]) + ": " +
                            run.fits.errors[g]);
        one_step[g] = baselines::sarima_one_step(run.fits.fits[g]->best, full[g], start);
    }
    run.predictions.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        run.predictions[i] = one_step[t.geo[i]][d.features.first_position + t.row[i] + 1];
    return run;
}

ModelRun run_baseline(const std::string& name, const Prepared& d, const EvalTargets& t, const ExperimentConfig& cfg,
                      TestGate& gate, const std::string& label) {
    ModelRun r;
    r.label = label;
    r.model = name;
    r.n_features = d.features.n_features();
    std::vector<double> pred;
    if (name == "seasonal_naive") {
        pred = predict_seasonal_naive(d, t);
        r.fitted = {{"model", name}, {"period", baselines::kSeasonalPeriod}};
    } else if (name == "moving_average") {
        pred = predict_moving_average(d, t, cfg.moving_average_window);
        r.fitted = {{"model", name}, {"window", cfg.moving_average_window}};
    } else if (name == "linear") {
        const auto model = baselines::fit_linear_baseline(d.features, d.scaler, d.split, cfg.ridge_lambda);
        pred.resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i)
            pred[i] = baselines::predict_linear_baseline(model, d.features, d.scaler, t.geo[i], t.row[i]);
        r.samples = (d.split.train.size() - 1) * d.features.n_geographies();
        r.parameters = model.coefficients.size() + 1;
        r.fitted = {{"model", name},
                    {"lambda", model.lambda},
                    {"intercept", model.intercept},
                    {"coefficients", model.coefficients},
                    {"feature_names", d.features.feature_names}};
    } else if (name == "sarima") {
        auto run = run_sarima(d, t);
        pred = std::move(run.predictions);
        nlohmann::json per = nlohmann::json::array();
        for (std::size_t g = 0; g < d.panel.n_geographies(); ++g) {
            auto j = baselines::to_json(*run.fits.fits[g]);
            j["geo"] = d.panel.geo_ids[g];
            per.push_back(std::move(j));
        }
        r.fitted = {{"model", name}, {"geographies", per}};
    } else {
        throw std::invalid_argument("unknown baseline '" + name + "'");
    }
    r.metrics = gate.evaluate(label, pred, t);
    return r;
}

ModelRun run_deep(const Prepared& d, const EvalTargets& t, const DeepRunOptions& o, TestGate& gate,
                  const std::string& label) {
    const std::size_t U = std::max(o.lookback, o.universe_lookback);
    const auto seqs = make_sequences(d.features, d.scaler, d.split, o.lookback, U);
    if (seqs.test.size() != t.size())
        throw std::logic_error("test sequences and evaluation targets disagree in count");
    for (std::size_t i = 0; i < t.size(); ++i)
        if (seqs.test.target_ordinals[i] != t.ordinal[i] || seqs.test.geo_ids[i] != t.geo_id[i])
            throw std::logic_error("test sequences and evaluation targets disagree in order");

    const auto spec = nn::ModelSpec::reference(o.variant, o.lookback, d.features.n_features(), o.train.dropout);
    nn::EpochCallback cb;
    if (o.log)
        cb = [&](const nn::EpochRecord& e) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "%s epoch %zu: train %.5f val %.5f val_rmse %.4f lr %.2e", label.c_str(),
                          e.epoch, e.train_loss, e.val_loss, e.val_rmse, e.learning_rate);
            o.log(buf);
        };
    auto trained = nn::train(spec, seqs.train, seqs.val, o.train, cb);

    ModelRun r;
    r.label = label;
    r.model = nn::to_string(o.variant);
    r.n_features = d.features.n_features();
    r.samples = seqs.train.size();
    r.epochs = trained.epochs_ran();
    r.parameters = nn::count_parameters(spec);
    const auto pred = trained.predict(seqs.test, o.train.exec);
    r.metrics = gate.evaluate(label, pred, t);
    r.fitted = {{"model", r.model}, {"best_epoch", trained.best_epoch}, {"epochs_ran", trained.epochs_ran()}};
    r.trained = std::move(trained);
    return r;
}

}  // namespace burstcast::experiments
