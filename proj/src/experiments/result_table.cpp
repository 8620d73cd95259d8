#include "burstcast/experiments/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "burstcast/core/csv.hpp"
#include "burstcast/core/error.hpp"

namespace burstcast::experiments {

using nlohmann::json;

namespace {

std::string cell(double v) { return std::isfinite(v) ? csv::format_double(v) : "NA"; }
template <class T>
std::string cell(const std::optional<T>& v) {
    if (!v) return "-";
    if constexpr (std::is_floating_point_v<T>)
        return cell(*v);
    else
        return std::to_string(*v);
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
template <class T>
json jopt(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_floating_point_v<T>)
        return jnum(*v);
    else
        return *v;
}

double num_from(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }
template <class T>
std::optional<T> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

std::string fixed(double v, int digits) {
    if (!std::isfinite(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

template <class T>
std::string md(const std::optional<T>& v, int digits = 2, const char* suffix = "") {
    if (!v) return "-";
    if constexpr (std::is_floating_point_v<T>) {
        std::string s = fixed(*v, digits);
        if (*v > 0 && std::string(suffix) == "%") s = "+" + s;
        return s + suffix;
    } else {
        return std::to_string(*v);
    }
}

}  // namespace

const ResultRow* ResultTable::find(const std::string& label) const {
    for (const auto& r : rows)
        if (r.config_label == label) return &r;
    return nullptr;
}

bool ResultTable::any_failed() const {
    for (const auto& r : rows)
        if (r.failed()) return true;
    return false;
}

void ResultTable::write_csv(std::ostream& out) const {
    out << "config_label,model,samples,rmse,mae,mse,r2,pooled_rmse,epochs_ran,pct_change_vs_baseline,improvement,"
           "delta_rmse,n_features,parameters,status,note\n";
    for (const auto& r : rows) {
        out << csv::escape(r.config_label) << ',' << csv::escape(r.model) << ',' << cell(r.samples) << ','
            << cell(r.rmse) << ',' << cell(r.mae) << ',' << cell(r.mse) << ',' << cell(r.r2) << ','
            << cell(r.pooled_rmse) << ',' << cell(r.epochs_ran) << ',' << cell(r.pct_change_vs_baseline) << ','
            << cell(r.improvement) << ',' << cell(r.delta_rmse) << ',' << cell(r.n_features) << ','
            << cell(r.parameters) << ',' << csv::escape(r.status) << ',' << csv::escape(r.note) << '\n';
    }
}

json ResultTable::to_json() const {
    json rs = json::array();
    for (const auto& r : rows)
        rs.push_back({{"config_label", r.config_label},
                      {"model", r.model},
                      {"samples", jopt(r.samples)},
                      {"rmse", jnum(r.rmse)},
                      {"mae", jnum(r.mae)},
                      {"mse", jnum(r.mse)},
                      {"r2", jnum(r.r2)},
                      {"pooled_rmse", jnum(r.pooled_rmse)},
                      {"epochs_ran", jopt(r.epochs_ran)},
                      {"pct_change_vs_baseline", jopt(r.pct_change_vs_baseline)},
                      {"improvement", jopt(r.improvement)},
                      {"delta_rmse", jopt(r.delta_rmse)},
                      {"n_features", jopt(r.n_features)},
                      {"parameters", jopt(r.parameters)},
                      {"status", r.status},
                      {"note", r.note}});
    return {{"format", "burstcast-results"},
            {"version", 1},
            {"family", family},
            {"seed", seed},
            {"config_hash", config_hash},
            {"rows", rs},
            {"notes", notes}};
}

ResultTable ResultTable::from_json(const json& doc) {
    if (doc.value("format", "") != "burstcast-results") throw DataError("not a burstcast result table");
    try {
        ResultTable t;
        t.family = doc.at("family").get<std::string>();
        t.seed = doc.at("seed").get<std::uint64_t>();
        t.config_hash = doc.at("config_hash").get<std::string>();
        t.notes = doc.value("notes", json::object());
        for (const auto& j : doc.at("rows")) {
            ResultRow r;
            r.config_label = j.at("config_label").get<std::string>();
            r.model = j.at("model").get<std::string>();
            r.samples = opt_from<std::size_t>(j.at("samples"));
            r.rmse = num_from(j.at("rmse"));
            r.mae = num_from(j.at("mae"));
            r.mse = num_from(j.at("mse"));
            r.r2 = num_from(j.at("r2"));
            r.pooled_rmse = num_from(j.at("pooled_rmse"));
            r.epochs_ran = opt_from<std::size_t>(j.at("epochs_ran"));
            r.pct_change_vs_baseline = opt_from<double>(j.at("pct_change_vs_baseline"));
            r.improvement = opt_from<double>(j.at("improvement"));
            r.delta_rmse = opt_from<double>(j.at("delta_rmse"));
            r.n_features = opt_from<std::size_t>(j.at("n_features"));
            r.parameters = opt_from<std::size_t>(j.at("parameters"));
            r.status = j.at("status").get<std::string>();
            r.note = j.value("note", "");
            t.rows.push_back(std::move(r));
        }
        return t;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed result table: ") + e.what());
    }
}

std::string ResultTable::to_markdown() const {
    std::ostringstream o;
    o << "## " << family << "\n\n";
    o << "seed " << seed << ", config " << config_hash << "\n\n";
    o << "| Configuration | Model | Samples | RMSE | MAE | MSE | R² | Pooled RMSE | Epochs | % change | Improvement | "
         "ΔRMSE | Features | Parameters | Status | Note |\n";
    o << "|---|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|---|---|\n";
    for (const auto& r : rows) {
        const bool have = r.ok();
        o << "| " << r.config_label << " | " << r.model << " | " << md(r.samples) << " | "
          << (have ? fixed(r.rmse, 3) : "-") << " | " << (have ? fixed(r.mae, 3) : "-") << " | "
          << (have ? fixed(r.mse, 3) : "-") << " | " << (have ? fixed(r.r2, 3) : "-") << " | "
          << (have ? fixed(r.pooled_rmse, 3) : "-") << " | " << md(r.epochs_ran) << " | "
          << md(r.pct_change_vs_baseline, 1, "%") << " | " << md(r.improvement, 1, "%") << " | "
          << md(r.delta_rmse, 3) << " | " << md(r.n_features) << " | " << md(r.parameters) << " | " << r.status
          << " | " << r.note << " |\n";
    }
    if (!notes.empty()) o << "\n```json\n" << notes.dump(2) << "\n```\n";
    return o.str();
}

}  // namespace burstcast::experiments
