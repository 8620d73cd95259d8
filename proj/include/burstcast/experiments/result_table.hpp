#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace burstcast::experiments {

struct ResultRow {
    std::string config_label;
    std::string model;
    std::optional<std::size_t> samples;
    double rmse = 0.0, mae = 0.0, mse = 0.0, r2 = 0.0;  // macro over geographies
    double pooled_rmse = 0.0;
    std::optional<std::size_t> epochs_ran;
    std::optional<double> pct_change_vs_baseline;
    std::optional<double> improvement;
    std::optional<double> delta_rmse;
    std::optional<std::size_t> n_features;
    std::optional<std::size_t> parameters;
    /// "ok", "failed: <reason>" or "skipped: <reason>".
    std::string status = "ok";
    std::string note;

    bool ok() const { return status == "ok"; }
    bool failed() const { return status.starts_with("failed"); }
};

struct ResultTable {
    std::string family;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<ResultRow> rows;
    /// Family-specific extras (significance tests, noise floor, ...).
    nlohmann::json notes = nlohmann::json::object();

    const ResultRow* find(const std::string& label) const;
    bool any_failed() const;

    void write_csv(std::ostream& out) const;
    nlohmann::json to_json() const;
    static ResultTable from_json(const nlohmann::json& doc);
    std::string to_markdown() const;
};

}  // namespace burstcast::experiments
