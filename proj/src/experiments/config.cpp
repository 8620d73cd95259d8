#include "burstcast/experiments/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "burstcast/core/error.hpp"

namespace burstcast::experiments {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& i : issues) msg += "\n  - " + i;
          return msg;
      }()),
      issues_(std::move(issues)) {}

namespace {

// Collects every problem instead of stopping at the first one.
class Checker {
public:
    std::vector<std::string> issues;

    void fail(const std::string& key, const std::string& why) { issues.push_back(key + ": " + why); }

    const json* object(const json& parent, const std::string& key, const std::string& path) {
        if (!parent.contains(key)) return nullptr;
        const json& v = parent.at(key);
        if (!v.is_object()) {
            fail(path, "expected an object");
            return nullptr;
        }
        return &v;
    }

    void known_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
        for (const auto& [k, v] : obj.items())
            if (!allowed.contains(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
    }

    template <class T>
    void number(const json& obj, const std::string& key, const std::string& path, T& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) return fail(path + "." + key, "expected a number");
            out = v.get<T>();
        } else {
            if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0 && !v.is_number_unsigned()))
                return fail(path + "." + key, "expected a nonnegative integer");
            out = v.get<T>();
        }
    }

    void string(const json& obj, const std::string& key, const std::string& path, std::string& out) {
        if (!obj.contains(key)) return;
        if (!obj.at(key).is_string()) return fail(path + "." + key, "expected a string");
        out = obj.at(key).get<std::string>();
    }

    std::vector<double> numbers(const json& v, const std::string& path) {
        std::vector<double> out;
        if (v.is_number()) return {v.get<double>()};
        if (!v.is_array()) {
            fail(path, "expected a number or an array of numbers");
            return out;
        }
        for (const auto& e : v) {
            if (!e.is_number()) {
                fail(path, "expected only numbers");
                return {};
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::string> strings(const json& v, const std::string& path) {
        std::vector<std::string> out;
        if (!v.is_array()) {
            fail(path, "expected an array of strings");
            return out;
        }
        for (const auto& e : v) {
            if (!e.is_string()) {
                fail(path, "expected only strings");
                return {};
            }
            out.push_back(e.get<std::string>());
        }
        return out;
    }
};

void parse_synth(Checker& c, const json& s, SynthConfig& out, const std::string& path) {
    c.known_keys(s,
                 {"n_geographies", "n_weeks", "base_rate", "amplitude", "phase", "eta", "rho", "killed_mean",
                  "wounded_mean", "emission", "nb_shape", "start", "seed"},
                 path);
    c.number(s, "n_geographies", path, out.n_geographies);
    c.number(s, "n_weeks", path, out.n_weeks);
    if (s.contains("base_rate")) out.base_rate = c.numbers(s["base_rate"], path + ".base_rate");
    if (s.contains("amplitude")) out.amplitude = c.numbers(s["amplitude"], path + ".amplitude");
    if (s.contains("phase")) out.phase = c.numbers(s["phase"], path + ".phase");
    c.number(s, "eta", path, out.eta);
    c.number(s, "rho", path, out.rho);
    c.number(s, "killed_mean", path, out.killed_mean);
    c.number(s, "wounded_mean", path, out.wounded_mean);
    c.number(s, "nb_shape", path, out.nb_shape);
    c.number(s, "seed", path, out.seed);
    std::string emission = "poisson";
    c.string(s, "emission", path, emission);
    if (emission == "poisson")
        out.emission = Emission::poisson;
    else if (emission == "negative_binomial")
        out.emission = Emission::negative_binomial;
    else
        c.fail(path + ".emission", "expected \"poisson\" or \"negative_binomial\"");
    std::string start;
    c.string(s, "start", path, start);
    if (!start.empty()) {
        if (auto d = parse_iso_date(start))
            out.start = *d;
        else
            c.fail(path + ".start", "expected an ISO date YYYY-MM-DD");
    }
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        c.fail(path, e.what());
    }
}

void parse_columns(Checker& c, const json& j, ColumnMap& m, const std::string& path) {
    c.known_keys(j,
                 {"event_id", "year", "month", "day", "region", "country", "latitude", "longitude", "killed",
                  "wounded", "doubt"},
                 path);
    c.string(j, "event_id", path, m.event_id);
    c.string(j, "year", path, m.year);
    c.string(j, "month", path, m.month);
    c.string(j, "day", path, m.day);
    c.string(j, "region", path, m.region);
    c.string(j, "country", path, m.country);
    c.string(j, "latitude", path, m.latitude);
    c.string(j, "longitude", path, m.longitude);
    c.string(j, "killed", path, m.killed);
    c.string(j, "wounded", path, m.wounded);
    c.string(j, "doubt", path, m.doubt);
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    Checker c;
    ExperimentConfig cfg;
    if (!doc.is_object()) throw ConfigError({"<root>: expected a JSON object"});
    c.known_keys(doc, {"data", "features", "split", "train", "models", "ablations", "seed"}, "");
    c.number(doc, "seed", "", cfg.seed);
    bool synth_seed_given = false;

    if (const json* d = c.object(doc, "data", "data")) {
        c.known_keys(*d, {"source", "path", "grain", "columns", "delimiter", "synth"}, "data");
        std::string source = "synth";
        c.string(*d, "source", "data", source);
        if (source == "panel")
            cfg.data.kind = SourceKind::panel;
        else if (source == "csv")
            cfg.data.kind = SourceKind::csv;
        else if (source == "synth")
            cfg.data.kind = SourceKind::synth;
        else
            c.fail("data.source", "expected \"panel\", \"csv\" or \"synth\"");
        std::string path;
        c.string(*d, "path", "data", path);
        if (cfg.data.kind != SourceKind::synth) {
            if (path.empty())
                c.fail("data.path", "required for source \"" + source + "\"");
            else
                cfg.data.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path)
                                                                          : base_dir / path;
        }
        std::string grain = "region";
        c.string(*d, "grain", "data", grain);
        if (auto g = parse_grain(grain))
            cfg.data.grain = *g;
        else
            c.fail("data.grain", "expected \"region\" or \"country\"");
        if (const json* cols = c.object(*d, "columns", "data.columns")) parse_columns(c, *cols, cfg.data.columns, "data.columns");
        std::string delim = ",";
        c.string(*d, "delimiter", "data", delim);
        if (delim.size() != 1)
            c.fail("data.delimiter", "expected a single character");
        else
            cfg.data.columns.delimiter = delim[0];
        if (const json* s = c.object(*d, "synth", "data.synth")) {
            synth_seed_given = s->contains("seed");
            parse_synth(c, *s, cfg.data.synth, "data.synth");
        }
    }
    if (!synth_seed_given) cfg.data.synth.seed = cfg.seed;

    if (const json* f = c.object(doc, "features", "features")) {
        c.known_keys(*f, {"profile", "groups"}, "features");
        std::string profile = "compact";
        c.string(*f, "profile", "features", profile);
        if (auto p = FeatureConfig::profile(profile))
            cfg.features = *p;
        else
            c.fail("features.profile", "expected \"compact\", \"compact_onehot\" or \"extended\"");
        if (f->contains("groups")) {
            cfg.features.groups.clear();
            for (const auto& name : c.strings(f->at("groups"), "features.groups")) {
                if (auto g = parse_feature_group(name))
                    cfg.features.groups.insert(*g);
                else
                    c.fail("features.groups", "unknown feature group \"" + name + "\"");
            }
        }
    }

    if (const json* s = c.object(doc, "split", "split")) {
        c.known_keys(*s, {"train", "val", "test"}, "split");
        c.number(*s, "train", "split", cfg.split.train);
        c.number(*s, "val", "split", cfg.split.val);
        c.number(*s, "test", "split", cfg.split.test);
        const double sum = cfg.split.train + cfg.split.val + cfg.split.test;
        if (std::abs(sum - 1.0) > 1e-9) c.fail("split", "fractions must sum to 1");
        if (!(cfg.split.train > 0 && cfg.split.val > 0 && cfg.split.test > 0))
            c.fail("split", "fractions must be positive");
    }

    if (const json* t = c.object(doc, "train", "train")) {
        c.known_keys(*t,
                     {"learning_rate", "batch_size", "max_epochs", "early_stop_patience", "plateau_factor",
                      "plateau_patience", "plateau_min_delta", "min_learning_rate", "dropout", "lookback"},
                     "train");
        auto& tc = cfg.train;
        c.number(*t, "learning_rate", "train", tc.learning_rate);
        c.number(*t, "batch_size", "train", tc.batch_size);
        c.number(*t, "max_epochs", "train", tc.max_epochs);
        if (t->contains("early_stop_patience") && !t->at("early_stop_patience").is_null()) {
            std::size_t p = 0;
            c.number(*t, "early_stop_patience", "train", p);
            tc.early_stop_patience = p;
        }
        c.number(*t, "plateau_factor", "train", tc.plateau_factor);
        c.number(*t, "plateau_patience", "train", tc.plateau_patience);
        c.number(*t, "plateau_min_delta", "train", tc.plateau_min_delta);
        c.number(*t, "min_learning_rate", "train", tc.min_learning_rate);
        c.number(*t, "dropout", "train", tc.dropout);
        c.number(*t, "lookback", "train", cfg.lookback);
        try {
            tc.validate();
        } catch (const std::invalid_argument& e) {
            c.issues.push_back(e.what());
        }
        if (cfg.lookback == 0) c.fail("train.lookback", "must be positive");
    }

    if (doc.contains("models")) {
        const json& m = doc.at("models");
        const json* list = &m;
        if (m.is_object()) {
            c.known_keys(m, {"run", "moving_average_window", "ridge_lambda"}, "models");
            c.number(m, "moving_average_window", "models", cfg.moving_average_window);
            c.number(m, "ridge_lambda", "models", cfg.ridge_lambda);
            if (cfg.moving_average_window == 0) c.fail("models.moving_average_window", "must be positive");
            if (!(cfg.ridge_lambda >= 0.0)) c.fail("models.ridge_lambda", "must be >= 0");
            list = m.contains("run") ? &m.at("run") : nullptr;
        }
        if (list) {
            cfg.models = c.strings(*list, "models.run");
            for (const auto& name : cfg.models) {
                const bool baseline =
                    std::find(kBaselineModels.begin(), kBaselineModels.end(), name) != kBaselineModels.end();
                if (!baseline && !nn::parse_variant(name)) c.fail("models.run", "unknown model \"" + name + "\"");
            }
        }
    }

    if (const json* a = c.object(doc, "ablations", "ablations")) {
        auto& ab = cfg.ablations;
        c.known_keys(*a,
                     {"families", "model", "history_spans", "sequence_lengths", "reference_lookback",
                      "feature_groups", "architectures", "noise_floor_seeds"},
                     "ablations");
        if (a->contains("families")) {
            ab.families = c.strings(a->at("families"), "ablations.families");
            for (const auto& f : ab.families)
                if (std::find(kFamilies.begin(), kFamilies.end(), f) == kFamilies.end())
                    c.fail("ablations.families", "unknown family \"" + f + "\"");
        }
        std::string model = nn::to_string(ab.model);
        c.string(*a, "model", "ablations", model);
        if (auto v = nn::parse_variant(model))
            ab.model = *v;
        else
            c.fail("ablations.model", "unknown model \"" + model + "\"");
        if (a->contains("history_spans")) {
            ab.history_spans.clear();
            const json& hs = a->at("history_spans");
            if (!hs.is_array()) c.fail("ablations.history_spans", "expected an array");
            for (const auto& e : hs.is_array() ? hs : json::array()) {
                if (e.is_string() && e.get<std::string>() == "full")
                    ab.history_spans.emplace_back(std::nullopt);
                else if (e.is_number_integer() && e.get<long long>() > 0)
                    ab.history_spans.emplace_back(e.get<int>());
                else
                    c.fail("ablations.history_spans", "entries must be positive years or \"full\"");
            }
        }
        if (a->contains("sequence_lengths")) {
            const json& sl = a->at("sequence_lengths");
            ab.sequence_lengths.clear();
            if (!sl.is_array()) c.fail("ablations.sequence_lengths", "expected an array");
            for (const auto& e : sl.is_array() ? sl : json::array()) {
                if (e.is_number_integer() && e.get<long long>() > 0)
                    ab.sequence_lengths.push_back(e.get<std::size_t>());
                else
                    c.fail("ablations.sequence_lengths", "entries must be positive integers");
            }
            if (ab.sequence_lengths.empty()) c.fail("ablations.sequence_lengths", "must not be empty");
        }
        c.number(*a, "reference_lookback", "ablations", ab.reference_lookback);
        if (a->contains("feature_groups")) {
            ab.feature_groups.clear();
            for (const auto& name : c.strings(a->at("feature_groups"), "ablations.feature_groups")) {
                if (auto g = parse_feature_group(name))
                    ab.feature_groups.push_back(*g);
                else
                    c.fail("ablations.feature_groups", "unknown feature group \"" + name + "\"");
            }
        }
        if (a->contains("architectures")) {
            ab.architectures.clear();
            for (const auto& name : c.strings(a->at("architectures"), "ablations.architectures")) {
                if (auto v = nn::parse_variant(name))
                    ab.architectures.push_back(*v);
                else
                    c.fail("ablations.architectures", "unknown architecture \"" + name + "\"");
            }
        }
        c.number(*a, "noise_floor_seeds", "ablations", ab.noise_floor_seeds);
    }

    if (!c.issues.empty()) throw ConfigError(std::move(c.issues));
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("<root>: not valid JSON (") + e.what() + ")"});
    }
    return parse_config(doc, path.parent_path());
}

json to_json(const ExperimentConfig& c) {
    json data;
    switch (c.data.kind) {
        case SourceKind::panel: data["source"] = "panel"; break;
        case SourceKind::csv: data["source"] = "csv"; break;
        case SourceKind::synth: data["source"] = "synth"; break;
    }
    if (c.data.kind != SourceKind::synth) data["path"] = c.data.path.generic_string();
    data["grain"] = to_string(c.data.grain);
    if (c.data.kind == SourceKind::csv) {
        const auto& m = c.data.columns;
        data["columns"] = {{"event_id", m.event_id}, {"year", m.year},           {"month", m.month},
                           {"day", m.day},           {"region", m.region},       {"country", m.country},
                           {"latitude", m.latitude}, {"longitude", m.longitude}, {"killed", m.killed},
                           {"wounded", m.wounded},   {"doubt", m.doubt}};
        data["delimiter"] = std::string(1, m.delimiter);
    }
    if (c.data.kind == SourceKind::synth) {
        const auto& s = c.data.synth;
        data["synth"] = {{"n_geographies", s.n_geographies},
                         {"n_weeks", s.n_weeks},
                         {"base_rate", s.base_rate},
                         {"amplitude", s.amplitude},
                         {"phase", s.phase},
                         {"eta", s.eta},
                         {"rho", s.rho},
                         {"killed_mean", s.killed_mean},
                         {"wounded_mean", s.wounded_mean},
                         {"emission", s.emission == Emission::poisson ? "poisson" : "negative_binomial"},
                         {"nb_shape", s.nb_shape},
                         {"start", to_iso_string(s.start)},
                         {"seed", s.seed}};
    }

    json groups = json::array();
    for (auto g : c.features.groups) groups.push_back(to_string(g));
    const auto& t = c.train;
    json train{{"learning_rate", t.learning_rate},
               {"batch_size", t.batch_size},
               {"max_epochs", t.max_epochs},
               {"plateau_factor", t.plateau_factor},
               {"plateau_patience", t.plateau_patience},
               {"plateau_min_delta", t.plateau_min_delta},
               {"min_learning_rate", t.min_learning_rate},
               {"dropout", t.dropout},
               {"lookback", c.lookback}};
    train["early_stop_patience"] = t.early_stop_patience ? json(*t.early_stop_patience) : json(nullptr);

    const auto& a = c.ablations;
    json spans = json::array();
    for (const auto& s : a.history_spans) spans.push_back(s ? json(*s) : json("full"));
    json fgroups = json::array();
    for (auto g : a.feature_groups) fgroups.push_back(to_string(g));
    json archs = json::array();
    for (auto v : a.architectures) archs.push_back(nn::to_string(v));

    return json{{"data", data},
                {"features", {{"profile", c.features.profile_name}, {"groups", groups}}},
                {"split", {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}}},
                {"train", train},
                {"models",
                 {{"run", c.models},
                  {"moving_average_window", c.moving_average_window},
                  {"ridge_lambda", c.ridge_lambda}}},
                {"ablations",
                 {{"families", a.families},
                  {"model", nn::to_string(a.model)},
                  {"history_spans", spans},
                  {"sequence_lengths", a.sequence_lengths},
                  {"reference_lookback", a.reference_lookback},
                  {"feature_groups", fgroups},
                  {"architectures", archs},
                  {"noise_floor_seeds", a.noise_floor_seeds}}},
                {"seed", c.seed}};
}

std::string config_hash(const ExperimentConfig& c) {
    const std::string text = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace burstcast::experiments
