#include "burstcast/nn/checkpoint.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "burstcast/core/error.hpp"

namespace burstcast::nn {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "burstcast-checkpoint";
constexpr int kVersion = 1;

json spec_json(const ModelSpec& s) {
    return json{{"variant", to_string(s.variant)},
                {"lookback", s.lookback},
                {"input_width", s.input_width},
                {"lstm_widths", s.lstm_widths},
                {"attention_width", s.attention_width},
                {"dense_width", s.dense_width},
                {"dropout", s.dropout}};
}

ModelSpec spec_from(const json& j) {
    ModelSpec s;
    const auto v = parse_variant(j.at("variant").get<std::string>());
    if (!v) throw DataError("checkpoint: unknown variant");
    s.variant = *v;
    s.lookback = j.at("lookback").get<std::size_t>();
    s.input_width = j.at("input_width").get<std::size_t>();
    s.lstm_widths = j.at("lstm_widths").get<std::vector<std::size_t>>();
    s.attention_width = j.at("attention_width").get<std::size_t>();
    s.dense_width = j.at("dense_width").get<std::size_t>();
    s.dropout = j.at("dropout").get<double>();
    s.validate();
    return s;
}

json config_json(const TrainConfig& c) {
    json j{{"learning_rate", c.learning_rate},
           {"batch_size", c.batch_size},
           {"max_epochs", c.max_epochs},
           {"plateau_factor", c.plateau_factor},
           {"plateau_patience", c.plateau_patience},
           {"plateau_min_delta", c.plateau_min_delta},
           {"min_learning_rate", c.min_learning_rate},
           {"dropout", c.dropout},
           {"seed", c.seed}};
    j["early_stop_patience"] = c.early_stop_patience ? json(*c.early_stop_patience) : json(nullptr);
    return j;
}

TrainConfig config_from(const json& j) {
    TrainConfig c;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.plateau_factor = j.at("plateau_factor").get<double>();
    c.plateau_patience = j.at("plateau_patience").get<std::size_t>();
    c.plateau_min_delta = j.at("plateau_min_delta").get<double>();
    c.min_learning_rate = j.at("min_learning_rate").get<double>();
    c.dropout = j.at("dropout").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("early_stop_patience").is_null()) c.early_stop_patience = j["early_stop_patience"].get<std::size_t>();
    return c;
}

}  // namespace

std::string checkpoint_to_json(const TrainedModel& m) {
    json layout = json::array();
    for (const auto& b : m.params.layout.blocks())
        layout.push_back({{"name", b.name}, {"offset", b.offset}, {"rows", b.rows}, {"cols", b.cols}});
    json history = json::array();
    for (const auto& r : m.history)
        history.push_back({{"epoch", r.epoch},
                           {"train_loss", r.train_loss},
                           {"val_loss", r.val_loss},
                           {"val_rmse", r.val_rmse},
                           {"learning_rate", r.learning_rate}});
    json j{{"format", kFormat},
           {"version", kVersion},
           {"spec", spec_json(m.params.spec)},
           {"layout", layout},
           {"parameters", m.params.values},
           {"best_epoch", m.best_epoch},
           {"target_mean", m.target_mean},
           {"target_std", m.target_std},
           {"train_config", config_json(m.config)},
           {"optimizer", {{"step", m.optimizer.step}, {"m", m.optimizer.m}, {"v", m.optimizer.v}}},
           {"history", history}};
    return j.dump(1);
}

TrainedModel checkpoint_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
    if (j.value("format", "") != kFormat) throw DataError("checkpoint: not a burstcast checkpoint");
    if (j.value("version", 0) != kVersion) throw DataError("checkpoint: unsupported version");
    try {
        TrainedModel m;
        m.params.spec = spec_from(j.at("spec"));
        m.params.layout = make_layout(m.params.spec);
        const auto& lj = j.at("layout");
        if (lj.size() != m.params.layout.blocks().size()) throw DataError("checkpoint: layout table mismatch");
        for (std::size_t i = 0; i < lj.size(); ++i) {
            const auto& b = m.params.layout.blocks()[i];
            if (lj[i].at("name").get<std::string>() != b.name || lj[i].at("offset").get<std::size_t>() != b.offset ||
                lj[i].at("rows").get<std::size_t>() != b.rows || lj[i].at("cols").get<std::size_t>() != b.cols)
                throw DataError("checkpoint: layout entry '" + b.name + "' disagrees with the spec");
        }
        m.params.values = j.at("parameters").get<std::vector<double>>();
        if (m.params.values.size() != m.params.layout.total())
            throw DataError("checkpoint: parameter vector length disagrees with the layout");
        m.best_epoch = j.at("best_epoch").get<std::size_t>();
        m.target_mean = j.at("target_mean").get<double>();
        m.target_std = j.at("target_std").get<double>();
        m.config = config_from(j.at("train_config"));
        const auto& o = j.at("optimizer");
        m.optimizer.step = o.at("step").get<std::uint64_t>();
        m.optimizer.m = o.at("m").get<std::vector<double>>();
        m.optimizer.v = o.at("v").get<std::vector<double>>();
        for (const auto& r : j.at("history"))
            m.history.push_back(EpochRecord{r.at("epoch").get<std::size_t>(), r.at("train_loss").get<double>(),
                                            r.at("val_loss").get<double>(), r.at("val_rmse").get<double>(),
                                            r.at("learning_rate").get<double>()});
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out << checkpoint_to_json(model) << '\n';
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read checkpoint " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_json(ss.str());
}

}  // namespace burstcast::nn
