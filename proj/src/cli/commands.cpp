#include "burstcast/cli/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "burstcast/core/csv.hpp"
#include "burstcast/core/error.hpp"
#include "burstcast/experiments/ablations.hpp"
#include "burstcast/nn/checkpoint.hpp"

namespace burstcast::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace experiments;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Run record written when a command starts and rewritten when it ends.
/// Files registered through add() are deleted if the run fails hard.
class Manifest {
public:
    Manifest(fs::path out, std::string command) : out_(std::move(out)) {
        doc_["command"] = std::move(command);
        doc_["tool_version"] = BURSTCAST_VERSION;
        doc_["output_directory"] = out_.generic_string();
        doc_["started"] = utc_now();
        doc_["status"] = "running";
        doc_["files"] = json::array();
    }

    json& operator[](const char* key) { return doc_[key]; }

    void begin() {
        fs::create_directories(out_);
        write();
    }

    fs::path add(const std::string& name) {
        doc_["files"].push_back(name);
        return out_ / name;
    }

    void finish(const std::string& status) {
        doc_["status"] = status;
        doc_["finished"] = utc_now();
        write();
    }

    void fail(const std::string& error) {
        for (const auto& f : doc_["files"]) {
            std::error_code ec;
            fs::remove(out_ / f.get<std::string>(), ec);
        }
        doc_["removed_files"] = doc_["files"];
        doc_["files"] = json::array();
        doc_["error"] = error;
        finish("failed");
    }

private:
    void write() {
        std::ofstream o(out_ / "manifest.json");
        o << doc_.dump(2) << '\n';
    }

    fs::path out_;
    json doc_;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw DataError("cannot write " + path.string());
    o << text;
}

struct Resolved {
    ExperimentConfig config;
    std::string seed_source;
};

Resolved resolve(const RunOptions& opt) {
    if (opt.config.empty()) throw ConfigError({"--config: required"});
    if (!fs::exists(opt.config)) throw std::ios_base::failure("config file not found: " + opt.config.string());
    Resolved r{load_config(opt.config), "config"};
    std::optional<std::uint64_t> override_seed;
    if (opt.seed) {
        override_seed = opt.seed;
        r.seed_source = "flag";
    } else if (auto e = env_seed()) {
        override_seed = e;
        r.seed_source = "BURSTCAST_SEED";
    }
    if (override_seed) {
        // A synth seed that merely inherited the top-level seed follows the override.
        const bool inherited = r.config.data.synth.seed == r.config.seed;
        r.config.seed = *override_seed;
        if (inherited) r.config.data.synth.seed = *override_seed;
    }
    return r;
}

void describe(Manifest& m, const RunOptions& opt, const Resolved& r) {
    m["config_path"] = opt.config.generic_string();
    m["config_hash"] = config_hash(r.config);
    m["seed"] = r.config.seed;
    m["seed_source"] = r.seed_source;
    m["resolved_config"] = to_json(r.config);
}

Log make_log(std::ostream& out, bool verbose) {
    return [&out, verbose](const std::string& msg) {
        if (verbose || msg.find(" epoch ") == std::string::npos) out << msg << std::endl;
    };
}

// Maps exceptions to exit codes; the manifest (when open) is marked failed.
template <class F>
int guarded(std::ostream& log, Manifest* manifest, F&& body) {
    auto fail = [&](int code, const std::string& msg) {
        log << "error: " << msg << '\n';
        if (manifest) manifest->fail(msg);
        return code;
    };
    try {
        return body();
    } catch (const ConfigError& e) {
        return fail(kBadConfig, e.what());
    } catch (const std::ios_base::failure& e) {
        return fail(kMissingInput, e.what());
    } catch (const ParseError& e) {
        return fail(kParseFailure, e.what());
    } catch (const std::exception& e) {
        return fail(kRunFailure, e.what());
    }
}

void write_rejections(const fs::path& path, const std::optional<RejectionReport>& rej,
                      const std::optional<AggregateReport>& agg) {
    json j = json::object();
    if (rej) {
        json counts = json::object();
        for (auto r : {RejectReason::invalid_date, RejectReason::missing_geography, RejectReason::missing_event_id,
                       RejectReason::failed_inclusion, RejectReason::duplicate})
            counts[to_string(r)] = rej->count(r);
        j["rows_read"] = rej->rows_read;
        j["rejected"] = rej->total();
        j["rejections"] = counts;
    }
    if (agg)
        j["aggregation"] = {{"records_in_excluded_weeks", agg->records_in_gap_weeks},
                            {"excluded_weeks", agg->gap_weeks_removed},
                            {"records_outside_axis", agg->records_outside_axis},
                            {"records_unknown_geography", agg->records_unknown_geography}};
    write_text(path, j.dump(2) + "\n");
}

void write_panel_files(Manifest& m, const PanelSeries& panel) {
    {
        std::ofstream o(m.add("panel.csv"), std::ios::binary);
        write_panel_csv(o, panel);
    }
    write_text(m.add("panel.json"), panel_to_json(panel) + "\n");
}

std::vector<nn::Variant> deep_models(const ExperimentConfig& cfg) {
    std::vector<nn::Variant> out;
    for (const auto& name : cfg.models)
        if (auto v = nn::parse_variant(name)) out.push_back(*v);
    return out;
}

}  // namespace

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("BURSTCAST_SEED");
    if (!v || !*v) return std::nullopt;
    const auto parsed = csv::parse_int(v);
    if (!parsed || *parsed < 0) return std::nullopt;
    return static_cast<std::uint64_t>(*parsed);
}

int cmd_ingest(const fs::path& input, const std::string& grain_text, const fs::path& out, std::ostream& log) {
    if (!fs::exists(input)) {
        log << "error: input file not found: " << input.string() << '\n';
        return kMissingInput;
    }
    const auto grain = parse_grain(grain_text);
    if (!grain) {
        log << "error: --grain must be region or country, got '" << grain_text << "'\n";
        return kBadConfig;
    }
    Manifest m(out, "ingest");
    m["input"] = input.generic_string();
    m["grain"] = grain_text;
    return guarded(log, &m, [&] {
        m.begin();
        std::ifstream in(input);
        if (!in) throw std::ios_base::failure("cannot open input file: " + input.string());
        auto parsed = parse_incidents(in);
        AggregateReport agg;
        const auto panel = aggregate_weekly(parsed.records, *grain, {}, &agg);
        write_panel_files(m, panel);
        write_rejections(m.add("rejections.json"), parsed.report, agg);
        log << "ingest: " << parsed.report.rows_read << " rows, " << parsed.records.size() << " retained, "
            << parsed.report.total() << " rejected; " << agg.records_in_gap_weeks << " records in "
            << agg.gap_weeks_removed << " excluded weeks; panel " << panel.n_geographies() << " x "
            << panel.n_weeks() << '\n';
        m.finish("ok");
        return int(kOk);
    });
}

int cmd_synth(const RunOptions& opt, std::ostream& log) {
    std::optional<Manifest> m;
    return guarded(log, nullptr, [&] {
        const auto r = resolve(opt);
        m.emplace(opt.out, "synth");
        describe(*m, opt, r);
        return guarded(log, &*m, [&] {
            m->begin();
            const auto out = generate_panel(r.config.data.synth);
            write_panel_files(*m, out.panel);
            write_text(m->add("incidents.csv"), out.raw_csv);
            log << "synth: " << out.records.size() << " events, panel " << out.panel.n_geographies() << " x "
                << out.panel.n_weeks() << '\n';
            m->finish("ok");
            return int(kOk);
        });
    });
}

int cmd_train(const RunOptions& opt, std::ostream& log) {
    std::optional<Manifest> m;
    return guarded(log, nullptr, [&] {
        const auto r = resolve(opt);
        m.emplace(opt.out, "train");
        describe(*m, opt, r);
        return guarded(log, &*m, [&] {
            m->begin();
            const auto& cfg = r.config;
            const auto data = load_data(cfg.data);
            const Prepared d = prepare(data.panel, cfg.features, cfg.split);
            const EvalTargets targets = evaluable_targets(d, cfg.lookback);
            auto variants = deep_models(cfg);
            if (variants.empty()) variants.push_back(cfg.ablations.model);
            TestGate gate;
            for (auto v : variants) {
                const std::string name = nn::to_string(v);
                DeepRunOptions o;
                o.variant = v;
                o.lookback = cfg.lookback;
                o.train = cfg.train;
                o.train.seed = cfg.seed;
                o.log = make_log(log, opt.verbose);
                log << "train: " << name << '\n';
                auto run = run_deep(d, targets, o, gate, name);
                nn::save_checkpoint(*run.trained, m->add("checkpoint_" + name + ".json"));
                {
                    std::ofstream h(m->add("history_" + name + ".csv"));
                    h << "epoch,train_loss,val_loss,val_rmse,learning_rate\n";
                    for (const auto& e : run.trained->history)
                        h << e.epoch << ',' << csv::format_double(e.train_loss) << ','
                          << csv::format_double(e.val_loss) << ',' << csv::format_double(e.val_rmse) << ','
                          << csv::format_double(e.learning_rate) << '\n';
                }
                {
                    std::ofstream mc(m->add("metrics_" + name + ".csv"));
                    write_metrics_csv(mc, name, run.metrics);
                }
                log << "train: " << name << " best epoch " << run.trained->best_epoch << " of "
                    << run.trained->epochs_ran() << ", test RMSE " << run.metrics.macro.rmse << '\n';
            }
            m->finish("ok");
            return int(kOk);
        });
    });
}

int cmd_baseline(const RunOptions& opt, std::ostream& log) {
    std::optional<Manifest> m;
    return guarded(log, nullptr, [&] {
        const auto r = resolve(opt);
        m.emplace(opt.out, "baseline");
        describe(*m, opt, r);
        return guarded(log, &*m, [&] {
            m->begin();
            const auto& cfg = r.config;
            const auto data = load_data(cfg.data);
            const Prepared d = prepare(data.panel, cfg.features, cfg.split);
            const EvalTargets targets = evaluable_targets(d, cfg.lookback);
            TestGate gate;
            json fitted = json::object();
            std::ostringstream metrics;
            bool header = true;
            bool any_failed = false;
            for (const auto& name : kBaselineModels) {
                if (std::find(cfg.models.begin(), cfg.models.end(), name) == cfg.models.end()) continue;
                log << "baseline: " << name << '\n';
                try {
                    auto run = run_baseline(name, d, targets, cfg, gate, name);
                    run.fitted["test_metrics"] = metrics_to_json(run.metrics);
                    fitted[name] = run.fitted;
                    write_metrics_csv(metrics, name, run.metrics, header);
                    header = false;
                } catch (const std::exception& e) {
                    any_failed = true;
                    fitted[name] = {{"status", std::string("failed: ") + e.what()}};
                    log << "baseline: " << name << " failed: " << e.what() << '\n';
                }
            }
            write_text(m->add("baselines.json"), fitted.dump(2) + "\n");
            write_text(m->add("baseline_metrics.csv"), metrics.str());
            m->finish(any_failed ? "rows_failed" : "ok");
            return int(any_failed ? kRowsFailed : kOk);
        });
    });
}

int cmd_ablate(const RunOptions& opt, std::ostream& log) {
    std::optional<Manifest> m;
    return guarded(log, nullptr, [&] {
        const auto r = resolve(opt);
        m.emplace(opt.out, "ablate");
        describe(*m, opt, r);
        return guarded(log, &*m, [&] {
            m->begin();
            const auto& cfg = r.config;
            const auto data = load_data(cfg.data);
            const RunContext ctx{cfg, data.panel, make_log(log, opt.verbose)};
            bool any_failed = false;
            for (const auto& family : cfg.ablations.families) {
                const auto table = run_family(family, ctx);
                any_failed = any_failed || table.any_failed();
                {
                    std::ofstream o(m->add(family + "_results.csv"), std::ios::binary);
                    table.write_csv(o);
                }
                write_text(m->add(family + "_results.json"), table.to_json().dump(2) + "\n");
                write_text(m->add(family + "_results.md"), table.to_markdown());
                log << "ablate: " << family << " done (" << table.rows.size() << " rows)\n";
            }
            m->finish(any_failed ? "rows_failed" : "ok");
            return int(any_failed ? kRowsFailed : kOk);
        });
    });
}

int cmd_report(const RunOptions& opt, const std::vector<fs::path>& extra_dirs, std::ostream& log) {
    Manifest m(opt.out, "report");
    return guarded(log, &m, [&] {
        if (!opt.config.empty()) {
            const auto r = resolve(opt);
            describe(m, opt, r);
        }
        std::vector<fs::path> dirs{opt.out};
        dirs.insert(dirs.end(), extra_dirs.begin(), extra_dirs.end());
        std::vector<fs::path> sources;
        for (const auto& dir : dirs) {
            if (!fs::is_directory(dir)) throw std::ios_base::failure("results directory not found: " + dir.string());
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(dir)) {
                const auto name = e.path().filename().string();
                if (name.ends_with("_results.json")) found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            sources.insert(sources.end(), found.begin(), found.end());
        }
        if (sources.empty()) throw std::ios_base::failure("no *_results.json tables found");
        m.begin();

        std::ostringstream md, rows;
        md << "# Results\n\n";
        bool first = true;
        json inputs = json::array();
        for (const auto& src : sources) {
            std::ifstream in(src);
            const auto table = ResultTable::from_json(json::parse(in));
            inputs.push_back(src.generic_string());
            md << table.to_markdown() << '\n';
            std::ostringstream one;
            table.write_csv(one);
            std::istringstream lines(one.str());
            std::string line;
            std::getline(lines, line);
            if (first) rows << "family,source," << line << '\n';
            first = false;
            while (std::getline(lines, line))
                rows << csv::escape(table.family) << ',' << csv::escape(src.parent_path().generic_string()) << ','
                     << line << '\n';
        }
        m["inputs"] = inputs;
        write_text(m.add("report.md"), md.str());
        write_text(m.add("report.csv"), rows.str());
        log << "report: merged " << sources.size() << " tables\n";
        m.finish("ok");
        return int(kOk);
    });
}

}  // namespace burstcast::cli
