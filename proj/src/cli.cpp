#include "bfrb/cli.hpp"

#include "bfrb/csv.hpp"
#include "bfrb/error.hpp"
#include "bfrb/ingest.hpp"
#include "bfrb/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace bfrb::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& what) {
    throw Error(ErrorKind::InvalidConfig, what);
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            bad_config("unknown key '" + where + key + "'");
        }
    }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        bad_config("'" + where + key + "' has the wrong type");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

void apply_model(const json& m, ModelConfig& model, bool& seed_set) {
    if (!m.is_object()) bad_config("'model' must be an object");
    reject_unknown(m, {"kind", "seed", "logistic", "forest", "boost"}, "model.");
    if (m.contains("kind")) model.kind = parse_model_kind(get_as<std::string>(m, "kind", "model."));
    if (m.contains("seed")) {
        model.seed = get_as<std::uint64_t>(m, "seed", "model.");
        seed_set = true;
    }
    if (m.contains("logistic")) {
        const auto& l = m.at("logistic");
        reject_unknown(l, {"learning_rate", "l2", "max_iterations", "tolerance"}, "model.logistic.");
        if (l.contains("learning_rate")) model.logistic.learning_rate = get_as<double>(l, "learning_rate", "model.logistic.");
        if (l.contains("l2")) model.logistic.l2 = get_as<double>(l, "l2", "model.logistic.");
        if (l.contains("max_iterations")) model.logistic.max_iterations = get_as<int>(l, "max_iterations", "model.logistic.");
        if (l.contains("tolerance")) model.logistic.tolerance = get_as<double>(l, "tolerance", "model.logistic.");
    }
    if (m.contains("forest")) {
        const auto& f = m.at("forest");
        reject_unknown(f, {"n_trees", "max_depth", "min_samples_split", "max_features", "bootstrap"}, "model.forest.");
        if (f.contains("n_trees")) model.forest.n_trees = get_as<int>(f, "n_trees", "model.forest.");
        if (f.contains("max_depth")) model.forest.max_depth = get_as<int>(f, "max_depth", "model.forest.");
        if (f.contains("min_samples_split")) model.forest.min_samples_split = get_as<int>(f, "min_samples_split", "model.forest.");
        if (f.contains("max_features")) model.forest.max_features = get_as<int>(f, "max_features", "model.forest.");
        if (f.contains("bootstrap")) model.forest.bootstrap = get_as<bool>(f, "bootstrap", "model.forest.");
    }
    if (m.contains("boost")) {
        const auto& b = m.at("boost");
        reject_unknown(b, {"n_trees", "max_depth", "learning_rate", "min_samples_split"}, "model.boost.");
        if (b.contains("n_trees")) model.boost.n_trees = get_as<int>(b, "n_trees", "model.boost.");
        if (b.contains("max_depth")) model.boost.max_depth = get_as<int>(b, "max_depth", "model.boost.");
        if (b.contains("learning_rate")) model.boost.learning_rate = get_as<double>(b, "learning_rate", "model.boost.");
        if (b.contains("min_samples_split")) model.boost.min_samples_split = get_as<int>(b, "min_samples_split", "model.boost.");
    }
}

BalanceMode parse_balance(std::string_view s) {
    if (s == "per-session" || s == "session") return BalanceMode::PerSession;
    if (s == "aggregate") return BalanceMode::Aggregate;
    bad_config("unknown balance mode '" + std::string(s) + "'");
}

RmssdMode parse_rmssd(std::string_view s) {
    if (s == "subsegments" || s == "sub-segments") return RmssdMode::SubSegments;
    if (s == "single") return RmssdMode::Single;
    bad_config("unknown rmssd mode '" + std::string(s) + "'");
}

int exit_code_for(const Error& e) {
    return e.is_io() ? kIoError : kDomainError;
}

/// Runs `body` and maps failures onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
}

AdapterConfig adapter_or_default(const std::optional<std::filesystem::path>& path) {
    return path ? load_adapter(*path) : AdapterConfig{};
}

std::vector<PreparedSession> load_prepared(const RunConfig& config) {
    const AdapterConfig adapter = adapter_or_default(config.adapter);
    return prepare_sessions(load_dataset(config.dataset_root, adapter));
}

std::string csv_with_config(const json& run_config, const std::function<void(std::ostream&)>& body) {
    std::ostringstream out;
    out << "# run_config=" << run_config.dump() << '\n';
    body(out);
    return out.str();
}

std::string file_token(std::string text) {
    for (char& c : text) {
        if (c == '/' || c == ':' || c == ',' || c == '+') c = '_';
    }
    return text;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                fn(i);
            }
        });
    }
}

std::string summary_line(const EvalReport& r) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(3);
    s << r.config.ablation.name() << ": AUC " << r.auc.mean << " (" << r.auc.std << "), recall " << r.recall.mean
      << " (" << r.recall.std << "), F1 " << r.f1.mean << " (" << r.f1.std << "), folds " << r.auc.count << '/'
      << r.folds.size();
    return s.str();
}

} // namespace

json RunConfig::to_json() const {
    json j = bfrb::to_json(experiment);
    j["dataset_root"] = dataset_root.string();
    j["adapter"] = adapter ? json(adapter->string()) : json(nullptr);
    json subsets = json::array();
    for (const auto& s : ablations) subsets.push_back(s.name());
    j["ablations"] = subsets;
    j["output_dir"] = output_dir.string();
    j["plots"] = plots;
    return j;
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir, const Overrides& o) {
    if (!doc.is_object()) bad_config("run config must be a JSON object");
    reject_unknown(doc, {"dataset_root", "adapter", "window", "label_set", "model", "cv", "ablations", "seed",
                         "output_dir", "clean_only", "balance", "rmssd_mode", "hrv_threshold", "hrv_filter", "plots"},
                   "");
    RunConfig c;
    auto& e = c.experiment;
    bool seed_set = false;
    bool model_seed_set = false;

    if (doc.contains("dataset_root")) c.dataset_root = resolve(base_dir, get_as<std::string>(doc, "dataset_root", ""));
    if (doc.contains("adapter") && !doc.at("adapter").is_null())
        c.adapter = resolve(base_dir, get_as<std::string>(doc, "adapter", ""));
    if (doc.contains("window")) e.spec = WindowSpec::parse(get_as<std::string>(doc, "window", ""));
    if (doc.contains("label_set")) e.labels = LabelSet::parse(get_as<std::string>(doc, "label_set", ""));
    if (doc.contains("model")) apply_model(doc.at("model"), e.model, model_seed_set);
    if (doc.contains("cv")) e.strategy = parse_cv_strategy(get_as<std::string>(doc, "cv", ""));
    if (doc.contains("ablations")) {
        for (const auto& s : get_as<std::vector<std::string>>(doc, "ablations", "")) {
            c.ablations.push_back(ModalitySubset::parse(s));
        }
    }
    if (doc.contains("seed")) {
        e.seed = get_as<std::uint64_t>(doc, "seed", "");
        seed_set = true;
    }
    if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, get_as<std::string>(doc, "output_dir", ""));
    if (doc.contains("clean_only")) e.dataset.clean_only = get_as<bool>(doc, "clean_only", "");
    if (doc.contains("balance")) e.dataset.balance = parse_balance(get_as<std::string>(doc, "balance", ""));
    if (doc.contains("rmssd_mode")) e.features.rmssd_mode = parse_rmssd(get_as<std::string>(doc, "rmssd_mode", ""));
    if (doc.contains("hrv_threshold")) e.hrv_threshold = get_as<double>(doc, "hrv_threshold", "");
    if (doc.contains("hrv_filter") && !doc.at("hrv_filter").is_null()) e.hrv_filter = get_as<bool>(doc, "hrv_filter", "");
    if (doc.contains("plots")) c.plots = get_as<bool>(doc, "plots", "");

    if (o.dataset_root) c.dataset_root = *o.dataset_root;
    if (o.adapter) c.adapter = *o.adapter;
    if (o.window) e.spec = WindowSpec::parse(*o.window);
    if (o.labels) e.labels = LabelSet::parse(*o.labels);
    if (o.model) e.model.kind = parse_model_kind(*o.model);
    if (o.cv) e.strategy = parse_cv_strategy(*o.cv);
    if (o.seed) {
        e.seed = *o.seed;
        seed_set = true;
    }
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.balance) e.dataset.balance = parse_balance(*o.balance);
    if (o.rmssd) e.features.rmssd_mode = parse_rmssd(*o.rmssd);
    if (o.hrv_threshold) e.hrv_threshold = *o.hrv_threshold;
    if (!o.ablations.empty()) {
        c.ablations.clear();
        for (const auto& s : o.ablations) c.ablations.push_back(ModalitySubset::parse(s));
    }
    if (o.clean_only) e.dataset.clean_only = true;
    if (o.no_plots) c.plots = false;

    if (!seed_set) {
        if (const char* env = std::getenv("BFRB_SEED"); env != nullptr && *env != '\0') {
            try {
                e.seed = std::stoull(env);
            } catch (const std::exception&) {
                bad_config("BFRB_SEED is not an unsigned integer");
            }
        }
    }
    if (!model_seed_set) {
        e.model.seed = e.seed;
    }
    if (!(e.hrv_threshold >= 0.0 && e.hrv_threshold <= 1.0)) bad_config("hrv_threshold must lie in [0, 1]");
    e.model.validate();
    if (c.dataset_root.empty()) bad_config("dataset_root is required");
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::FileNotFound, path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        bad_config(path.string() + ": " + e.what());
    }
    return parse_run_config(doc, path.parent_path(), overrides);
}

int cmd_validate(const std::filesystem::path& root, const std::optional<std::filesystem::path>& adapter_path,
                 std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        namespace fs = std::filesystem;
        const AdapterConfig adapter = adapter_or_default(adapter_path);
        if (!fs::is_directory(root)) {
            throw Error(ErrorKind::FileNotFound, root.string());
        }
        std::vector<fs::path> dirs;
        for (const auto& entry : fs::directory_iterator(root)) {
            if (entry.is_directory()) dirs.push_back(entry.path());
        }
        std::sort(dirs.begin(), dirs.end());
        std::size_t checked = 0, failed = 0;
        bool io_failure = false;
        for (const auto& dir : dirs) {
            if (!fs::exists(dir / adapter.recording_file)) {
                continue;
            }
            ++checked;
            const std::string id = dir.filename().string();
            try {
                Recording rec = load_recording(dir / adapter.recording_file, adapter, id);
                std::vector<BehaviorEvent> events;
                if (fs::exists(dir / adapter.labels_file)) {
                    events = load_labels(dir / adapter.labels_file, adapter);
                }
                auto stages = load_stages(dir / adapter.stages_file, adapter);
                const auto bundle = assemble_session(std::move(rec), std::move(stages), std::move(events));
                compute_baseline_stats(bundle);
                char minutes[32];
                std::snprintf(minutes, sizeof minutes, "%.1f",
                              static_cast<double>(bundle.recording().span().duration()) / 60000.0);
                out << "PASS " << id << ": " << bundle.recording().samples.size() << " samples, " << minutes
                    << " min, " << bundle.events().size() << " events, " << bundle.stages().size() << " stages\n";
            } catch (const Error& e) {
                ++failed;
                io_failure = io_failure || e.is_io();
                out << "FAIL " << id << ": " << e.what() << '\n';
            }
        }
        if (checked == 0) {
            throw Error(ErrorKind::EmptyDataset, "no participant directories under " + root.string());
        }
        out << checked - failed << '/' << checked << " sessions valid\n";
        if (failed == 0) return static_cast<int>(kOk);
        return static_cast<int>(io_failure ? kIoError : kDomainError);
    });
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto sessions = load_prepared(config);
        const auto reports = run_ablation_suite(sessions, config.experiment, config.ablations);
        const json run_config = config.to_json();

        json doc = {{"run_config", run_config}, {"reports", json::array()}};
        for (const auto& r : reports) {
            doc["reports"].push_back(to_json(r));
        }
        write_file_atomic(config.output_dir / "report.json", doc.dump(2) + "\n");
        write_file_atomic(config.output_dir / "folds.csv",
                          csv_with_config(run_config, [&](std::ostream& o) { write_folds_csv(reports, o); }));
        std::vector<RocCurve> curves;
        for (const auto& r : reports) {
            write_file_atomic(config.output_dir / ("roc_" + file_token(r.config.ablation.name()) + ".csv"),
                              csv_with_config(run_config, [&](std::ostream& o) { write_roc_csv(r.roc, o); }));
            curves.push_back({r.config.ablation.name(), r.roc, r.auc.mean});
        }
        if (config.plots) {
            const auto& e = config.experiment;
            const std::string title = e.spec.to_string() + " " + e.labels.to_string() + " " +
                                      std::string(to_string(e.model.kind)) + " (" +
                                      std::string(to_string(e.strategy)) + ")";
            write_file_atomic(config.output_dir / "roc.svg", render_roc_svg(curves, title, run_config.dump()));
        }
        for (const auto& r : reports) {
            out << summary_line(r) << '\n';
        }
        out << "wrote " << (config.output_dir / "report.json").string() << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_matrix(const RunConfig& config, std::ostream& out, std::ostream& err, unsigned threads) {
    return guarded(err, [&] {
        const auto sessions = load_prepared(config);
        const std::vector<CvStrategy> strategies = {CvStrategy::ParticipantStratified, CvStrategy::LeaveOneUserOut};
        const std::vector<LabelSet> label_sets = {LabelSet::all_compulsive(), LabelSet::face_touching(),
                                                  LabelSet::skin_picking()};
        const std::vector<ModelKind> models = {ModelKind::Logistic, ModelKind::RandomForest, ModelKind::GradientBoost};
        const std::vector<WindowSpec> windows = {WindowSpec(60, 1), WindowSpec(300, 1)};

        // Window datasets depend only on (window, label set); build each once.
        struct DataSlot {
            ExperimentConfig config;
            std::optional<ExperimentData> data;
            std::map<CvStrategy, FoldPlan> plans;
            std::map<CvStrategy, std::string> plan_error;
            std::string error;
        };
        std::vector<DataSlot> slots;
        for (const auto& w : windows) {
            for (const auto& l : label_sets) {
                DataSlot slot;
                slot.config = config.experiment;
                slot.config.spec = w;
                slot.config.labels = l;
                slots.push_back(std::move(slot));
            }
        }
        parallel_for(slots.size(), threads, [&](std::size_t i) {
            auto& slot = slots[i];
            try {
                slot.data = prepare_experiment_data(sessions, slot.config);
            } catch (const Error& e) {
                slot.error = e.what();
                return;
            }
            for (CvStrategy s : strategies) {
                try {
                    slot.plans[s] = plan_folds(slot.data->dataset, s, slot.config.seed);
                } catch (const Error& e) {
                    slot.plan_error[s] = e.what();
                }
            }
        });

        struct Cell {
            CvStrategy strategy;
            std::size_t slot;
            ModelKind model;
            std::optional<EvalReport> report;
            std::string error;
        };
        std::vector<Cell> cells;
        for (CvStrategy s : strategies) {
            for (std::size_t slot = 0; slot < slots.size(); ++slot) {
                for (ModelKind m : models) {
                    cells.push_back({s, slot, m, std::nullopt, {}});
                }
            }
        }
        parallel_for(cells.size(), threads, [&](std::size_t i) {
            auto& cell = cells[i];
            const auto& slot = slots[cell.slot];
            if (!slot.error.empty()) {
                cell.error = slot.error;
                return;
            }
            if (auto pe = slot.plan_error.find(cell.strategy); pe != slot.plan_error.end()) {
                cell.error = pe->second;
                return;
            }
            ExperimentConfig c = slot.config;
            c.strategy = cell.strategy;
            c.model.kind = cell.model;
            try {
                cell.report = evaluate(*slot.data, slot.plans.at(cell.strategy), c);
            } catch (const Error& e) {
                cell.error = e.what();
            }
        });

        const json run_config = config.to_json();
        std::size_t failures = 0;
        for (const auto& cell : cells) {
            const auto& slot = slots[cell.slot];
            ExperimentConfig c = slot.config;
            c.strategy = cell.strategy;
            c.model.kind = cell.model;
            json doc = {{"run_config", run_config}, {"cell", to_json(c)}};
            if (cell.report) {
                doc["report"] = to_json(*cell.report);
            } else {
                doc["error"] = cell.error;
                ++failures;
            }
            const std::string name = file_token(c.labels.to_string()) + "_" + std::string(to_string(cell.model)) +
                                     "_" + file_token(c.spec.to_string()) + ".json";
            write_file_atomic(config.output_dir / "matrix" / std::string(to_string(cell.strategy)) / name,
                              doc.dump(2) + "\n");
        }

        for (CvStrategy s : strategies) {
            std::ostringstream table;
            table << "label_set,model";
            for (const auto& w : windows) {
                const std::string p = file_token(w.to_string());
                for (const char* metric : {"recall", "auc", "f1"}) {
                    table << ',' << p << '_' << metric << "_mean," << p << '_' << metric << "_std";
                }
            }
            table << '\n';
            for (std::size_t l = 0; l < label_sets.size(); ++l) {
                for (ModelKind m : models) {
                    table << label_sets[l].to_string() << ',' << to_string(m);
                    for (std::size_t w = 0; w < windows.size(); ++w) {
                        const std::size_t slot = w * label_sets.size() + l;
                        const auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
                            return c.strategy == s && c.slot == slot && c.model == m;
                        });
                        for (int k = 0; k < 3; ++k) {
                            if (it->report && it->report->auc.count > 0) {
                                const auto& r = *it->report;
                                const MetricSummary& ms = k == 0 ? r.recall : k == 1 ? r.auc : r.f1;
                                table << ',' << csv::fixed6(ms.mean) << ',' << csv::fixed6(ms.std);
                            } else {
                                table << ",ERROR,ERROR";
                            }
                        }
                    }
                    table << '\n';
                }
            }
            write_file_atomic(config.output_dir / ("summary_" + std::string(to_string(s)) + ".csv"),
                              csv_with_config(run_config, [&](std::ostream& o) { o << table.str(); }));
        }
        out << cells.size() - failures << '/' << cells.size() << " cells completed; summaries in "
            << config.output_dir.string() << '\n';
        for (const auto& cell : cells) {
            if (!cell.report) {
                err << "cell " << to_string(cell.strategy) << ' ' << slots[cell.slot].config.labels.to_string() << ' '
                    << to_string(cell.model) << ' ' << slots[cell.slot].config.spec.to_string() << ": "
                    << cell.error << '\n';
            }
        }
        return static_cast<int>(kOk);
    });
}

int cmd_stats(const std::filesystem::path& root, const std::optional<std::filesystem::path>& adapter,
              const std::filesystem::path& output_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto sessions = prepare_sessions(load_dataset(root, adapter_or_default(adapter)));
        const DescriptiveReport report = descriptive_stats_report(sessions);
        json doc = to_json(report);
        doc["dataset_root"] = root.string();
        write_file_atomic(output_dir / "stats.json", doc.dump(2) + "\n");
        const json meta = {{"dataset_root", root.string()},
                           {"adapter", adapter ? json(adapter->string()) : json(nullptr)}};
        write_file_atomic(output_dir / "prevalence.csv",
                          csv_with_config(meta, [&](std::ostream& o) { write_prevalence_csv(report, o); }));
        write_file_atomic(output_dir / "participants.csv",
                          csv_with_config(meta, [&](std::ostream& o) { write_participant_csv(report, o); }));
        write_file_atomic(output_dir / "stages.csv",
                          csv_with_config(meta, [&](std::ostream& o) { write_stage_csv(report, o); }));

        std::vector<std::pair<std::size_t, Behavior>> ranked;
        for (const auto& [b, n] : report.behavior_counts) ranked.emplace_back(n, b);
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        char minutes[32];
        std::snprintf(minutes, sizeof minutes, "%.1f", report.total_duration_min);
        out << report.participants.size() << " sessions, " << report.total_events << " events, " << minutes
            << " min\n";
        for (const auto& [n, b] : ranked) {
            const auto share = report.share_percent(b);
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.1f%%", share.value_or(0.0));
            out << "  " << to_string(b) << ": " << n << " (" << (share ? buf : "undefined") << ")\n";
        }
        return static_cast<int>(kOk);
    });
}

int cmd_featurize(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto sessions = load_prepared(config);
        const auto data = prepare_experiment_data(sessions, config.experiment);
        const json run_config = config.to_json();
        write_file_atomic(config.output_dir / "features.csv",
                          csv_with_config(run_config, [&](std::ostream& o) { write_feature_csv(data.dataset, o); }));
        out << data.dataset.vectors.size() << " feature vectors (" << data.summary.positives << " positive, "
            << data.summary.negatives << " negative, " << data.summary.excluded << " excluded, "
            << data.summary.dropout.total() << " dropped by hr validity) -> "
            << (config.output_dir / "features.csv").string() << '\n';
        return static_cast<int>(kOk);
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Anticipatory BFRB detection pipeline"};
    app.require_subcommand(1);

    std::string root, adapter, config_path, stats_out = "bfrb-stats";
    Overrides o;
    std::string dataset_opt, adapter_opt, window, labels, model, cv, out_dir, balance, rmssd;
    std::uint64_t seed = 0;
    double hrv_threshold = 0.5;
    unsigned threads = 0;

    auto* validate = app.add_subcommand("validate", "Check every session under a dataset root");
    validate->add_option("root", root, "Dataset root")->required();
    validate->add_option("--adapter", adapter, "Adapter config JSON");

    auto* stats = app.add_subcommand("stats", "Descriptive statistics report");
    stats->add_option("root", root, "Dataset root")->required();
    stats->add_option("--adapter", adapter, "Adapter config JSON");
    stats->add_option("--out", stats_out, "Output directory");

    std::vector<CLI::App*> experiment_cmds = {
        app.add_subcommand("run", "Run one experiment (with modality ablations)"),
        app.add_subcommand("matrix", "Run every label set x model x window x CV cell"),
        app.add_subcommand("featurize", "Write the feature matrix CSV"),
    };
    std::map<std::string, CLI::Option*> opts;
    for (auto* cmd : experiment_cmds) {
        cmd->add_option("config", config_path, "Run config JSON");
        cmd->add_option("--dataset", dataset_opt, "Dataset root");
        cmd->add_option("--adapter", adapter_opt, "Adapter config JSON");
        cmd->add_option("--window", window, "Window spec, e.g. 300x/1y");
        cmd->add_option("--labels", labels, "all-compulsive | face-touching | skin-picking | custom:a,b");
        cmd->add_option("--model", model, "logistic | random-forest | gradient-boost");
        cmd->add_option("--cv", cv, "stratified | louo");
        cmd->add_option("--seed", seed, "Seed (falls back to BFRB_SEED)");
        cmd->add_option("--out", out_dir, "Output directory");
        cmd->add_option("--balance", balance, "per-session | aggregate");
        cmd->add_option("--rmssd", rmssd, "subsegments | single");
        cmd->add_option("--hrv-threshold", hrv_threshold, "HR validity threshold for 5-minute windows");
        cmd->add_option("--ablation", o.ablations, "Modality subset (acc, gyr, heart, acc+gyr, all); repeatable");
        cmd->add_flag("--clean-only", o.clean_only, "Keep only clean positive windows");
        cmd->add_flag("--no-plots", o.no_plots, "Skip SVG output");
    }
    experiment_cmds[1]->add_option("--threads", threads, "Worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg_out, msg_err;
        const int code = app.exit(e, msg_out, msg_err);
        out << msg_out.str();
        err << msg_err.str();
        return code == 0 ? static_cast<int>(kOk) : static_cast<int>(kIoError);
    }

    auto opt_path = [](const std::string& p) {
        return p.empty() ? std::optional<std::filesystem::path>{} : std::optional<std::filesystem::path>(p);
    };
    if (validate->parsed()) {
        return cmd_validate(root, opt_path(adapter), out, err);
    }
    if (stats->parsed()) {
        return cmd_stats(root, opt_path(adapter), stats_out, out, err);
    }

    CLI::App* cmd = nullptr;
    for (auto* c : experiment_cmds) {
        if (c->parsed()) cmd = c;
    }
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--dataset")) o.dataset_root = dataset_opt;
    if (given("--adapter")) o.adapter = adapter_opt;
    if (given("--window")) o.window = window;
    if (given("--labels")) o.labels = labels;
    if (given("--model")) o.model = model;
    if (given("--cv")) o.cv = cv;
    if (given("--seed")) o.seed = seed;
    if (given("--out")) o.output_dir = out_dir;
    if (given("--balance")) o.balance = balance;
    if (given("--rmssd")) o.rmssd = rmssd;
    if (given("--hrv-threshold")) o.hrv_threshold = hrv_threshold;

    RunConfig config;
    const int load = guarded(err, [&] {
        config = config_path.empty() ? parse_run_config(json::object(), {}, o) : load_run_config(config_path, o);
        return static_cast<int>(kOk);
    });
    if (load != kOk) {
        // An unsupported window or label set is a domain error; everything else is config/IO.
        return load;
    }
    const std::string name = cmd->get_name();
    if (name == "run") return cmd_run(config, out, err);
    if (name == "matrix") return cmd_matrix(config, out, err, threads);
    return cmd_featurize(config, out, err);
}

} // namespace bfrb::cli
