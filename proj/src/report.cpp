#include "bfrb/report.hpp"

#include "bfrb/csv.hpp"
#include "bfrb/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace bfrb {

namespace {

using nlohmann::json;

json summary_json(const MetricSummary& s) {
    return {{"mean", s.mean}, {"std", s.std}, {"count", s.count}};
}

json confusion_json(const Confusion& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fmt(double v, int precision = 3) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

} // namespace

json to_json(const ExperimentConfig& c) {
    const auto& m = c.model;
    return {
        {"window", c.spec.to_string()},
        {"label_set", c.labels.to_string()},
        {"cv", to_string(c.strategy)},
        {"ablation", c.ablation.name()},
        {"seed", c.seed},
        {"clean_only", c.dataset.clean_only},
        {"balance", c.dataset.balance == BalanceMode::PerSession ? "per-session" : "aggregate"},
        {"rmssd_mode", c.features.rmssd_mode == RmssdMode::SubSegments ? "subsegments" : "single"},
        {"hrv_threshold", c.hrv_threshold},
        {"hrv_filter", c.applies_hrv_filter()},
        {"model",
         {{"kind", to_string(m.kind)},
          {"seed", m.seed},
          {"logistic", {{"learning_rate", m.logistic.learning_rate}, {"l2", m.logistic.l2},
                        {"max_iterations", m.logistic.max_iterations}, {"tolerance", m.logistic.tolerance}}},
          {"forest", {{"n_trees", m.forest.n_trees}, {"max_depth", m.forest.max_depth},
                      {"min_samples_split", m.forest.min_samples_split}, {"max_features", m.forest.max_features},
                      {"bootstrap", m.forest.bootstrap}}},
          {"boost", {{"n_trees", m.boost.n_trees}, {"max_depth", m.boost.max_depth},
                     {"learning_rate", m.boost.learning_rate}, {"min_samples_split", m.boost.min_samples_split}}}}},
    };
}

json to_json(const EvalReport& r) {
    json folds = json::array();
    for (const auto& f : r.folds) {
        json jf = {{"index", f.index},
                   {"participant", f.participant},
                   {"iteration", f.iteration},
                   {"n_train", f.n_train},
                   {"n_test", f.n_test},
                   {"n_test_positive", f.n_test_positive},
                   {"defined", f.defined}};
        if (f.defined) {
            jf["recall"] = f.recall;
            jf["auc"] = f.auc;
            jf["f1"] = f.f1;
            jf["confusion"] = confusion_json(f.confusion);
        } else {
            jf["undefined_reason"] = f.undefined_reason;
        }
        folds.push_back(std::move(jf));
    }
    json roc = json::array();
    for (const auto& p : r.roc) {
        roc.push_back({{"threshold", std::isinf(p.threshold) ? json(nullptr) : json(p.threshold)},
                       {"fpr", p.fpr},
                       {"tpr", p.tpr}});
    }
    json importances = json::object();
    for (std::size_t j = 0; j < r.importances.names.size(); ++j) {
        importances[r.importances.names[j]] = r.importances.importance[j];
    }
    json modality = json::object();
    for (const auto& [m, v] : r.importances.per_modality) {
        modality[std::string(to_string(m))] = v;
    }
    json dropout = json::object();
    for (const auto& [id, c] : r.data.dropout.per_participant) {
        dropout[id] = {{"positives", c.positives}, {"negatives", c.negatives}};
    }
    return {
        {"config", to_json(r.config)},
        {"feature_names", r.feature_names},
        {"fold_plan", {{"strategy", to_string(r.plan.strategy)},
                       {"seed", r.plan.seed},
                       {"test_fraction", r.plan.test_fraction},
                       {"iterations", r.plan.iterations},
                       {"folds", r.plan.folds.size()}}},
        {"data", {{"windows", r.data.windows},
                  {"positives", r.data.positives},
                  {"negatives", r.data.negatives},
                  {"excluded", r.data.excluded},
                  {"skipped_positives", r.data.skipped_positives},
                  {"hrv_filter_applied", r.data.hrv_filter_applied},
                  {"hrv_dropout", dropout}}},
        {"folds", folds},
        {"recall", summary_json(r.recall)},
        {"auc", summary_json(r.auc)},
        {"f1", summary_json(r.f1)},
        {"undefined_folds", r.undefined_folds},
        {"confusion", confusion_json(r.confusion)},
        {"roc", roc},
        {"feature_importances", importances},
        {"modality_importances", modality},
    };
}

json to_json(const DescriptiveReport& r) {
    json prevalence = json::object();
    for (const auto& [b, n] : r.behavior_counts) {
        const auto share = r.share_percent(b);
        prevalence[std::string(to_string(b))] = {{"count", n},
                                                 {"share_percent", share ? json(*share) : json(nullptr)}};
    }
    json stages = json::object();
    for (Stage s : kAllStages) {
        auto hr = r.stage_hr_mean.find(s);
        stages[std::string(to_string(s))] = {
            {"behavior_count", r.stage_counts.at(s)},
            {"mean_normalized_hr", hr == r.stage_hr_mean.end() ? json(nullptr) : json(hr->second)}};
    }
    json participants = json::array();
    for (const auto& p : r.participants) {
        json counts = json::object();
        for (const auto& [b, n] : p.counts) {
            counts[std::string(to_string(b))] = n;
        }
        json stage_hr = json::object();
        for (const auto& [s, v] : p.stage_hr) {
            stage_hr[std::string(to_string(s))] = v;
        }
        participants.push_back({{"participant", p.participant_id},
                                {"events", p.durations.count},
                                {"duration_s", {{"total", p.durations.total_s},
                                                {"mean", p.durations.mean_s},
                                                {"median", p.durations.median_s},
                                                {"min", p.durations.min_s},
                                                {"max", p.durations.max_s}}},
                                {"counts", counts},
                                {"stage_mean_normalized_hr", stage_hr}});
    }
    return {{"total_events", r.total_events},
            {"total_duration_min", r.total_duration_min},
            {"unstaged_events", r.unstaged_events},
            {"prevalence", prevalence},
            {"stages", stages},
            {"participants", participants}};
}

void write_folds_csv(const std::vector<EvalReport>& reports, std::ostream& out) {
    out << "subset,fold,participant,iteration,n_train,n_test,n_test_positive,defined,recall,auc,f1,tp,fp,tn,fn\n";
    for (const auto& r : reports) {
        for (const auto& f : r.folds) {
            out << r.config.ablation.name() << ',' << f.index << ',' << f.participant << ',' << f.iteration << ','
                << f.n_train << ',' << f.n_test << ',' << f.n_test_positive << ',' << (f.defined ? 1 : 0) << ',';
            if (f.defined) {
                out << csv::fixed6(f.recall) << ',' << csv::fixed6(f.auc) << ',' << csv::fixed6(f.f1) << ','
                    << f.confusion.tp << ',' << f.confusion.fp << ',' << f.confusion.tn << ',' << f.confusion.fn;
            } else {
                out << ",,,,,,";
            }
            out << '\n';
        }
    }
}

void write_roc_csv(const std::vector<RocPoint>& points, std::ostream& out) {
    out << "threshold,fpr,tpr\n";
    for (const auto& p : points) {
        out << (std::isinf(p.threshold) ? std::string("inf") : csv::fixed6(p.threshold)) << ','
            << csv::fixed6(p.fpr) << ',' << csv::fixed6(p.tpr) << '\n';
    }
}

std::string render_roc_svg(const std::vector<RocCurve>& curves, const std::string& title,
                           const std::string& metadata) {
    static constexpr const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    constexpr double left = 60, top = 40, size = 360;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"460\" font-family=\"sans-serif\">\n"
        << "<metadata>" << xml_escape(metadata) << "</metadata>\n"
        << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << xml_escape(title) << "</text>\n"
        << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << size << "\" height=\"" << size
        << "\" fill=\"none\" stroke=\"#333\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top + size << "\" x2=\"" << left + size << "\" y2=\"" << top
        << "\" stroke=\"#aaa\" stroke-dasharray=\"4 4\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = k / 4.0;
        svg << "<text x=\"" << left + v * size << "\" y=\"" << top + size + 16 << "\" font-size=\"10\" text-anchor=\"middle\">"
            << fmt(v, 2) << "</text>\n"
            << "<text x=\"" << left - 6 << "\" y=\"" << top + size - v * size + 3
            << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(v, 2) << "</text>\n";
    }
    svg << "<text x=\"" << left + size / 2 << "\" y=\"" << top + size + 34
        << "\" font-size=\"12\" text-anchor=\"middle\">False positive rate</text>\n"
        << "<text x=\"16\" y=\"" << top + size / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << top + size / 2 << ")\">True positive rate</text>\n";
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = colors[c % std::size(colors)];
        svg << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << color << "\" points=\"";
        for (const auto& p : curves[c].points) {
            svg << fmt(left + p.fpr * size, 2) << ',' << fmt(top + size - p.tpr * size, 2) << ' ';
        }
        svg << "\"/>\n";
        const double y = top + 14 + 18.0 * static_cast<double>(c);
        svg << "<line x1=\"" << left + size + 16 << "\" y1=\"" << y - 4 << "\" x2=\"" << left + size + 36 << "\" y2=\""
            << y - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << left + size + 40 << "\" y=\"" << y << "\" font-size=\"11\">"
            << xml_escape(curves[c].label) << " (AUC " << fmt(curves[c].auc) << ")</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_prevalence_csv(const DescriptiveReport& report, std::ostream& out) {
    out << "behavior,count,share_percent\n";
    for (const auto& [b, n] : report.behavior_counts) {
        const auto share = report.share_percent(b);
        out << to_string(b) << ',' << n << ',' << (share ? csv::fixed6(*share) : std::string("undefined")) << '\n';
    }
}

void write_participant_csv(const DescriptiveReport& report, std::ostream& out) {
    out << "participant,events,total_s,mean_s,median_s,min_s,max_s";
    for (Behavior b : kAllBehaviors) {
        out << ',' << to_string(b);
    }
    out << '\n';
    for (const auto& p : report.participants) {
        const auto& d = p.durations;
        out << p.participant_id << ',' << d.count << ',' << csv::fixed6(d.total_s) << ',' << csv::fixed6(d.mean_s)
            << ',' << csv::fixed6(d.median_s) << ',' << csv::fixed6(d.min_s) << ',' << csv::fixed6(d.max_s);
        for (Behavior b : kAllBehaviors) {
            out << ',' << p.counts.at(b);
        }
        out << '\n';
    }
}

void write_stage_csv(const DescriptiveReport& report, std::ostream& out) {
    out << "stage,behavior_count,mean_normalized_hr\n";
    for (Stage s : kAllStages) {
        auto hr = report.stage_hr_mean.find(s);
        out << to_string(s) << ',' << report.stage_counts.at(s) << ','
            << (hr == report.stage_hr_mean.end() ? std::string("") : csv::fixed6(hr->second)) << '\n';
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        }
        out << content;
        if (!out) {
            throw Error(ErrorKind::Io, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorKind::Io, "rename to " + path.string() + ": " + ec.message());
    }
}

} // namespace bfrb
