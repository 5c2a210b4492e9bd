#include "bfrb/features.hpp"

#include "bfrb/csv.hpp"
#include "bfrb/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

namespace bfrb {

namespace {

constexpr std::array<std::string_view, 4> kStatNames = {"mean", "std", "min", "max"};

void put_stats(std::map<std::string, double>& out, std::string_view prefix, const DescriptiveStats& s) {
    const std::string p(prefix);
    out[p + "mean"] = s.mean;
    out[p + "std"] = s.std;
    out[p + "min"] = s.min;
    out[p + "max"] = s.max;
}

} // namespace

DescriptiveStats descriptive_stats(std::span<const double> values) {
    if (values.empty()) {
        throw Error(ErrorKind::EmptyChannel, "no samples");
    }
    DescriptiveStats s;
    double sum = 0.0;
    s.min = values.front();
    s.max = values.front();
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    const double n = static_cast<double>(values.size());
    s.mean = sum / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(ss / n);
    // Rounding can push the mean a hair outside [min, max] for constant input.
    s.mean = std::clamp(s.mean, s.min, s.max);
    if (s.min == s.max) {
        s.std = 0.0;
    }
    return s;
}

double rmssd(std::span<const double> rr) {
    if (rr.size() < 2) {
        throw Error(ErrorKind::InsufficientData, std::to_string(rr.size()) + " RR intervals");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i + 1 < rr.size(); ++i) {
        const double d = rr[i] - rr[i + 1];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(rr.size() - 1));
}

std::vector<std::string> feature_schema(const WindowSpec& spec, const FeatureOptions& options) {
    std::vector<std::string> names;
    for (Channel c : kAllChannels) {
        for (auto stat : kStatNames) {
            names.push_back(std::string(feature_prefix(c)) + std::string(stat));
        }
    }
    if (spec.x_seconds() == kHrvWindowSeconds) {
        if (options.rmssd_mode == RmssdMode::Single) {
            names.push_back("RMSSD");
        } else {
            for (auto stat : kStatNames) {
                names.push_back("RMSSD" + std::string(stat));
            }
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

FeatureVector featurize(const WindowInstance& window, const PreparedSession& session,
                        const WindowSpec& spec, const FeatureOptions& options) {
    if (window.participant_id != session.participant_id()) {
        throw Error(ErrorKind::SessionMismatch, window.participant_id + " vs " + session.participant_id());
    }
    FeatureVector fv;
    fv.label = window.positive ? 1 : 0;
    fv.participant_id = window.participant_id;
    fv.behavior = window.behavior;
    fv.clean = window.clean;
    fv.hr_validity = window.hr_validity;
    fv.anchor_ms = window.anchor();

    const auto samples = session.normalized.recording().slice(window.x_span);
    std::vector<double> values;
    values.reserve(samples.size());
    for (Channel c : kAllChannels) {
        values.clear();
        for (const auto& s : samples) {
            if (auto v = s.value(c)) {
                values.push_back(*v);
            }
        }
        if (values.empty()) {
            throw Error(ErrorKind::FeatureUnavailable, std::string(feature_prefix(c)));
        }
        put_stats(fv.values, feature_prefix(c), descriptive_stats(values));
    }

    if (spec.x_seconds() == kHrvWindowSeconds) {
        const auto& raw = session.raw.recording();
        try {
            if (options.rmssd_mode == RmssdMode::Single) {
                fv.values["RMSSD"] = rmssd(derive_rr_intervals(raw.slice(window.x_span), window.x_span));
            } else {
                constexpr Millis kSegment = 60'000;
                std::vector<double> per_segment;
                for (Millis start = window.x_span.start; start < window.x_span.end; start += kSegment) {
                    const TimeSpan seg{start, std::min(start + kSegment, window.x_span.end)};
                    per_segment.push_back(rmssd(derive_rr_intervals(raw.slice(seg), seg)));
                }
                put_stats(fv.values, "RMSSD", descriptive_stats(per_segment));
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InsufficientHrData && e.kind() != ErrorKind::InsufficientData) {
                throw;
            }
            throw Error(ErrorKind::FeatureUnavailable, "RMSSD");
        }
    }
    for (const auto& [name, v] : fv.values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::FeatureUnavailable, name + " is not finite");
        }
    }
    return fv;
}

std::vector<std::string> FeatureDataset::participants() const {
    std::set<std::string> ids;
    for (const auto& v : vectors) {
        ids.insert(v.participant_id);
    }
    return {ids.begin(), ids.end()};
}

FeatureDataset featurize_dataset(const WindowDataset& windows, const std::vector<PreparedSession>& sessions,
                                 const FeatureOptions& options) {
    FeatureDataset ds;
    ds.spec = windows.spec;
    ds.names = feature_schema(windows.spec, options);
    std::map<std::string, const PreparedSession*> by_id;
    for (const auto& s : sessions) {
        by_id[s.participant_id()] = &s;
    }
    for (const auto& w : windows.windows) {
        auto it = by_id.find(w.participant_id);
        if (it == by_id.end()) {
            throw Error(ErrorKind::SessionMismatch, "no session for window of " + w.participant_id);
        }
        try {
            ds.vectors.push_back(featurize(w, *it->second, windows.spec, options));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::FeatureUnavailable) {
                throw;
            }
            ds.excluded.push_back({w.participant_id, w.anchor(), w.positive ? 1 : 0, e.what()});
        }
    }
    return ds;
}

std::size_t DropoutReport::total() const {
    std::size_t n = 0;
    for (const auto& [id, c] : per_participant) {
        n += c.positives + c.negatives;
    }
    return n;
}

FilterResult hrv_validity_filter(const FeatureDataset& dataset, double threshold) {
    FilterResult out{dataset, {}};
    out.report.threshold = threshold;
    out.dataset.vectors.clear();
    for (const auto& v : dataset.vectors) {
        if (v.hr_validity < threshold) {
            auto& count = out.report.per_participant[v.participant_id];
            (v.label == 1 ? count.positives : count.negatives) += 1;
        } else {
            out.dataset.vectors.push_back(v);
        }
    }
    return out;
}

void write_feature_csv(const FeatureDataset& dataset, std::ostream& out) {
    for (const auto& name : dataset.names) {
        out << name << ',';
    }
    out << "label,participant,behavior,clean\n";
    for (const auto& v : dataset.vectors) {
        for (const auto& name : dataset.names) {
            out << csv::fixed6(v.values.at(name)) << ',';
        }
        out << v.label << ',' << v.participant_id << ','
            << (v.behavior ? std::string(to_string(*v.behavior)) : std::string("none")) << ','
            << (v.clean ? 1 : 0) << '\n';
    }
}

} // namespace bfrb
