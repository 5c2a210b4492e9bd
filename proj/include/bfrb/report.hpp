#pragma once

#include "bfrb/evaluation.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace bfrb {

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const DescriptiveReport& report);

/// One row per fold; `subset` names the modality ablation.
void write_folds_csv(const std::vector<EvalReport>& reports, std::ostream& out);
/// `threshold,fpr,tpr`
void write_roc_csv(const std::vector<RocPoint>& points, std::ostream& out);

struct RocCurve {
    std::string label;
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// Standalone SVG with one polyline per curve. `metadata` is embedded verbatim
/// (XML-escaped) in a <metadata> element.
std::string render_roc_svg(const std::vector<RocCurve>& curves, const std::string& title,
                           const std::string& metadata);

void write_prevalence_csv(const DescriptiveReport& report, std::ostream& out);
void write_participant_csv(const DescriptiveReport& report, std::ostream& out);
void write_stage_csv(const DescriptiveReport& report, std::ostream& out);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace bfrb
