#pragma once

#include "bfrb/evaluation.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bfrb::cli {

/// Stable process exit codes.
enum ExitCode : int { kOk = 0, kDomainError = 1, kIoError = 2 };

/// Fully resolved run configuration. Built from a JSON file, then CLI
/// overrides, then the BFRB_SEED environment fallback for the seed.
struct RunConfig {
    std::filesystem::path dataset_root;
    std::optional<std::filesystem::path> adapter;
    ExperimentConfig experiment;
    std::vector<ModalitySubset> ablations;
    std::filesystem::path output_dir = "bfrb-out";
    bool plots = true;

    nlohmann::json to_json() const;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::string> dataset_root;
    std::optional<std::string> adapter;
    std::optional<std::string> window;
    std::optional<std::string> labels;
    std::optional<std::string> model;
    std::optional<std::string> cv;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::string> balance;
    std::optional<std::string> rmssd;
    std::optional<double> hrv_threshold;
    std::vector<std::string> ablations;
    bool clean_only = false;
    bool no_plots = false;
};

/// Parses the documented JSON schema; unknown keys raise InvalidConfig.
/// Relative paths resolve against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                           const Overrides& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides = {});

int cmd_validate(const std::filesystem::path& root, const std::optional<std::filesystem::path>& adapter,
                 std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Every label set x model x window x CV strategy cell (36 reports) plus one
/// summary table per strategy. `threads` = 0 uses the hardware concurrency.
int cmd_matrix(const RunConfig& config, std::ostream& out, std::ostream& err, unsigned threads = 0);
int cmd_stats(const std::filesystem::path& root, const std::optional<std::filesystem::path>& adapter,
              const std::filesystem::path& output_dir, std::ostream& out, std::ostream& err);
int cmd_featurize(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace bfrb::cli
