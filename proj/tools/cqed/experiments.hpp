#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace cqed::cli {

struct RunResult {
    nlohmann::json summary;
    std::vector<std::string> outputs;  ///< file names relative to the output directory
    bool checks_passed = true;         ///< table-check only
};

/// Executes the experiment and writes its artifacts into `out_dir`.
RunResult run_experiment(const ExperimentConfig& c, const std::string& out_dir);

}  // namespace cqed::cli
