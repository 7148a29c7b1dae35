#pragma once
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace pmj {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0;
    double budget = 0;  // wall-time limit in seconds, part of the pass condition
    nlohmann::ordered_json data;
};

// ids empty runs all ten criteria; on_result fires after each criterion
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

nlohmann::ordered_json acceptance_json(const std::vector<CriterionResult>& rs);

}  // namespace pmj
