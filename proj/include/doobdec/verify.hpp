#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "doobdec/json_io.hpp"
#include "doobdec/measures.hpp"

namespace doobdec {

// One verified statement of the calculus. Checks whose hypotheses include the
// dominating-transition condition are asserted only when that condition holds
// on the instance; otherwise the conclusion is still evaluated and reported
// under status "hypothesis_fails" with conclusion_holds carrying the outcome.
enum class CheckStatus { pass, fail, hypothesis_fails };

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::pass;
    std::optional<bool> conclusion_holds;  // set for hypothesis_fails entries
    std::string details;
};

struct VerifyReport {
    std::uint64_t seed = 0;
    int trials = 0;
    bool condition_b = false;
    std::vector<CheckResult> checks;

    bool all_pass() const;  // no entry with status fail
};

// Runs every identity/inequality/theorem check against the given family,
// sampling payoffs, processes and mixtures from the seed. Deterministic:
// same instance, seed and trials give an identical report (and identical
// JSON serialization).
VerifyReport verify_lemmas(const MeasureFamily& family, std::uint64_t seed,
                           int trials, double tol = 1e-9);

json verify_report_to_json(const VerifyReport& report);
std::string check_status_name(CheckStatus s);

}  // namespace doobdec
