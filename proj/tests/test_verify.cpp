#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>

#include "doobdec/verify.hpp"
#include "support/testutil.hpp"

using namespace doobdec;

namespace {

const CheckResult& find_check(const VerifyReport& rep, const std::string& name) {
    for (const auto& c : rep.checks)
        if (c.name == name) return c;
    REQUIRE(false);
    static CheckResult dummy;
    return dummy;
}

const std::set<std::string> kGated = {
    "conditional_density_ratio_bound",
    "normalized_density_bound",
    "max_tower",
    "max_swap",
    "sup_one_step_supermartingale",
    "sup_mixture_supermartingale",
    "sup_martingale_equal_expectations",
    "sup_process_local_regularity",
    "candidate_martingale_measure_independence",
    "product_generator_decomposition",
    "class_k_representation",
};

}  // namespace

TEST_CASE("every check passes when the dominating-transition condition holds") {
    testutil::D1 d;
    auto fam = testutil::level1_family(d.tree);
    auto rep = verify_lemmas(fam, 7, 20);
    CHECK(rep.condition_b);
    CHECK(rep.checks.size() == 20);
    CHECK(rep.all_pass());
    for (const auto& c : rep.checks) {
        INFO(c.name, ": ", c.details);
        CHECK(c.status == CheckStatus::pass);
        CHECK(!c.conclusion_holds.has_value());
    }
}

TEST_CASE("identical measures trivially satisfy everything") {
    testutil::D1 d;
    auto fam = MeasureFamily::create(
        d.tree, {{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}});
    auto rep = verify_lemmas(fam, 11, 10);
    CHECK(rep.condition_b);
    CHECK(rep.all_pass());
}

TEST_CASE("gated checks are evaluated, not asserted, when the condition fails") {
    testutil::D1 d;
    auto rep = verify_lemmas(d.family, 7, 20);
    CHECK(!rep.condition_b);
    CHECK(rep.checks.size() == 20);
    // an entry with status fail would mean an unconditional statement broke
    CHECK(rep.all_pass());
    for (const auto& c : rep.checks) {
        INFO(c.name, ": ", c.details);
        if (kGated.count(c.name)) {
            CHECK(c.status == CheckStatus::hypothesis_fails);
            CHECK(c.conclusion_holds.has_value());
        } else {
            CHECK(c.status == CheckStatus::pass);
        }
    }
    // these conclusions genuinely break on this family
    CHECK(find_check(rep, "conditional_density_ratio_bound").conclusion_holds == false);
    CHECK(find_check(rep, "normalized_density_bound").conclusion_holds == false);
    CHECK(find_check(rep, "candidate_martingale_measure_independence").conclusion_holds ==
          false);
    // while the purely unconditional machinery still passes
    CHECK(find_check(rep, "ratio_identity").status == CheckStatus::pass);
    CHECK(find_check(rep, "uniform_deficit_bound").status == CheckStatus::pass);
    CHECK(find_check(rep, "cone_solution_family").status == CheckStatus::pass);
}

TEST_CASE("single-measure families reduce to the classical statements") {
    auto tree = std::make_shared<const FiltrationTree>(FiltrationTree::build({2, 3}));
    auto fam = MeasureFamily::create(
        tree, {{0.1, 0.2, 0.2, 0.15, 0.15, 0.2}});
    auto rep = verify_lemmas(fam, 3, 10);
    CHECK(rep.condition_b);  // one candidate, nothing to dominate
    CHECK(rep.all_pass());
}

TEST_CASE("reports are deterministic for a fixed seed") {
    testutil::D1 d;
    auto rep1 = verify_lemmas(d.family, 42, 15);
    auto rep2 = verify_lemmas(d.family, 42, 15);
    const std::string j1 = verify_report_to_json(rep1).dump(2);
    const std::string j2 = verify_report_to_json(rep2).dump(2);
    CHECK(j1 == j2);

    auto rep3 = verify_lemmas(d.family, 43, 15);
    CHECK(verify_report_to_json(rep3).dump(2) != j1);  // details carry sampled maxima
}

TEST_CASE("json layout carries the verdicts") {
    testutil::D1 d;
    auto fam = testutil::level1_family(d.tree);
    auto j = verify_report_to_json(verify_lemmas(fam, 1, 5));
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("condition_b") == true);
    CHECK(j.at("all_pass") == true);
    CHECK(j.at("checks").size() == 20);
    CHECK(j.at("checks").at(0).at("name") == "ratio_identity");
    CHECK(j.at("checks").at(0).at("status") == "pass");
    CHECK(j.at("checks").at(0).at("conclusion_holds").is_null());
}
