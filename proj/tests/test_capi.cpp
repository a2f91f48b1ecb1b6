#include <cstring>
#include <string>

#include <gtest/gtest.h>

#include "dslab/dslab.h"

namespace {

const char* kConfig =
    "[scenario]\nname = capi\ntargets = gronwall\n[verify]\ngronwall_instances = 8\ngronwall_points = 32\n";

}  // namespace

TEST(CApi, NullArguments) {
    EXPECT_EQ(dsl_scenario_parse(nullptr, nullptr), DSL_ERR_NULL);
    EXPECT_STRNE(dsl_last_error(), "");
    EXPECT_EQ(dsl_scenario_hash(nullptr, nullptr), DSL_ERR_NULL);
    EXPECT_EQ(dsl_scenario_run(nullptr, nullptr), DSL_ERR_NULL);
    EXPECT_EQ(dsl_report_verdict_count(nullptr), 0u);
    dsl_scenario_free(nullptr);
    dsl_report_free(nullptr);
}

TEST(CApi, ParseErrorCarriesLine) {
    dsl_scenario* s = nullptr;
    EXPECT_EQ(dsl_scenario_parse("[scenario]\ntargets = gronwall\nbad = 1\n", &s), DSL_ERR_PARSE);
    EXPECT_EQ(s, nullptr);
    EXPECT_NE(std::string(dsl_last_error()).find("line 3"), std::string::npos);
    EXPECT_STREQ(dsl_status_name(DSL_ERR_PARSE), "parse error");
}

TEST(CApi, RunGronwallScenario) {
    dsl_scenario* s = nullptr;
    ASSERT_EQ(dsl_scenario_parse(kConfig, &s), DSL_OK);
    EXPECT_STREQ(dsl_last_error(), "");
    std::uint64_t h1 = 0, h2 = 0;
    ASSERT_EQ(dsl_scenario_hash(s, &h1), DSL_OK);
    ASSERT_EQ(dsl_scenario_set_seed(s, 12), DSL_OK);
    ASSERT_EQ(dsl_scenario_hash(s, &h2), DSL_OK);
    EXPECT_NE(h1, h2);
    EXPECT_STREQ(dsl_scenario_out_dir(s), "");

    dsl_report* r = nullptr;
    ASSERT_EQ(dsl_scenario_run(s, &r), DSL_OK);
    int pass = 0;
    ASSERT_EQ(dsl_report_all_pass(r, &pass), DSL_OK);
    EXPECT_EQ(pass, 1);
    ASSERT_EQ(dsl_report_verdict_count(r), 3u);
    dsl_verdict_info info{};
    ASSERT_EQ(dsl_report_verdict(r, 0, &info), DSL_OK);
    EXPECT_STREQ(info.name, "gronwall");
    EXPECT_EQ(info.pass, 1);
    EXPECT_EQ(dsl_report_verdict(r, 3, &info), DSL_ERR_RANGE);
    EXPECT_NE(std::string(dsl_report_json(r)).find("\"all_pass\": true"), std::string::npos);
    EXPECT_NE(std::string(dsl_report_summary(r)).find("PASS"), std::string::npos);
    dsl_report_free(r);
    dsl_scenario_free(s);
}

TEST(CApi, TargetsAndRefine) {
    dsl_scenario* s = nullptr;
    ASSERT_EQ(dsl_scenario_default(&s), DSL_OK);
    EXPECT_EQ(dsl_scenario_set_targets(s, "gronwall,nope"), DSL_ERR_DOMAIN);
    EXPECT_EQ(dsl_scenario_set_targets(s, "gronwall"), DSL_OK);
    EXPECT_EQ(dsl_scenario_set_grid_refine(s, 0), DSL_ERR_DOMAIN);
    EXPECT_EQ(dsl_scenario_set_grid_refine(s, 2), DSL_OK);
    dsl_scenario_free(s);
    ASSERT_EQ(dsl_target_count(), 8u);
    EXPECT_STREQ(dsl_target_name(0), "lp-props");
    EXPECT_EQ(dsl_target_name(8), nullptr);
}

TEST(CApi, StandaloneChecks) {
    const double b[3] = {1, 1, 1}, c[3] = {1, 1, 0};
    double out[3];
    ASSERT_EQ(dsl_discrete_gronwall(b, c, 3, out), DSL_OK);
    EXPECT_EQ(out[2], 4.0);
    const double neg[3] = {1, -1, 1};
    EXPECT_EQ(dsl_discrete_gronwall(neg, c, 3, out), DSL_ERR_DOMAIN);

    double ej = 0, ey = 0;
    ASSERT_EQ(dsl_bessel_check(10.0, 1e-4, &ej, &ey), DSL_OK);
    EXPECT_LE(ej, 1e-8);
    EXPECT_LE(ey, 1e-8);

    int violations = -1;
    double worst = 0;
    ASSERT_EQ(dsl_gronwall_verify(3, 8, 10, 32, 1.0, &violations, &worst), DSL_OK);
    EXPECT_EQ(violations, 0);
    EXPECT_EQ(dsl_gronwall_verify(3, 0, 10, 32, 1.0, &violations, &worst), DSL_ERR_DOMAIN);
}

TEST(CApi, Version) { EXPECT_GT(std::strlen(dsl_version()), 0u); }
