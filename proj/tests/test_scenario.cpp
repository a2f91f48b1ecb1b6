#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dslab/errors.hpp"
#include "dslab/scenario.hpp"

using namespace dslab;

namespace {

const char* kMinimal = R"(# small gronwall run
[scenario]
name = tiny
targets = gronwall

[system]
I = 1
sigma = 2
coupling = 0:1:kappa:0.1

[verify]
gronwall_instances = 8
gronwall_points = 48
)";

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST(Config, ParsesMinimalScenario) {
    const auto scn = parse_config(kMinimal);
    EXPECT_EQ(scn.name, "tiny");
    EXPECT_EQ(scn.targets, std::vector<std::string>{"gronwall"});
    EXPECT_EQ(scn.system.sigma, 2);
    ASSERT_EQ(scn.system.couplings.size(), 1u);
    EXPECT_EQ(scn.system.couplings[0].psi, Psi::Kappa);
    EXPECT_EQ(scn.verify.gronwall_instances, 8);
}

TEST(Config, ReportsLineNumbers) {
    EXPECT_EQ(error_line("[scenario]\ntargets = gronwall\n[bogus]\n"), 3);
    EXPECT_EQ(error_line("[scenario]\ntargets = gronwall\nflavour = x\n"), 3);
    EXPECT_EQ(error_line("[scenario]\ntargets = gronwall\ntargets = poincare\n"), 3);
    EXPECT_EQ(error_line("[scenario]\ntargets = gronwall\n[scenario]\n"), 3);
    EXPECT_EQ(error_line("[scenario]\ntargets = nope\n"), 2);
    EXPECT_EQ(error_line("[scenario]\ntargets = gronwall\n[lattice]\nn = two\n"), 4);
}

TEST(Config, SigmaTwoRejectsSingularColumnWithLine) {
    const std::string bad = "[scenario]\ntargets = gronwall\n[system]\nsigma = 2\ncoupling = 1:0:one:0.1\n";
    EXPECT_EQ(error_line(bad), 5);
    const std::string ok = "[scenario]\ntargets = gronwall\n[system]\nsigma = 1\ncoupling = 1:0:one:0.1\n";
    EXPECT_NO_THROW(parse_config(ok));
}

TEST(Config, RequiresTargets) { EXPECT_THROW(parse_config("[scenario]\nname = x\n"), ParseError); }

TEST(Config, HashIgnoresOrderingAndComments) {
    const std::string a =
        "[scenario]\ntargets = gronwall, poincare\n[system]\ncoupling = 0:1:one:0.1\ncoupling = 1:1:kappa:0.05\n";
    const std::string b =
        "# comment\n[system]\ncoupling = 1:1:kappa:0.05\ncoupling = 0:1:one:0.1\n[scenario]\ntargets = poincare,gronwall\n";
    EXPECT_EQ(parse_config(a).hash(), parse_config(b).hash());
    const std::string c = "[scenario]\ntargets = gronwall, poincare\n[system]\ncoupling = 0:1:one:0.2\n";
    EXPECT_NE(parse_config(a).hash(), parse_config(c).hash());
}

TEST(Config, Fnv1aReferenceValues) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Config, LoadMissingFile) { EXPECT_THROW(load_config("/nonexistent/dslab.ini"), ParseError); }

TEST(Run, GronwallRunIsDeterministic) {
    const auto scn = parse_config(kMinimal);
    const auto a = run_scenario(scn);
    const auto b = run_scenario(scn);
    EXPECT_TRUE(a.all_pass());
    EXPECT_EQ(a.verdicts_json(), b.verdicts_json());
    ASSERT_EQ(a.verdicts.size(), 3u);
    EXPECT_EQ(a.verdicts[0].name, "gronwall");
    EXPECT_EQ(a.verdicts[1].name, "gronwall-b10");
    EXPECT_EQ(a.verdicts[2].name, "discrete-gronwall");

    const auto dir = std::filesystem::temp_directory_path() / "dslab_scenario_test";
    std::filesystem::remove_all(dir);
    a.write(dir.string());
    EXPECT_EQ(read_file(dir / "verdicts.json"), a.verdicts_json());
    EXPECT_TRUE(std::filesystem::exists(dir / "summary.txt"));
    EXPECT_TRUE(std::filesystem::exists(dir / "series" / "gronwall_preset.csv"));
    std::filesystem::remove_all(dir);
}

TEST(Run, SeedChangesOutput) {
    auto scn = parse_config(kMinimal);
    const auto a = run_scenario(scn);
    scn.seed = 99;
    const auto b = run_scenario(scn);
    EXPECT_NE(a.verdicts_json(), b.verdicts_json());
}

TEST(Run, TargetErrorsArePrefixed) {
    auto scn = parse_config(kMinimal);
    scn.verify.gronwall_instances = 0;
    try {
        run_scenario(scn);
        FAIL() << "expected an error";
    } catch (const DomainError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("gronwall: ", 0), 0u) << e.what();
    }
}

TEST(Run, DefaultScenarioListsAllTargets) {
    const auto scn = default_scenario();
    EXPECT_EQ(scn.targets, known_targets());
    EXPECT_EQ(known_targets().size(), 8u);
}

TEST(Run, ToyShellsConfigReportsHalfPowerSlope) {
    const auto scn = parse_config(
        "[scenario]\ntargets = toy-shells\n[lattice]\nn = 2\nl_max = 32\n[background]\nkind = desitter\n");
    EXPECT_EQ(scn.n, 2);
    EXPECT_EQ(scn.l_max, 32);
    const auto rep = run_scenario(scn);
    EXPECT_TRUE(rep.all_pass());
    const auto& csv = rep.series.at("toy_shells.csv");
    EXPECT_NE(csv.find("# slope_J,-0.49"), std::string::npos) << csv;
}

TEST(Run, LpPropsOnDefaultPartitionPasses) {
    const auto scn = parse_config("[scenario]\ntargets = lp-props\n[verify]\ncorpus = 40\n");
    const auto rep = run_scenario(scn);
    ASSERT_EQ(rep.verdicts.size(), 1u);
    EXPECT_TRUE(rep.verdicts[0].pass) << rep.verdicts_json();
}
