#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dslab/lattice.hpp"
#include "dslab/partition.hpp"
#include "dslab/system.hpp"
#include "dslab/verdict.hpp"

namespace dslab {

// Targets in canonical execution order.
const std::vector<std::string>& known_targets();
bool is_known_target(const std::string& name);

struct VerifySettings {
    std::vector<int> resolutions{32, 64, 128};
    int draws = 50;
    int corpus = 500;
    double lp_tau = 0.5;
    std::vector<double> poincare_deltas{0.1, 1.0, 10.0};
    int poincare_k_hi = 16;
    int shell_lo = 4;
    int shell_hi = 12;
    double tau_min = 1e-4;
    int per_decade = 8;
    int linear_points = 96;
    double coupling_scale = 0.1;
    bool forcing = true;
    double epsilon = 1e-3;
    int blowup_draws = 20;
    double blowup_decay = 16.0;
    int blowup_M = 0;
    int gronwall_instances = 200;
    int gronwall_k_max = 12;
    int gronwall_points = 256;
    int gronwall_x = 4;
    int roundtrip_l_max = 16;
};

struct Tolerances {
    double shell_slope = 0.025;
    double blowup_drift = 0.1;
    double resolution_drift = 2.0;
    double roundtrip_decoupled = 1e-6;
    double roundtrip_coupled = 1e-4;
    double split = 1e-9;
    double epsilon_ratio = 3.0;
    double gronwall = 1e-10;
    double discrete_gronwall = 1e-12;
};

struct Scenario {
    std::string name = "scenario";
    int n = 2;
    int l_max = 32;
    ConformalBackground background = desitter_background();
    LPPartition partition = make_partition(-6, 16, 3);
    SystemConfig system;
    std::vector<std::string> targets;
    std::uint64_t seed = 1;
    std::string out_dir;
    int grid_refine = 1;
    VerifySettings verify;
    Tolerances tolerances;

    // FNV-1a 64 of the canonical serialization (sections and keys sorted).
    std::uint64_t hash() const;
    std::string canonical() const;
    nlohmann::json to_json() const;
};

Scenario parse_config(const std::string& text);
Scenario load_config(const std::string& path);
// Built-in scenario covering every target at acceptance settings.
Scenario default_scenario();

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

struct RunReport {
    std::string scenario;
    std::string config_hash;
    std::vector<std::string> targets;
    std::vector<Verdict> verdicts;
    std::map<std::string, std::string> series;  // file name -> CSV text

    bool all_pass() const;
    nlohmann::json to_json() const;
    std::string verdicts_json() const;
    std::string summary() const;
    // Writes summary.txt, verdicts.json and series/*.csv under dir.
    void write(const std::string& dir) const;
};

// Errors from a target are rethrown prefixed with the target name.
RunReport run_scenario(const Scenario& scn);

}  // namespace dslab
