#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dslab/lattice.hpp"
#include "dslab/partition.hpp"

namespace dslab {

struct PropertyCheck {
    std::string check;
    double constant = 0.0;
    double threshold = 0.0;
    bool pass = false;
    bool informational = false;
    std::string detail;
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;
    int corpus = 0;
    std::uint64_t seed = 0;
    int l_max = 0;
    double tau = 0.0;

    bool all_pass() const;
    const PropertyCheck& find(const std::string& name) const;
    nlohmann::json to_json() const;
    std::string to_csv(bool header = true) const;
};

// Fields drawn for property sweeps: even entries broadband with a random decay,
// odd entries supported on one random degree.
std::vector<Field> lp_corpus(const LatticePtr& lattice, std::uint64_t seed, int size);

PropertyReport check_lp_properties(const LPPartition& part, std::uint64_t corpus_seed, int corpus_size,
                                   const LatticePtr& lattice, const ConformalBackground& bg, double tau);

// sup over the corpus and k ∈ [0, k_hi] of the refined Poincaré constant.
double poincare_sweep(const LPPartition& part, double delta, std::uint64_t corpus_seed, int corpus_size,
                      const LatticePtr& lattice, const ConformalBackground& bg, double tau, int k_hi);

}  // namespace dslab
