#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "catex/coupling.hpp"
#include "catex/dataset.hpp"
#include "catex/geochem.hpp"
#include "catex/surrogate.hpp"
#include "catex/transport.hpp"

namespace catex {

// Whole-experiment configuration: one JSON file with full defaulting. Every
// constant the experiments need but the underlying physics does not fix lives
// here, so a config file plus seeds reproduces any output exactly.
struct ExperimentConfig {
    // column chemistry: initial resident solution and injected solution
    AqueousSolution initial;  // Na 1.0, K 0.2, NO3 1.2 mmol/kgw
    AqueousSolution inflow;   // Ca 0.6, Cl 1.2 mmol/kgw
    ExchangeParams exchange;
    TransportConfig transport;
    CouplingConfig coupling;

    // named sampler and model presets addressed from the command line
    std::map<std::string, SamplerSpec> samplers;
    std::map<std::string, ModelSpec> models;

    // ablation sweep (dataset strategies x sizes) and benchmark knobs
    std::vector<std::size_t> ablate_sizes = {4000, 20000, 100000};
    std::vector<std::string> ablate_strategies = {"vanilla", "vanilla_zeros"};
    std::string ablate_model = "gbdt_reg";
    std::vector<std::size_t> bench_batch_sizes = {1, 10, 100, 1000, 10000};
    int bench_repeats = 100;

    std::uint64_t seed = 42;
    std::string out_dir = "out";

    // FNV-1a fingerprint of the effective (post-default) canonical JSON;
    // stamped into every artifact this config produces
    std::string digest;

    static ExperimentConfig defaults();
    // defaults overlaid with the fields present in the file; empty path means
    // pure defaults. Computes `digest`. Throws InvalidInput on bad files.
    static ExperimentConfig load(const std::string& path);

    std::string to_json_string(int indent = 2) const;
    void validate() const;
    void recompute_digest();
};

}  // namespace catex
