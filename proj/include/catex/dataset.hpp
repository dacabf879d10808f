#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "catex/geochem.hpp"
#include "catex/matrix.hpp"

namespace catex {

// Training-data generation: sample 6-entry feature vectors (aqueous na, k,
// ca; exchanger na_x, k_x, ca_x2), label them with the equilibrium solver.
// Deliberately independent of the coupled column simulation.
//
// Exchanger features are sampled as a direction and rescaled so their
// equivalents equal the exchange capacity exactly (the solver's feasibility
// constraint); their effective range is therefore [0, cec] whatever the draw
// range, which only shapes the distribution on the capacity simplex.

enum class SamplerKind : int { Vanilla, Ranged, VanillaZeros, RangedZeros, Covariance };

std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

struct SamplerSpec {
    SamplerKind kind = SamplerKind::Vanilla;
    std::size_t n = 100000;
    std::uint64_t seed = 42;

    // uniform bounds, all six features (Vanilla*, and Ranged fallback)
    double lo = 0.0;
    double hi = 0.0015;  // mol/kgw

    // per-feature bounds for Ranged*; empty means use the scalar lo/hi
    std::vector<double> feature_lo;
    std::vector<double> feature_hi;

    // *Zeros kinds: with this probability per instance, a random non-empty
    // subset of the three aqueous cation features is forced to 0
    double zero_prob = 0.3;

    // Covariance kind: 6-entry mean and 6x6 row-major covariance; draws are
    // truncated to the non-negative orthant by rejection
    std::vector<double> mean;
    std::vector<double> cov;
    int max_rejections = 1000;  // per row, then RejectionOverflow

    bool uses_zeros() const {
        return kind == SamplerKind::VanillaZeros || kind == SamplerKind::RangedZeros;
    }
    bool uses_ranges() const {
        return kind == SamplerKind::Ranged || kind == SamplerKind::RangedZeros;
    }
    void validate() const;  // throws InvalidSpec
};

struct Dataset {
    Matrix x;  // n x 6 features
    Matrix y;  // n x 3 equilibrated aqueous targets
    std::size_t n_failed = 0;  // sampled rows dropped on solver failure
    SamplerSpec sampler;       // provenance
    ExchangeParams params;
    std::string config_digest;  // optional caller-supplied fingerprint
};

// Draw n feature rows. Per-row random streams are derived from (seed, row),
// so the result is independent of evaluation order. cec is the capacity the
// exchanger features are rescaled to.
Matrix sample(const SamplerSpec& spec, double cec);

// Label features with equilibrate; failed rows are dropped and counted.
Dataset label(const Matrix& inputs, const ExchangeParams& params);

// sample + label with provenance filled in.
Dataset generate_dataset(const SamplerSpec& spec, const ExchangeParams& params);

// Seed-reproducible shuffle split into disjoint, exhaustive parts.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

// Column statistics over stacked 6-feature rows (for bootstrap-derived
// Ranged/Covariance specs).
struct FeatureStats {
    std::size_t n = 0;
    std::vector<double> min, max, mean;  // per column
    std::vector<double> cov;             // cols x cols, row-major, population
};

FeatureStats feature_stats(const Matrix& rows);
SamplerSpec ranged_spec_from_stats(SamplerSpec base, const FeatureStats& stats);
SamplerSpec covariance_spec_from_stats(SamplerSpec base, const FeatureStats& stats);

// Delimited text with header na_in,k_in,ca_in,nax,kx,cax2,na_out,k_out,ca_out
// and full round-trip precision, plus a JSON provenance sidecar at
// <csv_path>.provenance.json. Identical specs give byte-identical files.
void write_dataset(const Dataset& ds, const std::string& csv_path);
Dataset read_dataset(const std::string& csv_path);

// Canonical content fingerprint (equals the digest of the written CSV bytes).
std::string dataset_digest(const Dataset& ds);

}  // namespace catex
