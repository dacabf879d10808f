#include "catex/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "catex/digest.hpp"
#include "catex/errors.hpp"
#include "catex/rng.hpp"
#include "internal/json_convert.hpp"

namespace catex {

namespace {

constexpr std::size_t kFeatures = 6;
constexpr std::size_t kTargets = 3;
constexpr const char* kHeader = "na_in,k_in,ca_in,nax,kx,cax2,na_out,k_out,ca_out";

}  // namespace

std::string to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::Vanilla: return "vanilla";
        case SamplerKind::Ranged: return "ranged";
        case SamplerKind::VanillaZeros: return "vanilla_zeros";
        case SamplerKind::RangedZeros: return "ranged_zeros";
        case SamplerKind::Covariance: return "covariance";
    }
    return "unknown";
}

SamplerKind sampler_kind_from_string(const std::string& name) {
    if (name == "vanilla") return SamplerKind::Vanilla;
    if (name == "ranged") return SamplerKind::Ranged;
    if (name == "vanilla_zeros") return SamplerKind::VanillaZeros;
    if (name == "ranged_zeros") return SamplerKind::RangedZeros;
    if (name == "covariance") return SamplerKind::Covariance;
    throw InvalidSpec("unknown sampler kind: " + name);
}

void SamplerSpec::validate() const {
    if (!(std::isfinite(lo) && std::isfinite(hi)) || lo < 0.0 || hi < lo)
        throw InvalidSpec("SamplerSpec: need hi >= lo >= 0");
    if (uses_ranges() && !(feature_lo.empty() && feature_hi.empty())) {
        if (feature_lo.size() != kFeatures || feature_hi.size() != kFeatures)
            throw InvalidSpec("SamplerSpec: per-feature bounds need 6 entries each");
        for (std::size_t i = 0; i < kFeatures; ++i)
            if (!(std::isfinite(feature_lo[i]) && std::isfinite(feature_hi[i])) ||
                feature_lo[i] < 0.0 || feature_hi[i] < feature_lo[i])
                throw InvalidSpec("SamplerSpec: per-feature bounds need hi >= lo >= 0");
    }
    if (uses_zeros() && !(zero_prob >= 0.0 && zero_prob <= 1.0))
        throw InvalidSpec("SamplerSpec: zero_prob must lie in [0, 1]");
    if (kind == SamplerKind::Covariance) {
        if (mean.size() != kFeatures || cov.size() != kFeatures * kFeatures)
            throw InvalidSpec("SamplerSpec: covariance kind needs mean[6] and cov[36]");
        double scale = 0.0;
        for (std::size_t i = 0; i < kFeatures; ++i)
            scale = std::max(scale, std::abs(cov[i * kFeatures + i]));
        for (std::size_t i = 0; i < kFeatures; ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (std::abs(cov[i * kFeatures + j] - cov[j * kFeatures + i]) >
                    1e-12 * std::max(scale, 1e-300))
                    throw InvalidSpec("SamplerSpec: covariance must be symmetric");
        if (max_rejections < 1) throw InvalidSpec("SamplerSpec: max_rejections must be >= 1");
    }
}

namespace {

// PSD-tolerant lower Cholesky factor; semidefinite directions get zero
// columns, genuinely negative curvature is rejected.
std::vector<double> cholesky_psd(const std::vector<double>& cov) {
    const std::size_t d = kFeatures;
    double scale = 0.0;
    for (std::size_t i = 0; i < d; ++i) scale = std::max(scale, std::abs(cov[i * d + i]));
    const double tol = 1e-12 * std::max(scale, 1e-300);
    std::vector<double> l(d * d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double diag = cov[j * d + j];
        for (std::size_t k = 0; k < j; ++k) diag -= l[j * d + k] * l[j * d + k];
        if (diag < -tol) throw InvalidSpec("SamplerSpec: covariance is not positive semidefinite");
        l[j * d + j] = (diag > tol) ? std::sqrt(diag) : 0.0;
        for (std::size_t i = j + 1; i < d; ++i) {
            if (l[j * d + j] == 0.0) {
                l[i * d + j] = 0.0;
                continue;
            }
            double s = cov[i * d + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
            l[i * d + j] = s / l[j * d + j];
        }
    }
    return l;
}

}  // namespace

Matrix sample(const SamplerSpec& spec, double cec) {
    spec.validate();
    if (!(std::isfinite(cec)) || cec < 0.0) throw InvalidInput("sample: invalid cec");

    const bool ranged = spec.uses_ranges() && !spec.feature_lo.empty();
    std::vector<double> chol;
    if (spec.kind == SamplerKind::Covariance) chol = cholesky_psd(spec.cov);

    Matrix out(spec.n, kFeatures);
    std::vector<double> z(kFeatures);
    for (std::size_t row = 0; row < spec.n; ++row) {
        SplitMix64 rng = derived_stream(spec.seed, row);
        double* f = out.row(row);
        int attempts = 0;
        for (;;) {
            if (++attempts > spec.max_rejections)
                throw RejectionOverflow("sample: row " + std::to_string(row) +
                                        " exceeded max_rejections");
            bool ok = true;
            if (spec.kind == SamplerKind::Covariance) {
                for (std::size_t i = 0; i < kFeatures; ++i) z[i] = rng.next_gaussian();
                for (std::size_t i = 0; i < kFeatures; ++i) {
                    double v = spec.mean[i];
                    for (std::size_t k = 0; k <= i; ++k) v += chol[i * kFeatures + k] * z[k];
                    f[i] = v;
                    ok = ok && v >= 0.0;  // truncate to the physical orthant
                }
            } else if (ranged) {
                for (std::size_t i = 0; i < kFeatures; ++i)
                    f[i] = rng.uniform(spec.feature_lo[i], spec.feature_hi[i]);
            } else {
                for (std::size_t i = 0; i < kFeatures; ++i) f[i] = rng.uniform(spec.lo, spec.hi);
            }
            // an exchanger with zero equivalents cannot be rescaled to
            // capacity; redraw (measure-zero for uniform draws)
            ok = ok && (cec == 0.0 || f[3] + f[4] + 2.0 * f[5] > 0.0);
            if (ok) break;
        }
        if (spec.uses_zeros() && rng.next_double() < spec.zero_prob) {
            // non-empty subset of the three aqueous cations, uniformly
            auto mask = static_cast<unsigned>(1 + rng.uniform_index(7));
            for (std::size_t i = 0; i < kTargets; ++i)
                if (mask & (1u << i)) f[i] = 0.0;
        }
        if (cec > 0.0) {
            double equiv = f[3] + f[4] + 2.0 * f[5];
            double s = cec / equiv;
            f[3] *= s;
            f[4] *= s;
            f[5] *= s;
        }
    }
    return out;
}

Dataset label(const Matrix& inputs, const ExchangeParams& params) {
    if (inputs.cols != kFeatures) throw ShapeMismatch("label: inputs need 6 columns");
    Dataset ds;
    ds.params = params;
    ds.x = Matrix(inputs.rows, kFeatures);
    ds.y = Matrix(inputs.rows, kTargets);
    std::size_t kept = 0;
    for (std::size_t r = 0; r < inputs.rows; ++r) {
        const double* f = inputs.row(r);
        AqueousSolution aq;
        aq.na = f[0];
        aq.k = f[1];
        aq.ca = f[2];
        ExchangerState ex{f[3], f[4], f[5]};
        try {
            EquilibriumResult res = equilibrate(aq, ex, params);
            std::copy(f, f + kFeatures, ds.x.row(kept));
            ds.y.at(kept, 0) = res.solution.na;
            ds.y.at(kept, 1) = res.solution.k;
            ds.y.at(kept, 2) = res.solution.ca;
            ++kept;
        } catch (const NonConvergence&) {
            ++ds.n_failed;
        }
    }
    ds.x.rows = kept;
    ds.x.data.resize(kept * kFeatures);
    ds.y.rows = kept;
    ds.y.data.resize(kept * kTargets);
    return ds;
}

Dataset generate_dataset(const SamplerSpec& spec, const ExchangeParams& params) {
    Dataset ds = label(sample(spec, params.cec), params);
    ds.sampler = spec;
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed) {
    if (ds.x.rows == 0) throw InvalidInput("split: empty dataset");
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
        throw InvalidInput("split: train_fraction must lie in [0, 1]");
    std::vector<std::size_t> order(ds.x.rows);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(seed);
    shuffle_indices(order, rng);
    auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(ds.x.rows)));

    auto take = [&](std::size_t lo, std::size_t hi) {
        Dataset part;
        part.sampler = ds.sampler;
        part.params = ds.params;
        part.config_digest = ds.config_digest;
        part.x = Matrix(hi - lo, ds.x.cols);
        part.y = Matrix(hi - lo, ds.y.cols);
        for (std::size_t i = lo; i < hi; ++i) {
            std::size_t src = order[i];
            std::copy(ds.x.row(src), ds.x.row(src) + ds.x.cols, part.x.row(i - lo));
            std::copy(ds.y.row(src), ds.y.row(src) + ds.y.cols, part.y.row(i - lo));
        }
        return part;
    };
    return {take(0, n_train), take(n_train, ds.x.rows)};
}

FeatureStats feature_stats(const Matrix& rows) {
    if (rows.rows == 0 || rows.cols == 0) throw InvalidInput("feature_stats: empty input");
    FeatureStats st;
    st.n = rows.rows;
    const std::size_t d = rows.cols;
    st.min.assign(d, 0.0);
    st.max.assign(d, 0.0);
    st.mean.assign(d, 0.0);
    st.cov.assign(d * d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double lo = rows.at(0, c), hi = rows.at(0, c), sum = 0.0;
        for (std::size_t r = 0; r < rows.rows; ++r) {
            double v = rows.at(r, c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        st.min[c] = lo;
        st.max[c] = hi;
        st.mean[c] = sum / static_cast<double>(rows.rows);
    }
    for (std::size_t r = 0; r < rows.rows; ++r)
        for (std::size_t i = 0; i < d; ++i) {
            double di = rows.at(r, i) - st.mean[i];
            for (std::size_t j = i; j < d; ++j)
                st.cov[i * d + j] += di * (rows.at(r, j) - st.mean[j]);
        }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            if (j < i)
                st.cov[i * d + j] = st.cov[j * d + i];
            else
                st.cov[i * d + j] /= static_cast<double>(rows.rows);
        }
    return st;
}

SamplerSpec ranged_spec_from_stats(SamplerSpec base, const FeatureStats& stats) {
    if (stats.max.size() != kFeatures)
        throw InvalidInput("ranged_spec_from_stats: stats must cover 6 features");
    base.feature_lo.assign(kFeatures, 0.0);
    base.feature_hi = stats.max;
    return base;
}

SamplerSpec covariance_spec_from_stats(SamplerSpec base, const FeatureStats& stats) {
    if (stats.mean.size() != kFeatures)
        throw InvalidInput("covariance_spec_from_stats: stats must cover 6 features");
    base.kind = SamplerKind::Covariance;
    base.mean = stats.mean;
    base.cov = stats.cov;
    return base;
}

namespace {

std::string render_csv(const Dataset& ds) {
    std::string out = kHeader;
    out += "\n";
    char buf[32];
    for (std::size_t r = 0; r < ds.x.rows; ++r) {
        for (std::size_t c = 0; c < kFeatures; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.x.at(r, c));
            out += buf;
            out += ',';
        }
        for (std::size_t c = 0; c < kTargets; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.y.at(r, c));
            out += buf;
            out += (c + 1 == kTargets) ? '\n' : ',';
        }
    }
    return out;
}

}  // namespace

std::string dataset_digest(const Dataset& ds) { return fnv1a64_hex(render_csv(ds)); }

void write_dataset(const Dataset& ds, const std::string& csv_path) {
    std::string csv = render_csv(ds);
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw InvalidInput("write_dataset: cannot open " + csv_path);
        out << csv;
        if (!out) throw InvalidInput("write_dataset: write failed for " + csv_path);
    }
    nlohmann::json meta{{"format", "catex-dataset"},
                        {"version", 1},
                        {"sampler", sampler_spec_to_json(ds.sampler)},
                        {"exchange_params", exchange_params_to_json(ds.params)},
                        {"n_rows", ds.x.rows},
                        {"n_failed", ds.n_failed},
                        {"csv_digest", fnv1a64_hex(csv)}};
    if (!ds.config_digest.empty()) meta["config_digest"] = ds.config_digest;
    std::ofstream side(csv_path + ".provenance.json", std::ios::binary);
    if (!side) throw InvalidInput("write_dataset: cannot open provenance sidecar");
    side << meta.dump(2) << "\n";
}

Dataset read_dataset(const std::string& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw InvalidInput("read_dataset: cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("read_dataset: empty file");
    if (line != kHeader) throw InvalidInput("read_dataset: unexpected header");
    std::vector<double> xs, ys;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, kFeatures + kTargets> v{};
        const char* p = line.c_str();
        char* end = nullptr;
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = std::strtod(p, &end);
            if (end == p) throw InvalidInput("read_dataset: bad number in row");
            p = end;
            if (*p == ',') ++p;
        }
        for (std::size_t i = 0; i < kFeatures; ++i) xs.push_back(v[i]);
        for (std::size_t i = 0; i < kTargets; ++i) ys.push_back(v[kFeatures + i]);
        ++n;
    }
    Dataset ds;
    ds.x = Matrix(n, kFeatures);
    ds.x.data = std::move(xs);
    ds.y = Matrix(n, kTargets);
    ds.y.data = std::move(ys);

    std::ifstream side(csv_path + ".provenance.json", std::ios::binary);
    if (side) {
        try {
            nlohmann::json meta = nlohmann::json::parse(side);
            ds.sampler = sampler_spec_from_json(meta.at("sampler"));
            ds.params = exchange_params_from_json(meta.at("exchange_params"));
            ds.n_failed = meta.value("n_failed", std::size_t{0});
            ds.config_digest = meta.value("config_digest", "");
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(std::string("read_dataset: bad provenance sidecar: ") +
                               e.what());
        }
    }
    return ds;
}

}  // namespace catex
