// Acceptance gate: one pass/fail line per shipped guarantee, exercising the
// library end to end (chemistry agreement, column chromatography, surrogate
// accuracy, correction ablations, data-strategy ablation, call accounting,
// charge exactness, and numerical plumbing). Exits nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "catex/config.hpp"
#include "catex/coupling.hpp"
#include "catex/dataset.hpp"
#include "catex/errors.hpp"
#include "catex/geochem.hpp"
#include "catex/matrix.hpp"
#include "catex/metrics.hpp"
#include "catex/surrogate.hpp"
#include "catex/surrogate/mlp.hpp"
#include "catex/surrogate/scaler.hpp"
#include "catex/transport.hpp"

namespace {

using namespace catex;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("criterion %2d (%s): %s — %s\n", criterion, name.c_str(),
                pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

void report_error(int criterion, const std::string& name, const std::exception& e) {
    ++g_failures;
    std::printf("criterion %2d (%s): FAIL — unexpected error: %s\n", criterion,
                name.c_str(), e.what());
    std::fflush(stdout);
}

// Shared artifacts, built once and reused across criteria so the gate stays
// fast while every criterion still sees the same defaults a user would.
struct SharedContext {
    ExperimentConfig cfg = ExperimentConfig::defaults();

    std::optional<RolloutResult> reference;
    double reference_seconds = 0.0;

    std::optional<Dataset> vanilla100k;
    std::optional<std::pair<Dataset, Dataset>> vanilla_split;
    std::optional<TrainedModel> gbdt_vanilla;

    std::optional<Dataset> cov100k;
    std::optional<TrainedModel> gbdt_cov;

    std::optional<RolloutResult> full_corrections_run;  // mod1+2+3 from the ablation
    std::optional<RolloutResult> counting_run;          // periodic-oracle accounting run

    CouplingConfig reference_coupling() const {
        CouplingConfig c;
        c.backend = ChemistryBackend::Oracle;
        c.skip_equilibrium = false;
        c.oracle_period = 0;
        c.charge_rescale = false;
        c.record_snapshots = true;
        return c;
    }

    RolloutResult run_column(const CouplingConfig& ccfg, const TransportConfig& tcfg,
                             const TrainedModel* model) const {
        ColumnState col = initial_column(tcfg.n_cells, cfg.initial, cfg.exchange);
        return run_rollout(tcfg, ccfg, cfg.exchange, cfg.inflow, std::move(col), model);
    }

    const RolloutResult& get_reference() {
        if (!reference) {
            const auto t0 = Clock::now();
            reference = run_column(reference_coupling(), cfg.transport, nullptr);
            reference_seconds = seconds_since(t0);
        }
        return *reference;
    }

    const std::pair<Dataset, Dataset>& get_vanilla_split() {
        if (!vanilla_split) {
            SamplerSpec spec = cfg.samplers.at("vanilla");
            vanilla100k = generate_dataset(spec, cfg.exchange);
            vanilla_split = split(*vanilla100k, 0.8, cfg.seed);
        }
        return *vanilla_split;
    }

    const TrainedModel& get_gbdt_vanilla() {
        if (!gbdt_vanilla) {
            const auto& parts = get_vanilla_split();
            gbdt_vanilla = TrainedModel::fit(cfg.models.at("gbdt"), parts.first.x,
                                             parts.first.y);
        }
        return *gbdt_vanilla;
    }

    // Feature statistics over every recorded reference snapshot, stacked tall.
    FeatureStats reference_stats() {
        const RolloutResult& ref = get_reference();
        std::size_t rows = 0;
        for (const auto& s : ref.snapshots) rows += s.rows;
        Matrix all(rows, 6);
        std::size_t r = 0;
        for (const auto& s : ref.snapshots)
            for (std::size_t i = 0; i < s.rows; ++i, ++r)
                for (std::size_t c = 0; c < 6; ++c) all.at(r, c) = s.at(i, c);
        return feature_stats(all);
    }

    const TrainedModel& get_gbdt_cov() {
        if (!gbdt_cov) {
            SamplerSpec spec =
                covariance_spec_from_stats(cfg.samplers.at("covariance"), reference_stats());
            spec.validate();
            cov100k = generate_dataset(spec, cfg.exchange);
            auto parts = split(*cov100k, 0.8, cfg.seed);
            gbdt_cov = TrainedModel::fit(cfg.models.at("gbdt"), parts.first.x, parts.first.y);
        }
        return *gbdt_cov;
    }
};

SharedContext ctx;

// --- criterion 1: the two equilibrium solvers agree --------------------------

void criterion_1() {
    const char* name = "solver cross-check";
    try {
        const auto t0 = Clock::now();
        SamplerSpec spec = ctx.cfg.samplers.at("vanilla_zeros");
        spec.n = 1000;
        spec.seed = 20240817;
        const Matrix inputs = sample(spec, ctx.cfg.exchange.cec);

        double max_diff = 0.0, max_cons = 0.0, max_fix = 0.0;
        std::size_t infeasible = 0;
        for (std::size_t i = 0; i < inputs.rows; ++i) {
            AqueousSolution tot;
            tot.na = inputs.at(i, 0);
            tot.k = inputs.at(i, 1);
            tot.ca = inputs.at(i, 2);
            ExchangerState ex{inputs.at(i, 3), inputs.at(i, 4), inputs.at(i, 5)};
            tot.cl = tot.cation_charge() + ex.equivalents();  // charge-balanced feed
            EquilibriumResult a, b;
            try {
                a = equilibrate(tot, ex, ctx.cfg.exchange);
                b = equilibrate_bruteforce(tot, ex, ctx.cfg.exchange);
            } catch (const NonConvergence&) {
                ++infeasible;  // sampler rows are feasible by construction; count anyway
                continue;
            }
            max_diff = std::max({max_diff, std::fabs(a.solution.na - b.solution.na),
                                 std::fabs(a.solution.k - b.solution.k),
                                 std::fabs(a.solution.ca - b.solution.ca),
                                 std::fabs(a.exchanger.na_x - b.exchanger.na_x),
                                 std::fabs(a.exchanger.k_x - b.exchanger.k_x),
                                 std::fabs(a.exchanger.ca_x2 - b.exchanger.ca_x2)});
            const double in_na = tot.na + ex.na_x;
            const double in_k = tot.k + ex.k_x;
            const double in_ca = tot.ca + ex.ca_x2;
            max_cons = std::max(
                {max_cons,
                 std::fabs(a.solution.na + a.exchanger.na_x - in_na) / std::max(in_na, 1e-300),
                 std::fabs(a.solution.k + a.exchanger.k_x - in_k) / std::max(in_k, 1e-300),
                 std::fabs(a.solution.ca + a.exchanger.ca_x2 - in_ca) / std::max(in_ca, 1e-300)});
            const EquilibriumResult again =
                equilibrate(a.solution, a.exchanger, ctx.cfg.exchange);
            max_fix = std::max({max_fix, std::fabs(again.solution.na - a.solution.na),
                                std::fabs(again.solution.k - a.solution.k),
                                std::fabs(again.solution.ca - a.solution.ca),
                                std::fabs(again.exchanger.na_x - a.exchanger.na_x),
                                std::fabs(again.exchanger.k_x - a.exchanger.k_x),
                                std::fabs(again.exchanger.ca_x2 - a.exchanger.ca_x2)});
        }
        const double secs = seconds_since(t0);
        const bool pass = infeasible == 0 && max_diff <= 1e-8 && max_cons <= 1e-12 &&
                          max_fix <= 1e-10 && secs < 30.0;
        report(1, name, pass,
               "1000 inputs: max solver diff " + num(max_diff) + " (<=1e-8), conservation " +
                   num(max_cons) + " (<=1e-12 rel), re-equilibration drift " + num(max_fix) +
                   " (<=1e-10), " + num(secs) + " s (<30)");
    } catch (const std::exception& e) {
        report_error(1, name, e);
    }
}

// --- criterion 2: chromatography pattern of the reference column -------------

void criterion_2() {
    const char* name = "column chromatography";
    try {
        const RolloutResult& ref = ctx.get_reference();
        const double breakthrough = 0.01e-3;  // Ca considered arrived above this
        double min_na = 1e300, max_k = 0.0;
        bool ca_arrives = false;
        for (std::size_t i = 1; i < ref.outflow.size(); ++i) {  // entry 0: initial state
            const AqueousSolution& out = ref.outflow[i];
            if (out.ca >= breakthrough) {
                ca_arrives = true;
                break;
            }
            min_na = std::min(min_na, out.na);
            max_k = std::max(max_k, out.k);
        }
        const double final_ca = ref.outflow.back().ca;
        const bool na_ok = min_na < 0.01 * ctx.cfg.initial.na;
        const bool k_ok = std::fabs(max_k - 1.2e-3) <= 0.02 * 1.2e-3;
        const bool ca_ok = std::fabs(final_ca - 0.6e-3) <= 0.01 * 0.6e-3;
        const bool time_ok = ctx.reference_seconds < 120.0;
        report(2, name, na_ok && k_ok && ca_ok && ca_arrives && time_ok,
               "pre-breakthrough Na min " + num(min_na) + " (<1% of " +
                   num(ctx.cfg.initial.na) + "), K plateau max " + num(max_k) +
                   " (1.2e-3 ±2%), final Ca " + num(final_ca) + " (0.6e-3 ±1%), " +
                   num(ctx.reference_seconds) + " s (<120)");
    } catch (const std::exception& e) {
        report_error(2, name, e);
    }
}

// --- criterion 3: boosted-tree accuracy on uniform data ----------------------

void criterion_3() {
    const char* name = "held-out accuracy";
    try {
        const auto t0 = Clock::now();
        const auto& parts = ctx.get_vanilla_split();
        const TrainedModel& model = ctx.get_gbdt_vanilla();
        const ErrorReport rep = error_report(parts.second.y, model.predict(parts.second.x));
        const double secs = seconds_since(t0);
        report(3, name, rep.r2 >= 0.99 && secs < 600.0,
               "100k uniform 80/20, pooled held-out R^2 " + num(rep.r2) + " (>=0.99), " +
                   num(secs) + " s (<600)");
    } catch (const std::exception& e) {
        report_error(3, name, e);
    }
}

// --- criterion 4: residual connection never hurts ----------------------------

void criterion_4() {
    const char* name = "residual connection";
    try {
        const auto& parts = ctx.get_vanilla_split();
        auto holdout_rmse = [&](const TrainedModel& m) {
            return error_report(parts.second.y, m.predict(parts.second.x)).rmse;
        };
        const double gbdt_res = holdout_rmse(ctx.get_gbdt_vanilla());
        const double gbdt_plain = holdout_rmse(TrainedModel::fit(
            ctx.cfg.models.at("gbdt_nores"), parts.first.x, parts.first.y));
        const double mlp_res = holdout_rmse(
            TrainedModel::fit(ctx.cfg.models.at("mlp"), parts.first.x, parts.first.y));
        const double mlp_plain = holdout_rmse(TrainedModel::fit(
            ctx.cfg.models.at("mlp_nores"), parts.first.x, parts.first.y));
        report(4, name, gbdt_res <= gbdt_plain && mlp_res <= mlp_plain,
               "held-out RMSE gbdt " + num(gbdt_res) + " <= " + num(gbdt_plain) +
                   " without; mlp " + num(mlp_res) + " <= " + num(mlp_plain) + " without");
    } catch (const std::exception& e) {
        report_error(4, name, e);
    }
}

// --- criteria 5 & 6: the corrections ablation --------------------------------

struct AblationResult {
    double err_none = 0, err_1 = 0, err_12 = 0, err_123 = 0;
    double seconds = 0;
};

std::optional<AblationResult> g_ablation;

const AblationResult& run_ablation() {
    if (g_ablation) return *g_ablation;
    const TrainedModel& model = ctx.get_gbdt_cov();
    const auto refs = cation_snapshots(ctx.get_reference());
    const int period = 40;  // long gaps make the drift the rescale removes dominant

    auto run_variant = [&](bool skip, int oracle_period, bool rescale) {
        CouplingConfig ccfg = ctx.cfg.coupling;
        ccfg.backend = ChemistryBackend::Surrogate;
        ccfg.skip_equilibrium = skip;
        ccfg.oracle_period = oracle_period;
        ccfg.charge_rescale = rescale;
        ccfg.record_snapshots = true;
        return ctx.run_column(ccfg, ctx.cfg.transport, &model);
    };

    AblationResult out;
    const auto t0 = Clock::now();
    out.err_none = rollout_error(refs, cation_snapshots(run_variant(false, 0, false)));
    out.err_1 = rollout_error(refs, cation_snapshots(run_variant(true, 0, false)));
    out.err_12 = rollout_error(refs, cation_snapshots(run_variant(true, period, false)));
    RolloutResult full = run_variant(true, period, true);
    out.err_123 = rollout_error(refs, cation_snapshots(full));
    out.seconds = seconds_since(t0);
    ctx.full_corrections_run = std::move(full);
    g_ablation = out;
    return *g_ablation;
}

void criterion_5() {
    const char* name = "corrections payoff";
    try {
        const AblationResult& a = run_ablation();
        report(5, name, a.err_none >= 10.0 * a.err_123,
               "rollout error none " + num(a.err_none) + " vs all corrections " +
                   num(a.err_123) + " (ratio " + num(a.err_none / a.err_123) + ", >=10)");
    } catch (const std::exception& e) {
        report_error(5, name, e);
    }
}

void criterion_6() {
    const char* name = "correction ordering";
    try {
        const AblationResult& a = run_ablation();
        const double d1 = a.err_none - a.err_1;
        const double d2 = a.err_1 - a.err_12;
        const double d3 = a.err_12 - a.err_123;
        const bool strict = a.err_none > a.err_1 && a.err_1 > a.err_12 && a.err_12 > a.err_123;
        const bool third_largest = d3 > d1 && d3 > d2;
        const bool third_strong = a.err_12 >= 5.0 * a.err_123;
        report(6, name, strict && third_largest && third_strong && a.seconds < 900.0,
               "errors " + num(a.err_none) + " > " + num(a.err_1) + " > " + num(a.err_12) +
                   " > " + num(a.err_123) + "; decrements " + num(d1) + "/" + num(d2) + "/" +
                   num(d3) + " (third largest), ratio " + num(a.err_12 / a.err_123) +
                   " (>=5), " + num(a.seconds) + " s (<900)");
    } catch (const std::exception& e) {
        report_error(6, name, e);
    }
}

// --- criterion 7: zeros-enforced sampling beats vanilla in rollout -----------

void criterion_7() {
    const char* name = "structural zeros";
    try {
        const auto refs = cation_snapshots(ctx.get_reference());
        const ModelSpec& spec = ctx.cfg.models.at(ctx.cfg.ablate_model);
        std::map<std::string, std::vector<double>> errs;
        for (const std::string& strat : ctx.cfg.ablate_strategies) {
            for (std::size_t n : ctx.cfg.ablate_sizes) {
                SamplerSpec s = ctx.cfg.samplers.at(strat);
                s.n = n;
                const Dataset ds = generate_dataset(s, ctx.cfg.exchange);
                const auto parts = split(ds, 0.8, ctx.cfg.seed);
                const TrainedModel model =
                    TrainedModel::fit(spec, parts.first.x, parts.first.y);
                CouplingConfig ccfg = ctx.cfg.coupling;
                ccfg.backend = ChemistryBackend::Surrogate;
                ccfg.record_snapshots = true;
                const RolloutResult run =
                    ctx.run_column(ccfg, ctx.cfg.transport, &model);
                errs[strat].push_back(rollout_error(refs, cation_snapshots(run)));
            }
        }
        const auto& v = errs.at("vanilla");
        const auto& z = errs.at("vanilla_zeros");
        bool zeros_win = true, vanilla_monotone = true;
        std::string detail;
        for (std::size_t i = 0; i < v.size(); ++i) {
            zeros_win = zeros_win && z[i] < v[i];
            if (i > 0) vanilla_monotone = vanilla_monotone && v[i] <= v[i - 1];
            detail += (i ? ", " : "") + std::to_string(ctx.cfg.ablate_sizes[i]) + ": " +
                      num(v[i]) + " vs " + num(z[i]);
        }
        report(7, name, zeros_win && vanilla_monotone,
               "rollout error vanilla vs zeros-enforced at " + detail +
                   " (zeros lower everywhere, vanilla non-increasing)");
    } catch (const std::exception& e) {
        report_error(7, name, e);
    }
}

// --- criterion 8: periodic-oracle call accounting ----------------------------

void criterion_8() {
    const char* name = "oracle cadence";
    try {
        const TrainedModel& model = ctx.get_gbdt_cov();
        TransportConfig tcfg = ctx.cfg.transport;
        tcfg.total_pore_volumes = 1.0;
        tcfg.cfl = 1.0;  // exactly n_cells steps per pore volume
        CouplingConfig ccfg = ctx.cfg.coupling;
        ccfg.backend = ChemistryBackend::Surrogate;
        ccfg.skip_equilibrium = false;
        ccfg.oracle_period = 10;
        ccfg.charge_rescale = true;
        ccfg.record_snapshots = false;
        RolloutResult run = ctx.run_column(ccfg, tcfg, &model);
        std::size_t surrogate = 0, oracle = 0, skipped = 0;
        for (const StepLog& l : run.log) {
            surrogate += l.surrogate_calls;
            oracle += l.oracle_calls;
            skipped += l.skipped_cells;
        }
        const std::size_t total = surrogate + oracle;
        // exact rational check: surrogate / total == 9 / 10
        const bool fraction_ok = total > 0 && surrogate * 10 == total * 9;
        const bool pass = run.log.size() >= 100 && skipped == 0 && fraction_ok;
        ctx.counting_run = std::move(run);
        report(8, name, pass,
               std::to_string(ctx.counting_run->log.size()) + " steps, " +
                   std::to_string(surrogate) + " surrogate / " + std::to_string(oracle) +
                   " oracle calls (exactly 90% surrogate)");
    } catch (const std::exception& e) {
        report_error(8, name, e);
    }
}

// --- criterion 9: rescaled outputs carry the exact pre-reaction charge -------

void criterion_9() {
    const char* name = "charge exactness";
    try {
        if (!ctx.full_corrections_run) run_ablation();
        double worst = 0.0;
        if (ctx.full_corrections_run)
            worst = std::max(worst, ctx.full_corrections_run->max_charge_rel_err());
        if (ctx.counting_run)
            worst = std::max(worst, ctx.counting_run->max_charge_rel_err());
        report(9, name, worst <= 1e-12,
               "max accepted-output cation-charge mismatch " + num(worst) +
                   " relative (<=1e-12) across rescaled rollouts");
    } catch (const std::exception& e) {
        report_error(9, name, e);
    }
}

// --- criterion 10: numerical plumbing ----------------------------------------

void criterion_10() {
    const char* name = "plumbing";
    try {
        // backpropagation vs central finite differences, every parameter
        Mlp net({6, 8, 3}, 20240817);
        SplitMix64 rng(99);
        Matrix x(10, 6), y(10, 3);
        for (std::size_t i = 0; i < x.rows; ++i) {
            for (std::size_t j = 0; j < 6; ++j) x.at(i, j) = rng.next_double() * 2.0 - 1.0;
            for (std::size_t j = 0; j < 3; ++j) y.at(i, j) = rng.next_double() * 2.0 - 1.0;
        }
        std::vector<int> rows(x.rows);
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
        std::vector<double> grad;
        net.loss_and_grad(x, y, rows, grad);
        double max_grad_err = 0.0;
        const double h = 1e-6;
        std::vector<double> dummy;
        for (std::size_t p = 0; p < net.params().size(); ++p) {
            const double saved = net.params()[p];
            net.params()[p] = saved + h;
            const double up = net.loss_and_grad(x, y, rows, dummy);
            net.params()[p] = saved - h;
            const double down = net.loss_and_grad(x, y, rows, dummy);
            net.params()[p] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double rel =
                std::fabs(fd - grad[p]) / std::max(1e-8, std::fabs(fd) + std::fabs(grad[p]));
            max_grad_err = std::max(max_grad_err, rel);
        }
        const bool grad_ok = max_grad_err <= 1e-5;

        // scaler round-trip, including a constant column
        Matrix sx(40, 4);
        for (std::size_t i = 0; i < sx.rows; ++i) {
            sx.at(i, 0) = rng.next_double() * 3.0 - 1.0;
            sx.at(i, 1) = rng.next_double() * 1e-3;
            sx.at(i, 2) = 7.25;
            sx.at(i, 3) = rng.next_double() - 2.0;
        }
        MinMaxScaler scaler;
        scaler.fit(sx);
        const Matrix back = scaler.inverse(scaler.transform(sx));
        double max_rt = 0.0;
        for (std::size_t i = 0; i < sx.rows; ++i)
            for (std::size_t j = 0; j < sx.cols; ++j)
                max_rt = std::max(max_rt, std::fabs(back.at(i, j) - sx.at(i, j)));
        const bool scaler_ok = max_rt <= 1e-12;

        // serialization round-trip: bit-identical predictions for every kind
        SamplerSpec dspec = ctx.cfg.samplers.at("vanilla");
        dspec.n = 300;
        dspec.seed = 5150;
        const Dataset small = generate_dataset(dspec, ctx.cfg.exchange);
        bool serial_ok = true;
        std::string serial_detail;
        const auto tmp = std::filesystem::temp_directory_path() / "catex_acceptance_model.json";
        for (const char* kind :
             {"linear", "decision_tree", "random_forest", "gbdt", "mlp"}) {
            ModelSpec mspec = ModelSpec::defaults_for(model_kind_from_string(kind));
            mspec.n_trees = 30;
            mspec.max_depth = 4;
            mspec.epochs = 5;
            TrainedModel m = TrainedModel::fit(mspec, small.x, small.y);
            m.set_dataset_id("acceptance");
            m.save(tmp.string());
            const TrainedModel loaded = TrainedModel::load(tmp.string());
            const Matrix a = m.predict(small.x);
            const Matrix b = loaded.predict(small.x);
            bool same = loaded.dataset_id() == m.dataset_id();
            for (std::size_t i = 0; same && i < a.rows; ++i)
                for (std::size_t j = 0; j < a.cols; ++j)
                    if (a.at(i, j) != b.at(i, j)) {
                        same = false;
                        break;
                    }
            if (!same) {
                serial_ok = false;
                serial_detail += std::string(serial_detail.empty() ? "" : ", ") + kind;
            }
        }
        std::filesystem::remove(tmp);

        report(10, name, grad_ok && scaler_ok && serial_ok,
               "gradient check max rel err " + num(max_grad_err) +
                   " (<=1e-5), scaler round-trip " + num(max_rt) + " (<=1e-12), " +
                   (serial_ok ? "all five model kinds reload bit-identically"
                              : "reload mismatch: " + serial_detail));
    } catch (const std::exception& e) {
        report_error(10, name, e);
    }
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    std::printf("acceptance gate: %d criteria\n", 10);
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("acceptance gate: %s (%d/10 passed, %.1f s)\n",
                g_failures == 0 ? "PASS" : "FAIL", 10 - g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}
