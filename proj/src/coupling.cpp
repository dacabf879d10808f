#include "catex/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "catex/errors.hpp"

namespace catex {

std::string to_string(ChemistryBackend backend) {
    return backend == ChemistryBackend::Oracle ? "oracle" : "surrogate";
}

ChemistryBackend backend_from_string(const std::string& name) {
    if (name == "oracle") return ChemistryBackend::Oracle;
    if (name == "surrogate") return ChemistryBackend::Surrogate;
    throw InvalidSpec("unknown chemistry backend: " + name);
}

bool CouplingConfig::valid() const {
    return std::isfinite(skip_tolerance) && skip_tolerance >= 0.0 && oracle_period >= 0;
}

bool ColumnState::valid() const {
    if (aqueous.size() != exchanger.size() || aqueous.size() != last_equilibrated.size())
        return false;
    for (const AqueousSolution& s : aqueous)
        if (!s.finite_nonnegative()) return false;
    for (const ExchangerState& e : exchanger)
        if (!e.finite_nonnegative()) return false;
    return true;
}

ColumnState initial_column(int n_cells, const AqueousSolution& initial,
                           const ExchangeParams& params) {
    if (n_cells <= 0) throw InvalidInput("initial_column: n_cells must be positive");
    ExchangerState ex = exchanger_in_equilibrium_with(initial, params);
    ColumnState st;
    st.aqueous.assign(static_cast<std::size_t>(n_cells), initial);
    st.exchanger.assign(static_cast<std::size_t>(n_cells), ex);
    st.last_equilibrated = st.aqueous;
    return st;
}

double domain_equivalents(const ColumnState& state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < state.aqueous.size(); ++i)
        acc += state.aqueous[i].cation_charge() + state.exchanger[i].equivalents();
    return acc;
}

AqueousSolution charge_rescale(const AqueousSolution& output, double target_charge) {
    if (!std::isfinite(target_charge) || target_charge < 0.0)
        throw InvalidInput("charge_rescale: invalid target charge");
    AqueousSolution res = output;
    if (target_charge == 0.0) {
        res.na = res.k = res.ca = 0.0;
        return res;
    }
    double charge = output.cation_charge();
    if (charge == 0.0)
        throw DegenerateCharge("charge_rescale: zero-charge output cannot reach target");
    double s = target_charge / charge;
    res.na *= s;
    res.k *= s;
    res.ca *= s;
    return res;
}

namespace {

// modification 1: post-transport aqueous cations still at the cell's last
// equilibrated values, relative tolerance per species
bool at_equilibrium(const AqueousSolution& now, const AqueousSolution& ref, double tol) {
    auto close = [tol](double a, double b) {
        return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
    };
    return close(now.na, ref.na) && close(now.k, ref.k) && close(now.ca, ref.ca);
}

void apply_oracle(ColumnState& state, std::size_t cell, const ExchangeParams& params) {
    EquilibriumResult res =
        equilibrate(state.aqueous[cell], state.exchanger[cell], params);
    state.aqueous[cell] = res.solution;
    state.exchanger[cell] = res.exchanger;
    state.last_equilibrated[cell] = res.solution;
}

}  // namespace

StepLog chemistry_step(ColumnState& state, const CouplingConfig& ccfg,
                       const ExchangeParams& params, int step_index,
                       const TrainedModel* surrogate) {
    if (!ccfg.valid()) throw InvalidInput("chemistry_step: invalid coupling config");
    if (!state.valid()) throw InvalidInput("chemistry_step: invalid column state");
    StepLog log;
    log.step = step_index;
    log.oracle_step = ccfg.oracle_period >= 1 && step_index % ccfg.oracle_period == 0;

    const bool surrogate_backend = ccfg.backend == ChemistryBackend::Surrogate;
    if (surrogate_backend && surrogate == nullptr)
        throw InvalidInput("chemistry_step: surrogate backend without a model");

    std::vector<std::size_t> pending;  // cells routed to the surrogate
    for (std::size_t cell = 0; cell < state.n_cells(); ++cell) {
        if (log.oracle_step) {
            // modification 2 overrides both the backend and the skip rule
            apply_oracle(state, cell, params);
            ++log.oracle_calls;
            continue;
        }
        if (ccfg.skip_equilibrium &&
            at_equilibrium(state.aqueous[cell], state.last_equilibrated[cell],
                           ccfg.skip_tolerance)) {
            ++log.skipped_cells;
            continue;
        }
        if (!surrogate_backend) {
            apply_oracle(state, cell, params);
            ++log.oracle_calls;
        } else {
            pending.push_back(cell);
        }
    }

    if (!pending.empty()) {
        Matrix features(pending.size(), 6);
        for (std::size_t i = 0; i < pending.size(); ++i) {
            const AqueousSolution& aq = state.aqueous[pending[i]];
            const ExchangerState& ex = state.exchanger[pending[i]];
            double* f = features.row(i);
            f[0] = aq.na;
            f[1] = aq.k;
            f[2] = aq.ca;
            f[3] = ex.na_x;
            f[4] = ex.k_x;
            f[5] = ex.ca_x2;
        }
        Matrix pred = surrogate->predict(features);
        for (std::size_t i = 0; i < pending.size(); ++i) {
            std::size_t cell = pending[i];
            const AqueousSolution in_aq = state.aqueous[cell];
            AqueousSolution out = in_aq;  // anions pass through
            out.na = pred.at(i, 0);
            out.k = pred.at(i, 1);
            out.ca = pred.at(i, 2);
            if (ccfg.charge_rescale) {
                double target = in_aq.cation_charge();
                try {
                    out = charge_rescale(out, target);
                } catch (const DegenerateCharge&) {
                    // surrogate collapse; this cell falls back to the oracle
                    apply_oracle(state, cell, params);
                    ++log.oracle_calls;
                    continue;
                }
                if (target > 0.0) {
                    double err = std::abs(out.cation_charge() - target) / target;
                    log.max_charge_rel_err = std::max(log.max_charge_rel_err, err);
                }
            }
            // exchanger closes the per-cell mass balance; clip at zero so a
            // drained species cannot go negative
            ExchangerState& ex = state.exchanger[cell];
            ex.na_x = std::max(0.0, ex.na_x + (in_aq.na - out.na));
            ex.k_x = std::max(0.0, ex.k_x + (in_aq.k - out.k));
            ex.ca_x2 = std::max(0.0, ex.ca_x2 + (in_aq.ca - out.ca));
            state.aqueous[cell] = out;
            state.last_equilibrated[cell] = out;
            ++log.surrogate_calls;
        }
    }
    return log;
}

namespace {

Matrix snapshot_of(const ColumnState& state) {
    Matrix snap(state.n_cells(), 6);
    for (std::size_t i = 0; i < state.n_cells(); ++i) {
        double* r = snap.row(i);
        r[0] = state.aqueous[i].na;
        r[1] = state.aqueous[i].k;
        r[2] = state.aqueous[i].ca;
        r[3] = state.exchanger[i].na_x;
        r[4] = state.exchanger[i].k_x;
        r[5] = state.exchanger[i].ca_x2;
    }
    return snap;
}

}  // namespace

RolloutResult run_rollout(const TransportConfig& tcfg, const CouplingConfig& ccfg,
                          const ExchangeParams& params, const AqueousSolution& inflow,
                          ColumnState initial, const TrainedModel* surrogate) {
    if (!tcfg.valid()) throw InvalidInput("run_rollout: invalid transport config");
    if (!ccfg.valid()) throw InvalidInput("run_rollout: invalid coupling config");
    if (!inflow.finite_nonnegative()) throw InvalidInput("run_rollout: invalid inflow");
    if (!initial.valid() ||
        initial.n_cells() != static_cast<std::size_t>(tcfg.n_cells))
        throw InvalidInput("run_rollout: initial state does not match the grid");
    if (ccfg.backend == ChemistryBackend::Surrogate && surrogate == nullptr)
        throw InvalidInput("run_rollout: surrogate backend without a model");

    const bool flowing = tcfg.darcy_velocity > 0.0;
    const double dt = flowing ? stable_dt(tcfg) : 0.0;
    const double nu = flowing ? tcfg.cfl : 0.0;
    const double pv_step = flowing ? pore_volumes_per_step(tcfg) : 0.0;
    const int n_steps = steps_for_pore_volumes(tcfg);

    ColumnState state = std::move(initial);
    RolloutResult out;
    out.n_cells = tcfg.n_cells;
    out.initial_domain_equivalents = domain_equivalents(state);
    out.time_s.push_back(0.0);
    out.pore_volumes.push_back(0.0);
    out.outflow.push_back(state.aqueous.back());
    if (ccfg.record_snapshots) out.snapshots.push_back(snapshot_of(state));

    for (int step = 1; step <= n_steps; ++step) {
        // equivalents that cross the boundaries during this advection step
        out.injected_equivalents += nu * inflow.cation_charge();
        out.discharged_equivalents += nu * state.aqueous.back().cation_charge();
        advect_step(state.aqueous, inflow, nu);

        StepLog log;
        try {
            log = chemistry_step(state, ccfg, params, step, surrogate);
        } catch (const NonConvergence& e) {
            throw NonConvergence("step " + std::to_string(step) + ": " + e.what());
        }
        out.log.push_back(log);
        out.time_s.push_back(dt * step);
        out.pore_volumes.push_back(pv_step * step);
        out.outflow.push_back(state.aqueous.back());
        if (ccfg.record_snapshots) out.snapshots.push_back(snapshot_of(state));
    }
    out.final_domain_equivalents = domain_equivalents(state);
    return out;
}

long RolloutResult::total_surrogate_calls() const {
    long acc = 0;
    for (const StepLog& l : log) acc += l.surrogate_calls;
    return acc;
}

long RolloutResult::total_oracle_calls() const {
    long acc = 0;
    for (const StepLog& l : log) acc += l.oracle_calls;
    return acc;
}

long RolloutResult::total_skipped_cells() const {
    long acc = 0;
    for (const StepLog& l : log) acc += l.skipped_cells;
    return acc;
}

double RolloutResult::max_charge_rel_err() const {
    double acc = 0.0;
    for (const StepLog& l : log) acc = std::max(acc, l.max_charge_rel_err);
    return acc;
}

std::vector<Matrix> cation_snapshots(const RolloutResult& result) {
    std::vector<Matrix> out;
    out.reserve(result.snapshots.size());
    for (const Matrix& snap : result.snapshots) {
        Matrix m(snap.rows, 3);
        for (std::size_t r = 0; r < snap.rows; ++r)
            for (std::size_t c = 0; c < 3; ++c) m.at(r, c) = snap.at(r, c);
        out.push_back(std::move(m));
    }
    return out;
}

void write_outflow_csv(const RolloutResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("write_outflow_csv: cannot open " + path);
    out << "time_s,pore_volumes,na_out,k_out,ca_out,cl_out,no3_out,"
           "surrogate_calls,oracle_calls,skipped_cells\n";
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < result.outflow.size(); ++i) {
        const AqueousSolution& s = result.outflow[i];
        int sc = 0, oc = 0, sk = 0;
        if (i >= 1) {
            const StepLog& l = result.log[i - 1];
            sc = l.surrogate_calls;
            oc = l.oracle_calls;
            sk = l.skipped_cells;
        }
        out << num(result.time_s[i]) << ',' << num(result.pore_volumes[i]) << ','
            << num(s.na) << ',' << num(s.k) << ',' << num(s.ca) << ',' << num(s.cl) << ','
            << num(s.no3) << ',' << sc << ',' << oc << ',' << sk << "\n";
    }
    if (!out) throw InvalidInput("write_outflow_csv: write failed for " + path);
}

}  // namespace catex
