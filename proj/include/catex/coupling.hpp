#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catex/geochem.hpp"
#include "catex/matrix.hpp"
#include "catex/surrogate.hpp"
#include "catex/transport.hpp"

namespace catex {

// Sequential non-iterative operator splitting: each time level advances
// transport with one explicit upwind step, then equilibrates every cell's
// chemistry through the selected backend. Three optional surrogate-path
// corrections are implemented:
//   1. skip_equilibrium  — cells whose post-transport aqueous cations still
//      match their last equilibrated values (relative tolerance) are not
//      re-equilibrated at all;
//   2. oracle_period n   — every n-th step (steps numbered from 1) runs the
//      ground-truth solver for all cells, whatever the backend;
//   3. charge_rescale    — accepted surrogate outputs are linearly rescaled
//      so their cation charge equals the pre-reaction input's.

enum class ChemistryBackend : int { Oracle, Surrogate };

std::string to_string(ChemistryBackend backend);
ChemistryBackend backend_from_string(const std::string& name);

struct CouplingConfig {
    ChemistryBackend backend = ChemistryBackend::Oracle;
    bool skip_equilibrium = true;
    double skip_tolerance = 1e-9;  // relative, per cation
    int oracle_period = 10;        // 0 = off; n >= 1 enables modification 2
    bool charge_rescale = true;
    bool record_snapshots = true;  // keep per-step cells x 6 fields

    bool valid() const;
};

struct ColumnState {
    std::vector<AqueousSolution> aqueous;
    std::vector<ExchangerState> exchanger;
    // last equilibrated aqueous state per cell; reference for the skip rule
    std::vector<AqueousSolution> last_equilibrated;

    std::size_t n_cells() const { return aqueous.size(); }
    bool valid() const;
};

// Column pre-equilibrated against the initial solution: every cell starts at
// (initial, exchanger_in_equilibrium_with(initial)).
ColumnState initial_column(int n_cells, const AqueousSolution& initial,
                           const ExchangeParams& params);

struct StepLog {
    int step = 0;  // 1-based chemistry step index
    int surrogate_calls = 0;
    int oracle_calls = 0;  // includes charge-collapse fallbacks
    int skipped_cells = 0;
    bool oracle_step = false;        // modification 2 fired on this step
    double max_charge_rel_err = 0.0; // over accepted surrogate outputs
};

struct RolloutResult {
    int n_cells = 0;
    // per recorded level (step 0 = initial condition, then one per step)
    std::vector<double> time_s;
    std::vector<double> pore_volumes;
    std::vector<AqueousSolution> outflow;  // outlet cell, post-chemistry
    std::vector<Matrix> snapshots;         // cells x 6 (na,k,ca,na_x,k_x,ca_x2)
    std::vector<StepLog> log;              // one per chemistry step
    // closed-system equivalents budget bookkeeping
    double injected_equivalents = 0.0;
    double discharged_equivalents = 0.0;
    double initial_domain_equivalents = 0.0;
    double final_domain_equivalents = 0.0;

    long total_surrogate_calls() const;
    long total_oracle_calls() const;
    long total_skipped_cells() const;
    double max_charge_rel_err() const;  // worst accepted-output charge mismatch
};

// Total cation equivalents in the column (aqueous + sorbed), summed per cell.
double domain_equivalents(const ColumnState& state);

// Modification 3: returns `output` with na, k, ca scaled by
// target_charge / cation_charge(output); anions untouched. target 0 zeroes
// the cations. Throws DegenerateCharge when the output carries no cation
// charge but the target is positive (surrogate collapse; callers fall back
// to the oracle for that cell).
AqueousSolution charge_rescale(const AqueousSolution& output, double target_charge);

// One chemistry step over all cells, honoring the three corrections.
// `surrogate` may be null for the Oracle backend. Updates state in place and
// returns the call log for this step.
StepLog chemistry_step(ColumnState& state, const CouplingConfig& ccfg,
                       const ExchangeParams& params, int step_index,
                       const TrainedModel* surrogate);

// Full rollout: pre-equilibrated initial state, then alternate advection and
// chemistry until total_pore_volumes have been injected. The inflow solution
// is constant in time. A zero darcy_velocity degenerates to chemistry-only
// steps at nu = 0 (nothing moves; time and pore volumes stay 0).
RolloutResult run_rollout(const TransportConfig& tcfg, const CouplingConfig& ccfg,
                          const ExchangeParams& params, const AqueousSolution& inflow,
                          ColumnState initial, const TrainedModel* surrogate = nullptr);

// First three columns (aqueous cations) of every snapshot; the fields the
// rollout error metric compares.
std::vector<Matrix> cation_snapshots(const RolloutResult& result);

// Flat delimited export: time_s, pore_volumes, na_out, k_out, ca_out, cl_out,
// no3_out, surrogate_calls, oracle_calls, skipped_cells (zeros for step 0).
void write_outflow_csv(const RolloutResult& result, const std::string& path);

}  // namespace catex
