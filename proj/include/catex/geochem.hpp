#pragma once

#include <array>
#include <cstdint>

namespace catex {

/*
 * Equilibrium solver for the Na+/K+/Ca2+ cation-exchange system.
 *
 * Half reactions (exchange site X-, Gaines-Thomas convention: the activity of
 * an exchange species is its equivalent fraction of the exchanger):
 *
 *   Na+ + X-  = NaX     K_na = 10^log_k_na
 *   K+  + X-  = KX      K_k  = 10^log_k_k
 *   Ca2+ + 2X- = CaX2   K_ca = 10^log_k_ca
 *
 * Mass action, with a single positive latent site term x and ideal aqueous
 * activities a_i = m_i (molality):
 *
 *   beta_NaX  = K_na * a_na * x
 *   beta_KX   = K_k  * a_k  * x
 *   beta_CaX2 = K_ca * a_ca * x^2
 *   beta_NaX + beta_KX + beta_CaX2 = 1            (exchanger filled, cec > 0)
 *
 * where beta_NaX = na_x/cec, beta_KX = k_x/cec, beta_CaX2 = 2*ca_x2/cec.
 * Pairwise selectivities are derived (log K_{K\Na} = log_k_k - log_k_na),
 * never stored. Mass balance closes the system: for totals T_i = aqueous +
 * sorbed moles, m_i + sorbed_i(m, x) = T_i per cation. Anions (Cl-, NO3-) do
 * not interact with the exchanger and pass through unchanged.
 *
 * Two independent solution routes are provided: a damped Newton iteration in
 * log space (equilibrate) and a monotone bisection on x with a nested
 * per-cation mass-balance fixpoint (equilibrate_bruteforce). They share no
 * iteration machinery and serve as cross-checks for each other.
 */

// Aqueous composition of one grid cell or boundary stream.
// All fields are molalities in mol per kg of water (mol/kgw), >= 0.
struct AqueousSolution {
    double na = 0.0;
    double k = 0.0;
    double ca = 0.0;
    double cl = 0.0;
    double no3 = 0.0;

    // total cation charge, eq/kgw
    double cation_charge() const { return na + k + 2.0 * ca; }
    // total anion charge, eq/kgw
    double anion_charge() const { return cl + no3; }
    bool finite_nonnegative() const;
};

// Sorbed-phase composition, mol per kg of contacting water.
struct ExchangerState {
    double na_x = 0.0;
    double k_x = 0.0;
    double ca_x2 = 0.0;

    // occupied exchange sites, eq/kgw
    double equivalents() const { return na_x + k_x + 2.0 * ca_x2; }
    bool finite_nonnegative() const;
};

enum class ActivityModel : std::uint8_t { Ideal };

// Selectivity constants of the half reactions (log10, dimensionless) plus the
// exchange capacity. Defaults are the standard database values for this
// textbook problem; they are configuration, not physics baked into the code.
struct ExchangeParams {
    double log_k_na = 0.0;
    double log_k_k = 0.7;
    double log_k_ca = 0.8;
    double cec = 1.1e-3;  // exchange capacity, eq/kgw
    ActivityModel activity_model = ActivityModel::Ideal;

    bool valid() const;
};

struct EquilibriumResult {
    AqueousSolution solution;
    ExchangerState exchanger;
    int iterations = 0;
    double max_residual = 0.0;
    // latent Gaines-Thomas site term x of the converged state; 0 when cec = 0
    double site_activity = 0.0;
};

// The three mass-action residuals beta_i(exchanger) - K_i * a_i * x^nu_i and
// the (sum of model betas - 1) residual used by both solvers. Pure function.
// With cec = 0 the equivalent fractions are undefined and all residuals are 0.
std::array<double, 4> mass_action_residuals(const AqueousSolution& solution,
                                            const ExchangerState& exch, double x,
                                            const ExchangeParams& params);

// Newton solve (log space, damped) of the equilibrium for system totals
// T_i = totals_i + sorbed_i. Falls back to equilibrate_bruteforce on
// non-convergence. Returns the input unchanged (0 iterations) when it already
// satisfies every residual, which makes equilibrate a bit-exact fixed point.
//
// Throws InvalidInput for non-finite/negative inputs, NonConvergence when the
// system is infeasible (total cation equivalents below cec).
EquilibriumResult equilibrate(const AqueousSolution& totals, const ExchangerState& exch,
                              const ExchangeParams& params);

// Independent oracle: bisection on the latent site term x (the model beta sum
// is strictly increasing in x), with a per-cation mass-balance fixpoint nested
// inside each evaluation. No Newton machinery.
EquilibriumResult equilibrate_bruteforce(const AqueousSolution& totals,
                                         const ExchangerState& exch,
                                         const ExchangeParams& params);

// Exchanger composition in equilibrium with a *fixed* aqueous solution (the
// solution is not modified; used to initialize columns the way a geochemical
// simulator pre-equilibrates an exchange assemblage against a solution).
ExchangerState exchanger_in_equilibrium_with(const AqueousSolution& solution,
                                             const ExchangeParams& params);

}  // namespace catex
