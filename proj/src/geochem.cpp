#include "catex/geochem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catex/errors.hpp"

namespace catex {

namespace {

constexpr double kMassBalanceTol = 1e-12;  // relative, per cation
constexpr double kMassActionTol = 1e-10;
constexpr int kNewtonMaxIter = 200;
constexpr int kMaxHalvings = 50;
constexpr int kBisectMaxIter = 300;

bool all_finite(const double* v, int n) {
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(v[i])) return false;
    return true;
}

struct Totals {
    // system totals per cation, mol/kgw (aqueous + sorbed)
    double t[3];            // Na, K, Ca
    double equivalents;     // t_na + t_k + 2*t_ca
};

Totals make_totals(const AqueousSolution& aq, const ExchangerState& ex) {
    Totals tt;
    tt.t[0] = aq.na + ex.na_x;
    tt.t[1] = aq.k + ex.k_x;
    tt.t[2] = aq.ca + ex.ca_x2;
    tt.equivalents = tt.t[0] + tt.t[1] + 2.0 * tt.t[2];
    return tt;
}

void validate_inputs(const AqueousSolution& aq, const ExchangerState& ex,
                     const ExchangeParams& params) {
    if (!params.valid()) throw InvalidInput("equilibrate: invalid exchange parameters");
    if (!aq.finite_nonnegative()) throw InvalidInput("equilibrate: invalid aqueous input");
    if (!ex.finite_nonnegative()) throw InvalidInput("equilibrate: invalid exchanger input");
}

// sorbed moles at molality m and site term x; valence nu, selectivity K
inline double sorbed_moles(double K, double m, double x, int nu, double cec) {
    if (nu == 1) return K * m * x * cec;
    return 0.5 * K * m * x * x * cec;
}

// Exact capacity, then exact mass balance: rescale sorbed amounts so the
// exchanger holds cec equivalents, and recompute aqueous from the totals.
// Perturbs mass action by no more than the solver's own round-off.
EquilibriumResult finalize(const AqueousSolution& aq_in, const Totals& tt, double s_na,
                           double s_k, double s_ca, double x, int iterations,
                           const ExchangeParams& params) {
    double equiv = s_na + s_k + 2.0 * s_ca;
    if (equiv > 0.0) {
        double scale = params.cec / equiv;
        s_na *= scale;
        s_k *= scale;
        s_ca *= scale;
    }
    EquilibriumResult res;
    res.solution.na = std::max(0.0, tt.t[0] - s_na);
    res.solution.k = std::max(0.0, tt.t[1] - s_k);
    res.solution.ca = std::max(0.0, tt.t[2] - s_ca);
    res.solution.cl = aq_in.cl;
    res.solution.no3 = aq_in.no3;
    res.exchanger = ExchangerState{s_na, s_k, s_ca};
    res.iterations = iterations;
    res.site_activity = x;

    auto r = mass_action_residuals(res.solution, res.exchanger, x, params);
    double worst = 0.0;
    for (double ri : r) worst = std::max(worst, std::abs(ri));
    const double* sorbed[3] = {&s_na, &s_k, &s_ca};
    const double* m[3] = {&res.solution.na, &res.solution.k, &res.solution.ca};
    for (int i = 0; i < 3; ++i) {
        double t = tt.t[i];
        if (t > 0.0)
            worst = std::max(worst, std::abs(*m[i] + *sorbed[i] - t) / t);
    }
    res.max_residual = worst;
    return res;
}

// Shared degenerate branches. Returns true when handled.
bool handle_corners(const AqueousSolution& aq, const ExchangeParams& params,
                    const Totals& tt, EquilibriumResult& out) {
    if (params.cec == 0.0) {
        out = EquilibriumResult{aq, ExchangerState{}, 0, 0.0, 0.0};
        // any sorbed input mass returns to solution; with a zero-capacity
        // exchanger there is nowhere else for it to live
        out.solution.na = tt.t[0];
        out.solution.k = tt.t[1];
        out.solution.ca = tt.t[2];
        return true;
    }
    double rel = (tt.equivalents - params.cec) / params.cec;
    if (rel < -1e-12)
        throw NonConvergence("equilibrate: total cation equivalents below exchange capacity");
    if (rel <= 1e-12) {
        // exchange-dominated corner: the exchanger takes everything
        out.solution = aq;
        out.solution.na = 0.0;
        out.solution.k = 0.0;
        out.solution.ca = 0.0;
        out.exchanger = ExchangerState{tt.t[0], tt.t[1], tt.t[2]};
        out.iterations = 0;
        out.max_residual = 0.0;
        out.site_activity = std::numeric_limits<double>::infinity();
        return true;
    }
    return false;
}

struct Selectivities {
    double K[3];  // 10^log_k per cation
    explicit Selectivities(const ExchangeParams& p)
        : K{std::pow(10.0, p.log_k_na), std::pow(10.0, p.log_k_k), std::pow(10.0, p.log_k_ca)} {}
};

constexpr int kValence[3] = {1, 1, 2};

}  // namespace

bool AqueousSolution::finite_nonnegative() const {
    const double v[5] = {na, k, ca, cl, no3};
    if (!all_finite(v, 5)) return false;
    for (double c : v)
        if (c < 0.0) return false;
    return true;
}

bool ExchangerState::finite_nonnegative() const {
    const double v[3] = {na_x, k_x, ca_x2};
    if (!all_finite(v, 3)) return false;
    for (double c : v)
        if (c < 0.0) return false;
    return true;
}

bool ExchangeParams::valid() const {
    const double v[4] = {log_k_na, log_k_k, log_k_ca, cec};
    return all_finite(v, 4) && cec >= 0.0;
}

std::array<double, 4> mass_action_residuals(const AqueousSolution& solution,
                                            const ExchangerState& exch, double x,
                                            const ExchangeParams& params) {
    if (params.cec == 0.0) return {0.0, 0.0, 0.0, 0.0};
    Selectivities sel(params);
    double beta_model[3] = {sel.K[0] * solution.na * x, sel.K[1] * solution.k * x,
                            sel.K[2] * solution.ca * x * x};
    double beta_exch[3] = {exch.na_x / params.cec, exch.k_x / params.cec,
                           2.0 * exch.ca_x2 / params.cec};
    return {beta_exch[0] - beta_model[0], beta_exch[1] - beta_model[1],
            beta_exch[2] - beta_model[2],
            beta_model[0] + beta_model[1] + beta_model[2] - 1.0};
}

// ---------------------------------------------------------------------------
// Newton route
// ---------------------------------------------------------------------------

namespace {

// Try to recognize an input that is already at equilibrium: recover the site
// term from the most loaded exchange species with nonzero aqueous partner and
// test every residual. Keeps equilibrate a bit-exact fixed point of itself.
bool already_converged(const AqueousSolution& aq, const ExchangerState& ex,
                       const ExchangeParams& params, EquilibriumResult& out) {
    if (params.cec <= 0.0) return false;
    if (std::abs(ex.equivalents() - params.cec) > 1e-12 * params.cec) return false;
    Selectivities sel(params);
    const double m[3] = {aq.na, aq.k, aq.ca};
    const double beta[3] = {ex.na_x / params.cec, ex.k_x / params.cec,
                            2.0 * ex.ca_x2 / params.cec};
    int best = -1;
    for (int i = 0; i < 3; ++i)
        if (m[i] > 0.0 && beta[i] > 0.0 && (best < 0 || beta[i] > beta[best])) best = i;
    if (best < 0) return false;
    double x = (kValence[best] == 1) ? beta[best] / (sel.K[best] * m[best])
                                     : std::sqrt(beta[best] / (sel.K[best] * m[best]));
    if (!std::isfinite(x)) return false;
    auto r = mass_action_residuals(aq, ex, x, params);
    double worst = 0.0;
    for (double ri : r) worst = std::max(worst, std::abs(ri));
    if (worst > kMassActionTol) return false;
    out = EquilibriumResult{aq, ex, 0, worst, x};
    return true;
}

// n x n Gaussian elimination with partial pivoting; n <= 4
bool solve_dense(int n, double a[4][5]) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) return false;
        if (piv != col)
            for (int c = col; c <= n; ++c) std::swap(a[piv][c], a[col][c]);
        for (int r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = a[r][n];
        for (int c = r + 1; c < n; ++c) s -= a[r][c] * a[c][n];
        a[r][n] = s / a[r][r];
    }
    return true;
}

struct NewtonSystem {
    const Totals& tt;
    Selectivities sel;
    double cec;
    int active[3];   // indices of cations with t > 0
    int n_active = 0;

    NewtonSystem(const Totals& t, const ExchangeParams& p) : tt(t), sel(p), cec(p.cec) {
        for (int i = 0; i < 3; ++i)
            if (tt.t[i] > 0.0) active[n_active++] = i;
    }

    // residuals at u = (ln m_active..., ln x); returns squared norm
    double residuals(const double* u, double* f) const {
        double x = std::exp(u[n_active]);
        double beta_sum = 0.0;
        for (int j = 0; j < n_active; ++j) {
            int i = active[j];
            double m = std::exp(u[j]);
            double s = sorbed_moles(sel.K[i], m, x, kValence[i], cec);
            f[j] = (m + s - tt.t[i]) / tt.t[i];
            beta_sum += sel.K[i] * m * ((kValence[i] == 1) ? x : x * x);
        }
        f[n_active] = beta_sum - 1.0;
        double nrm = 0.0;
        for (int j = 0; j <= n_active; ++j) nrm += f[j] * f[j];
        return nrm;
    }

    void jacobian(const double* u, double a[4][5]) const {
        double x = std::exp(u[n_active]);
        int n = n_active + 1;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) a[r][c] = 0.0;
        double dfx_dux = 0.0;
        for (int j = 0; j < n_active; ++j) {
            int i = active[j];
            double m = std::exp(u[j]);
            double s = sorbed_moles(sel.K[i], m, x, kValence[i], cec);
            double beta = sel.K[i] * m * ((kValence[i] == 1) ? x : x * x);
            a[j][j] = (m + s) / tt.t[i];
            a[j][n_active] = kValence[i] * s / tt.t[i];
            a[n_active][j] = beta;
            dfx_dux += kValence[i] * beta;
        }
        a[n_active][n_active] = dfx_dux;
    }

    bool converged(const double* f) const {
        for (int j = 0; j < n_active; ++j)
            if (std::abs(f[j]) > kMassBalanceTol) return false;
        return std::abs(f[n_active]) <= kMassActionTol;
    }
};

}  // namespace

EquilibriumResult equilibrate(const AqueousSolution& totals, const ExchangerState& exch,
                              const ExchangeParams& params) {
    validate_inputs(totals, exch, params);
    EquilibriumResult out;
    if (already_converged(totals, exch, params, out)) return out;
    Totals tt = make_totals(totals, exch);
    if (handle_corners(totals, params, tt, out)) return out;

    NewtonSystem sys(tt, params);
    // initial guess: the equivalent-fraction argument fixes the aqueous share
    // of total equivalents at (E - cec)/E; the site term then follows from the
    // closed-form root of the quadratic beta sum at that guess
    double aq_frac = std::clamp((tt.equivalents - params.cec) / tt.equivalents, 1e-8, 1.0);
    double u[4];
    double b = 0.0, aq2 = 0.0;  // beta_sum(x) = aq2*x^2 + b*x
    for (int j = 0; j < sys.n_active; ++j) {
        int i = sys.active[j];
        double m0 = tt.t[i] * aq_frac;
        u[j] = std::log(m0);
        if (kValence[i] == 1)
            b += sys.sel.K[i] * m0;
        else
            aq2 += sys.sel.K[i] * m0;
    }
    double x0 = (aq2 > 0.0) ? 2.0 / (b + std::sqrt(b * b + 4.0 * aq2)) : 1.0 / b;
    u[sys.n_active] = std::log(x0);

    int n = sys.n_active + 1;
    double f[4];
    double fnorm = sys.residuals(u, f);
    int iter = 0;
    bool ok = false;
    for (; iter < kNewtonMaxIter; ++iter) {
        if (sys.converged(f)) {
            ok = true;
            break;
        }
        double a[4][5];
        sys.jacobian(u, a);
        for (int r = 0; r < n; ++r) a[r][n] = -f[r];
        if (!solve_dense(n, a)) break;
        // cap the log-space step so exp() stays representable
        double maxstep = 0.0;
        for (int r = 0; r < n; ++r) maxstep = std::max(maxstep, std::abs(a[r][n]));
        double cap = (maxstep > 30.0) ? 30.0 / maxstep : 1.0;
        // damp: halve until the residual norm decreases
        double lambda = cap;
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h) {
            double trial[4], ft[4];
            for (int r = 0; r < n; ++r) trial[r] = u[r] + lambda * a[r][n];
            double fn = sys.residuals(trial, ft);
            if (fn < fnorm) {
                for (int r = 0; r < n; ++r) u[r] = trial[r];
                for (int r = 0; r < n; ++r) f[r] = ft[r];
                fnorm = fn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    if (!ok && !sys.converged(f)) {
        // robustness fallback; the bisection route cannot stall here
        EquilibriumResult bf = equilibrate_bruteforce(totals, exch, params);
        return bf;
    }

    double x = std::exp(u[sys.n_active]);
    double s[3] = {0.0, 0.0, 0.0};
    for (int j = 0; j < sys.n_active; ++j) {
        int i = sys.active[j];
        s[i] = sorbed_moles(sys.sel.K[i], std::exp(u[j]), x, kValence[i], params.cec);
    }
    return finalize(totals, tt, s[0], s[1], s[2], x, iter, params);
}

// ---------------------------------------------------------------------------
// Bisection route (independent oracle)
// ---------------------------------------------------------------------------

namespace {

// Per-cation mass balance at fixed site term: fixpoint m <- t/(1 + sorbed/m).
// With ideal activities sorbed/m does not depend on m, so the loop settles
// immediately; the loop form is the hook for activity models where it cannot.
double balance_one_cation(double t, double K, double x, int nu, double cec) {
    if (t == 0.0) return 0.0;
    double m = t;
    for (int it = 0; it < 64; ++it) {
        double ratio = (nu == 1) ? K * x * cec : 0.5 * K * x * x * cec;  // sorbed/m
        double next = t / (1.0 + ratio);
        if (std::abs(next - m) <= 1e-15 * t) return next;
        m = next;
    }
    return m;
}

}  // namespace

EquilibriumResult equilibrate_bruteforce(const AqueousSolution& totals,
                                         const ExchangerState& exch,
                                         const ExchangeParams& params) {
    validate_inputs(totals, exch, params);
    Totals tt = make_totals(totals, exch);
    EquilibriumResult out;
    if (handle_corners(totals, params, tt, out)) return out;

    Selectivities sel(params);
    auto beta_sum_minus_one = [&](double x) {
        double g = -1.0;
        for (int i = 0; i < 3; ++i) {
            if (tt.t[i] == 0.0) continue;
            double m = balance_one_cation(tt.t[i], sel.K[i], x, kValence[i], params.cec);
            g += sel.K[i] * m * ((kValence[i] == 1) ? x : x * x);
        }
        return g;
    };

    // bracket: g(0) = -1; g increases monotonically to E/cec - 1 > 0
    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (beta_sum_minus_one(hi) < 0.0) {
        hi *= 2.0;
        if (++doublings > 1000 || !std::isfinite(hi))
            throw NonConvergence("equilibrate_bruteforce: no bracket for the site term");
    }
    int iter = 0;
    for (; iter < kBisectMaxIter; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // float resolution reached
        if (beta_sum_minus_one(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double x = 0.5 * (lo + hi);

    double s[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        if (tt.t[i] == 0.0) continue;
        double m = balance_one_cation(tt.t[i], sel.K[i], x, kValence[i], params.cec);
        s[i] = sorbed_moles(sel.K[i], m, x, kValence[i], params.cec);
    }
    return finalize(totals, tt, s[0], s[1], s[2], x, iter, params);
}

ExchangerState exchanger_in_equilibrium_with(const AqueousSolution& solution,
                                             const ExchangeParams& params) {
    if (!params.valid()) throw InvalidInput("exchanger_in_equilibrium_with: invalid params");
    if (!solution.finite_nonnegative())
        throw InvalidInput("exchanger_in_equilibrium_with: invalid solution");
    if (params.cec == 0.0) return ExchangerState{};
    Selectivities sel(params);
    // beta sum is quadratic in x for a fixed solution: a*x^2 + b*x = 1
    double b = sel.K[0] * solution.na + sel.K[1] * solution.k;
    double a = sel.K[2] * solution.ca;
    if (a == 0.0 && b == 0.0)
        throw NonConvergence(
            "exchanger_in_equilibrium_with: zero-cation solution cannot fill the exchanger");
    double x = (a > 0.0) ? 2.0 / (b + std::sqrt(b * b + 4.0 * a)) : 1.0 / b;
    double s_na = sel.K[0] * solution.na * x * params.cec;
    double s_k = sel.K[1] * solution.k * x * params.cec;
    double s_ca = 0.5 * sel.K[2] * solution.ca * x * x * params.cec;
    double equiv = s_na + s_k + 2.0 * s_ca;
    double scale = params.cec / equiv;
    return ExchangerState{s_na * scale, s_k * scale, s_ca * scale};
}

}  // namespace catex
