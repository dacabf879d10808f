#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "catex/dataset.hpp"
#include "catex/errors.hpp"
#include "catex/geochem.hpp"
#include "catex/rng.hpp"

using namespace catex;

namespace {

const ExchangeParams kParams{};  // log K 0 / 0.7 / 0.8, cec 1.1e-3

// Table-1 style column water: Na 1.0, K 0.2, NO3 1.2 mmol/kgw
const AqueousSolution kInitial{1.0e-3, 0.2e-3, 0.0, 0.0, 1.2e-3};

bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_SUITE("geochem") {

TEST_CASE("charge helpers") {
    AqueousSolution s{1e-3, 2e-3, 3e-3, 4e-3, 5e-3};
    CHECK(s.cation_charge() == doctest::Approx(1e-3 + 2e-3 + 2 * 3e-3).epsilon(1e-15));
    CHECK(s.anion_charge() == doctest::Approx(9e-3).epsilon(1e-15));
    ExchangerState e{1e-3, 2e-3, 3e-3};
    CHECK(e.equivalents() == doctest::Approx(1e-3 + 2e-3 + 2 * 3e-3).epsilon(1e-15));
}

TEST_CASE("initial totals against an empty exchanger") {
    // The whole 1.2 meq of cations redistributes onto the 1.1 meq exchanger;
    // only 0.1 meq stays aqueous, strongly enriched in Na+ because K+ binds
    // five times harder.
    EquilibriumResult r = equilibrate(kInitial, ExchangerState{}, kParams);
    CHECK(close_rel(r.solution.na, 9.58569029627107452e-05, 1e-8));
    CHECK(close_rel(r.solution.k, 4.14309703728924601e-06, 1e-8));
    CHECK(r.solution.ca == 0.0);
    CHECK(close_rel(r.exchanger.na_x, 9.04143097037289276e-04, 1e-8));
    CHECK(close_rel(r.exchanger.k_x, 1.95856902962710764e-04, 1e-8));
    CHECK(r.exchanger.ca_x2 == 0.0);
    CHECK(close_rel(r.site_activity, 8.57474260725536624e+03, 1e-6));
    // anions pass through untouched
    CHECK(r.solution.no3 == kInitial.no3);
    CHECK(r.solution.cl == kInitial.cl);

    EquilibriumResult b = equilibrate_bruteforce(kInitial, ExchangerState{}, kParams);
    CHECK(close_abs(b.solution.na, r.solution.na, 1e-10));
    CHECK(close_abs(b.solution.k, r.solution.k, 1e-10));
    CHECK(close_abs(b.exchanger.na_x, r.exchanger.na_x, 1e-10));
}

TEST_CASE("exchanger pre-equilibrated against a fixed solution") {
    ExchangerState e = exchanger_in_equilibrium_with(kInitial, kParams);
    CHECK(close_rel(e.na_x, 5.49347795823730209e-04, 1e-8));
    CHECK(close_rel(e.k_x, 5.50652204176269749e-04, 1e-8));
    CHECK(e.ca_x2 == 0.0);
    CHECK(close_rel(e.equivalents(), kParams.cec, 1e-12));
}

TEST_CASE("calcium displaces sodium and potassium from the exchanger") {
    // Inject the Ca-only stream against the column's pre-equilibrated
    // exchanger: Ca2+ takes most of the sites, Na+ and K+ go aqueous.
    const ExchangerState start{5.49347795823730209e-04, 5.50652204176269749e-04, 0.0};
    const AqueousSolution inflow{0.0, 0.0, 0.6e-3, 1.2e-3, 0.0};
    EquilibriumResult r = equilibrate(inflow, start, kParams);
    CHECK(close_rel(r.solution.na, 5.28145116313826130e-04, 1e-8));
    CHECK(close_rel(r.solution.k, 4.58416738020922434e-04, 1e-8));
    CHECK(close_rel(r.solution.ca, 1.06719072832625584e-04, 1e-8));
    CHECK(close_rel(r.exchanger.na_x, 2.12026795099040344e-05, 1e-8));
    CHECK(close_rel(r.exchanger.k_x, 9.22354661553473012e-05, 1e-8));
    CHECK(close_rel(r.exchanger.ca_x2, 4.93280927167374364e-04, 1e-8));
    CHECK(r.solution.cl == inflow.cl);
}

TEST_CASE("mass action residuals vanish at the converged state") {
    EquilibriumResult r = equilibrate(kInitial, ExchangerState{}, kParams);
    auto res = mass_action_residuals(r.solution, r.exchanger, r.site_activity, kParams);
    for (double v : res) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("higher selectivity wins at equal concentrations") {
    AqueousSolution totals{1.0e-3, 1.0e-3, 0.0, 0.0, 2.0e-3};
    EquilibriumResult r = equilibrate(totals, ExchangerState{}, kParams);
    CHECK(r.exchanger.k_x > r.exchanger.na_x);  // log K 0.7 vs 0.0
    // and Ca2+ binds hardest: equal equivalents of each cation
    AqueousSolution t2{1.0e-3, 1.0e-3, 0.5e-3, 0.0, 3.0e-3};
    EquilibriumResult r2 = equilibrate(t2, ExchangerState{}, kParams);
    CHECK(2.0 * r2.exchanger.ca_x2 > r2.exchanger.k_x);
}

TEST_CASE("zero capacity passes the solution through") {
    ExchangeParams p = kParams;
    p.cec = 0.0;
    EquilibriumResult r = equilibrate(kInitial, ExchangerState{}, p);
    CHECK(r.solution.na == kInitial.na);
    CHECK(r.solution.k == kInitial.k);
    CHECK(r.exchanger.equivalents() == 0.0);
    CHECK(r.site_activity == 0.0);
}

TEST_CASE("invalid and infeasible inputs throw") {
    AqueousSolution bad = kInitial;
    bad.na = -1e-6;
    CHECK_THROWS_AS(equilibrate(bad, ExchangerState{}, kParams), InvalidInput);
    bad.na = std::nan("");
    CHECK_THROWS_AS(equilibrate(bad, ExchangerState{}, kParams), InvalidInput);

    // total cation equivalents (1.0 meq) below the capacity (1.1 meq):
    // the exchanger cannot fill, there is no equilibrium
    AqueousSolution scarce{1.0e-3, 0.0, 0.0, 0.0, 1.0e-3};
    CHECK_THROWS_AS(equilibrate(scarce, ExchangerState{}, kParams), NonConvergence);
    CHECK_THROWS_AS(equilibrate_bruteforce(scarce, ExchangerState{}, kParams),
                    NonConvergence);
}

TEST_CASE("equilibrate is a bit-exact fixed point") {
    EquilibriumResult r = equilibrate(kInitial, ExchangerState{}, kParams);
    EquilibriumResult again = equilibrate(r.solution, r.exchanger, kParams);
    CHECK(again.iterations == 0);
    CHECK(again.solution.na == r.solution.na);
    CHECK(again.solution.k == r.solution.k);
    CHECK(again.solution.ca == r.solution.ca);
    CHECK(again.exchanger.na_x == r.exchanger.na_x);
    CHECK(again.exchanger.k_x == r.exchanger.k_x);
    CHECK(again.exchanger.ca_x2 == r.exchanger.ca_x2);
}

TEST_CASE("solver cross-check and conservation over random states") {
    // Random feasible states including exact-zero cation corners; the
    // acceptance gate runs the full-size version of this property.
    SamplerSpec spec;
    spec.kind = SamplerKind::VanillaZeros;
    spec.n = 200;
    spec.seed = 7;
    Matrix rows = sample(spec, kParams.cec);
    REQUIRE(rows.rows == 200);
    for (std::size_t i = 0; i < rows.rows; ++i) {
        const double* f = rows.row(i);
        AqueousSolution aq{f[0], f[1], f[2], 0.0, 0.0};
        ExchangerState ex{f[3], f[4], f[5]};
        EquilibriumResult a = equilibrate(aq, ex, kParams);
        EquilibriumResult b = equilibrate_bruteforce(aq, ex, kParams);
        CHECK(close_abs(a.solution.na, b.solution.na, 1e-8));
        CHECK(close_abs(a.solution.k, b.solution.k, 1e-8));
        CHECK(close_abs(a.solution.ca, b.solution.ca, 1e-8));
        CHECK(close_abs(a.exchanger.na_x, b.exchanger.na_x, 1e-8));
        CHECK(close_abs(a.exchanger.k_x, b.exchanger.k_x, 1e-8));
        CHECK(close_abs(a.exchanger.ca_x2, b.exchanger.ca_x2, 1e-8));

        // element conservation, relative to each cation's system total
        const double tna = aq.na + ex.na_x;
        const double tk = aq.k + ex.k_x;
        const double tca = aq.ca + ex.ca_x2;
        CHECK(std::abs(a.solution.na + a.exchanger.na_x - tna) <= 1e-12 * std::max(tna, 1e-30));
        CHECK(std::abs(a.solution.k + a.exchanger.k_x - tk) <= 1e-12 * std::max(tk, 1e-30));
        CHECK(std::abs(a.solution.ca + a.exchanger.ca_x2 - tca) <=
              1e-12 * std::max(tca, 1e-30));

        // converged exchanger sits exactly at capacity
        CHECK(close_rel(a.exchanger.equivalents(), kParams.cec, 1e-10));

        // re-equilibrating the output moves nothing
        EquilibriumResult fp = equilibrate(a.solution, a.exchanger, kParams);
        CHECK(close_abs(fp.solution.na, a.solution.na, 1e-10));
        CHECK(close_abs(fp.solution.k, a.solution.k, 1e-10));
        CHECK(close_abs(fp.solution.ca, a.solution.ca, 1e-10));
    }
}

}  // TEST_SUITE
