#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "catex/errors.hpp"
#include "catex/rng.hpp"
#include "catex/transport.hpp"

using namespace catex;

namespace {

std::vector<double> species_values(const std::vector<AqueousSolution>& cells, int which) {
    std::vector<double> v;
    for (const auto& c : cells) {
        switch (which) {
            case 0: v.push_back(c.na); break;
            case 1: v.push_back(c.k); break;
            case 2: v.push_back(c.ca); break;
            case 3: v.push_back(c.cl); break;
            default: v.push_back(c.no3); break;
        }
    }
    return v;
}

double species_of(const AqueousSolution& s, int which) {
    switch (which) {
        case 0: return s.na;
        case 1: return s.k;
        case 2: return s.ca;
        case 3: return s.cl;
        default: return s.no3;
    }
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("stable time step") {
    TransportConfig c;  // 100 cells, 1 m, 2.78e-7 m/s, porosity 1
    c.cfl = 1.0;
    CHECK(stable_dt(c) == doctest::Approx(35971.2230215827).epsilon(1e-12));
    c.cfl = 0.9;
    CHECK(stable_dt(c) == doctest::Approx(0.9 * 35971.2230215827).epsilon(1e-12));

    c.n_cells = 0;
    CHECK_THROWS_AS(stable_dt(c), InvalidInput);
    c = TransportConfig{};
    c.darcy_velocity = 0.0;  // valid config, but no finite stable step
    CHECK(c.valid());
    CHECK_THROWS_AS(stable_dt(c), InvalidInput);
}

TEST_CASE("pore volume bookkeeping") {
    TransportConfig c;
    CHECK(pore_volumes_per_step(c) == doctest::Approx(0.009).epsilon(1e-15));
    CHECK(steps_for_pore_volumes(c) == 334);  // ceil(3 / 0.009)

    c.cfl = 1.0;
    c.total_pore_volumes = 1.0;
    // exact multiple: the float-fuzz guard must not add a spurious step
    CHECK(steps_for_pore_volumes(c) == 100);
}

TEST_CASE("upwind step: conservation, maximum principle, shift limits") {
    SplitMix64 rng(99);
    std::vector<AqueousSolution> cells(17);
    for (auto& c : cells)
        c = AqueousSolution{rng.uniform(0, 2e-3), rng.uniform(0, 2e-3), rng.uniform(0, 2e-3),
                            rng.uniform(0, 2e-3), rng.uniform(0, 2e-3)};
    const AqueousSolution inflow{0.0, 0.0, 0.6e-3, 1.2e-3, 0.0};

    SUBCASE("mass budget and bounds at nu = 0.7") {
        const double nu = 0.7;
        auto before = cells;
        advect_step(cells, inflow, nu);
        for (int sp = 0; sp < 5; ++sp) {
            auto old_v = species_values(before, sp);
            auto new_v = species_values(cells, sp);
            double sum_old = 0.0, sum_new = 0.0;
            for (double v : old_v) sum_old += v;
            for (double v : new_v) sum_new += v;
            // total change = inflow flux minus outlet flux
            const double expect = sum_old + nu * (species_of(inflow, sp) - old_v.back());
            CHECK(sum_new == doctest::Approx(expect).epsilon(1e-13));

            // each cell is a convex combination of itself and its upstream
            double lo = std::min(*std::min_element(old_v.begin(), old_v.end()),
                                 species_of(inflow, sp));
            double hi = std::max(*std::max_element(old_v.begin(), old_v.end()),
                                 species_of(inflow, sp));
            for (double v : new_v) {
                CHECK(v >= lo - 1e-18);
                CHECK(v <= hi + 1e-18);
            }
        }
    }

    SUBCASE("nu = 0 is a no-op") {
        auto before = cells;
        advect_step(cells, inflow, 0.0);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            CHECK(cells[i].na == before[i].na);
            CHECK(cells[i].cl == before[i].cl);
        }
    }

    SUBCASE("nu = 1 is a pure shift") {
        auto before = cells;
        advect_step(cells, inflow, 1.0);
        CHECK(cells.front().ca == inflow.ca);
        CHECK(cells.front().cl == inflow.cl);
        for (std::size_t i = 1; i < cells.size(); ++i) {
            CHECK(cells[i].na == before[i - 1].na);
            CHECK(cells[i].no3 == before[i - 1].no3);
        }
    }

    SUBCASE("out-of-range Courant numbers throw") {
        CHECK_THROWS_AS(advect_step(cells, inflow, -0.1), CflViolation);
        CHECK_THROWS_AS(advect_step(cells, inflow, 1.1), CflViolation);
        CHECK_THROWS_AS(advect_step(cells, inflow, std::nan("")), CflViolation);
    }
}

TEST_CASE("config validity") {
    TransportConfig c;
    CHECK(c.valid());
    c.porosity = 0.0;
    CHECK_FALSE(c.valid());
    c = TransportConfig{};
    c.cfl = 1.5;
    CHECK_FALSE(c.valid());
    c = TransportConfig{};
    c.total_pore_volumes = 0.0;
    CHECK_FALSE(c.valid());
    CHECK(TransportConfig{}.cell_size() == doctest::Approx(0.01).epsilon(1e-15));
}

}  // TEST_SUITE
