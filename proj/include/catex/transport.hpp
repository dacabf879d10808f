#pragma once

#include <vector>

#include "catex/geochem.hpp"

namespace catex {

// 1D saturated column discretized into equal cells; advection only (no
// dispersion), first-order explicit upwind differencing.
struct TransportConfig {
    int n_cells = 100;
    double length = 1.0;             // m
    double darcy_velocity = 2.78e-7; // m/s
    double porosity = 1.0;           // -
    double cfl = 0.9;                // Courant number in (0, 1]
    double total_pore_volumes = 3.0; // rollout duration

    double cell_size() const { return length / n_cells; }
    bool valid() const;
};

// Largest stable explicit time step: cfl * dx * porosity / darcy_velocity.
// Throws InvalidInput for an invalid config.
double stable_dt(const TransportConfig& config);

// Fraction of one pore volume that flows through the column per step of
// stable_dt: cfl / n_cells.
double pore_volumes_per_step(const TransportConfig& config);

// Number of advection steps needed to push total_pore_volumes through the
// column (rounded up, with a guard against float fuzz at exact multiples).
int steps_for_pore_volumes(const TransportConfig& config);

// One upwind step over every species: c_i <- (1 - nu) * c_i + nu * c_{i-1},
// where cell -1 is the inflow stream and nu is the Courant number. Modifies
// the cells in place. Throws CflViolation unless 0 <= nu <= 1 (nu = 0 is the
// degenerate no-flow step and leaves the cells untouched).
void advect_step(std::vector<AqueousSolution>& cells, const AqueousSolution& inflow,
                 double nu);

}  // namespace catex
