#include "catex/transport.hpp"

#include <cmath>

#include "catex/errors.hpp"

namespace catex {

bool TransportConfig::valid() const {
    // darcy_velocity 0 is allowed as a degenerate no-flow column
    return n_cells > 0 && std::isfinite(length) && length > 0.0 &&
           std::isfinite(darcy_velocity) && darcy_velocity >= 0.0 && std::isfinite(porosity) &&
           porosity > 0.0 && porosity <= 1.0 && std::isfinite(cfl) && cfl > 0.0 && cfl <= 1.0 &&
           std::isfinite(total_pore_volumes) && total_pore_volumes > 0.0;
}

double stable_dt(const TransportConfig& config) {
    if (!config.valid()) throw InvalidInput("stable_dt: invalid transport config");
    if (config.darcy_velocity == 0.0)
        throw InvalidInput("stable_dt: zero velocity has no finite stable step");
    return config.cfl * config.cell_size() * config.porosity / config.darcy_velocity;
}

double pore_volumes_per_step(const TransportConfig& config) {
    if (!config.valid()) throw InvalidInput("pore_volumes_per_step: invalid transport config");
    return config.cfl / config.n_cells;
}

int steps_for_pore_volumes(const TransportConfig& config) {
    double per_step = pore_volumes_per_step(config);
    return static_cast<int>(std::ceil(config.total_pore_volumes / per_step - 1e-9));
}

void advect_step(std::vector<AqueousSolution>& cells, const AqueousSolution& inflow,
                 double nu) {
    if (!(nu >= 0.0) || !(nu <= 1.0))
        throw CflViolation("advect_step: Courant number outside [0, 1]");
    if (cells.empty() || nu == 0.0) return;
    const double keep = 1.0 - nu;
    // carry each cell's pre-step value forward so cell i reads the old c_{i-1}
    AqueousSolution upstream = inflow;
    for (auto& cell : cells) {
        AqueousSolution prev = cell;
        cell.na = keep * cell.na + nu * upstream.na;
        cell.k = keep * cell.k + nu * upstream.k;
        cell.ca = keep * cell.ca + nu * upstream.ca;
        cell.cl = keep * cell.cl + nu * upstream.cl;
        cell.no3 = keep * cell.no3 + nu * upstream.no3;
        upstream = prev;
    }
}

}  // namespace catex
