#pragma once

#include <stdexcept>

#include "mcnls/grid.hpp"
#include "mcnls/symmetry.hpp"

namespace mcnls {

/// Converged solution of Delta Q + Q^{1+4/d} = Q (real, positive, radial).
struct GroundState {
    Field field;
    double residual = 0.0;  ///< L^2 norm of Delta Q + Q^{1+4/d} - Q
    double mass = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;  ///< one entry per iteration
};

struct GroundStateError : std::runtime_error {
    double last_residual;
    GroundStateError(const std::string& what, double r)
        : std::runtime_error(what), last_residual(r) {}
};

/// Fixed-point iteration on the reproducing form Q = (-Delta+1)^{-1} Q^{1+4/d},
/// stabilized by the normalization factor
///   gamma = <(-Delta+1)Q, Q> / <Q^{1+4/d}, Q>
/// raised to alpha = (1+4/d)/(4/d).  Convergence is declared on the equation
/// residual.  Starts from a unit-height Gaussian unless an initial iterate is
/// supplied.
GroundState petviashvili_solve(const GridPtr& grid, double tol = 1e-10, int max_iter = 500,
                               const Field* initial = nullptr);

/// apply(g, Q.field), labeled so solver oracles know the exact orbit solution.
Field soliton_initial_data(const GroundState& q, const GroupElement& g);

/// Max relative mirror asymmetry of the samples under x -> -x (all axes).
double mirror_asymmetry(const Field& f);

}  // namespace mcnls
