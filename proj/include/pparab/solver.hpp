#pragma once

#include <functional>
#include <vector>

#include "pparab/diffops.hpp"
#include "pparab/field.hpp"
#include "pparab/params.hpp"

namespace pparab {

/// Dirichlet data g(x, y, t).
using BoundaryFn = std::function<double(double, double, double)>;

struct SolveConfig {
    Grid2 grid;
    double t0 = 0.0;
    double t_end = 0.1;
    double cfl = 0.2;
    Params params;                    ///< params.epsilon must be positive
    int checkpoints = 11;             ///< uniform outputs including t0 and t_end
    std::vector<double> output_times; ///< overrides `checkpoints` when non-empty
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ScalarField> slices;

    std::size_t size() const { return times.size(); }
};

/// (|Du|^2+eps)^{gamma/2} (Delta u + (p-2) Delta_inf u / (|Du|^2+eps))
double regularized_operator(const DerivativeBundle& b, const Params& params);

/// u(x1, t) = C t + |x1|^alpha, a solution of the unregularized equation off x1 = 0.
struct Counterexample {
    double p = 2.0;
    double gamma = 0.0;
    double alpha = 2.0;
    double C = 0.0;

    double u(double x1, double t) const;
    double u_t() const { return C; }
    double u_x(double x1) const;
    double u_xx(double x1) const;
    /// u_t - |Du|^gamma (Delta u + (p-2) Delta_inf^N u); needs x1 != 0.
    double residual(double x1) const;
};

Counterexample exact_counterexample(double p, double gamma);

/// Largest explicit step allowed by cfl min(hx,hy)^2 / max((|Du|^2+eps)^{gamma/2} max(1,p-1)).
double stable_dt(const ScalarField& slice, const Params& params, double cfl);

/// One explicit Euler step from time t to t + dt. Throws BlowupError on non-finite output.
ScalarField step(const ScalarField& slice, const BoundaryFn& boundary, const Params& params,
                 double dt, double t = 0.0);

Trajectory solve(const ScalarField& initial, const BoundaryFn& boundary, const SolveConfig& config);

struct PdeResidual {
    ScalarField residual;  ///< (u^k - u^{k-1})/dt - operator(u^k), zero on the boundary
    ScalarField ratio;     ///< |u_t| / ((p+2)(|Du|^2+eps)^{gamma/2}|D2u| + 1e-30)
};

/// Throws IndexError unless 1 <= k < traj.size().
PdeResidual pde_residual(const Trajectory& traj, const Params& params, std::size_t k);

} // namespace pparab
