#include "pparab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pparab/errors.hpp"

namespace pparab {

double regularized_operator(const DerivativeBundle& b, const Params& params)
{
    const double V = b.grad_sq_reg;
    if (!(V > 0.0)) {
        // unregularized critical point: only the gamma = 0 operator has a value
        return params.gamma == 0.0 ? b.lap : params.gamma > 0.0 ? 0.0
                                                                 : std::numeric_limits<double>::quiet_NaN();
    }
    return std::pow(V, 0.5 * params.gamma) * (b.lap + (params.p - 2.0) * b.inf_lap / V);
}

double Counterexample::u(double x1, double t) const
{
    return C * t + std::pow(std::abs(x1), alpha);
}

double Counterexample::u_x(double x1) const
{
    const double a = std::abs(x1);
    return (x1 < 0.0 ? -1.0 : 1.0) * alpha * std::pow(a, alpha - 1.0);
}

double Counterexample::u_xx(double x1) const
{
    return alpha * (alpha - 1.0) * std::pow(std::abs(x1), alpha - 2.0);
}

double Counterexample::residual(double x1) const
{
    // Du = (u_x, 0) so the normalized infinity Laplacian is u_xx
    const double ux = u_x(x1);
    const double uxx = u_xx(x1);
    return u_t() - std::pow(std::abs(ux), gamma) * (uxx + (p - 2.0) * uxx);
}

Counterexample exact_counterexample(double p, double gamma)
{
    validate(Params{1, p, gamma, 0.0, 0.0});
    Counterexample ce;
    ce.p = p;
    ce.gamma = gamma;
    ce.alpha = 1.0 + 1.0 / (gamma + 1.0);
    ce.C = std::pow(ce.alpha, gamma + 1.0) * (ce.alpha - 1.0) * (p - 1.0);
    return ce;
}

double stable_dt(const ScalarField& slice, const Params& params, double cfl)
{
    const Grid2& g = slice.grid;
    const double h = std::min(g.hx, g.hy);
    const double pf = std::max(1.0, params.p - 1.0);
    double dmax = 0.0;
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            auto [du, d2u] = central_derivatives(slice, i, j);
            const double V = du[0] * du[0] + du[1] * du[1] + params.epsilon;
            dmax = std::max(dmax, std::pow(V, 0.5 * params.gamma) * pf);
        }
    return cfl * h * h / dmax;
}

ScalarField step(const ScalarField& slice, const BoundaryFn& boundary, const Params& params,
                 double dt, double t)
{
    if (!(dt > 0.0))
        throw RangeError("dt", "time step must be positive");
    if (!(params.epsilon > 0.0))
        throw RangeError("epsilon", "the explicit solver needs epsilon > 0");
    const Grid2& g = slice.grid;
    ScalarField out(g);
    const double t_new = t + dt;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double v;
            if (g.interior(i, j))
                v = slice.at(i, j) +
                    dt * regularized_operator(derivative_bundle(slice, params, i, j), params);
            else
                v = boundary(g.x(i), g.y(j), t_new);
            if (!std::isfinite(v))
                throw BlowupError(t_new, "non-finite value at node (" + std::to_string(i) + "," +
                                             std::to_string(j) + ")");
            out.at(i, j) = v;
        }
    }
    return out;
}

namespace {

std::vector<double> output_schedule(const SolveConfig& c)
{
    if (!c.output_times.empty()) {
        std::vector<double> ts = c.output_times;
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        if (ts.front() < c.t0 || ts.back() > c.t_end)
            throw RangeError("output_times", "output times must lie in [t0, t_end]");
        return ts;
    }
    if (c.checkpoints < 2)
        throw RangeError("checkpoints", "need at least 2 checkpoints");
    std::vector<double> ts(c.checkpoints);
    for (int k = 0; k < c.checkpoints; ++k)
        ts[k] = c.t0 + (c.t_end - c.t0) * k / (c.checkpoints - 1);
    ts.back() = c.t_end;
    return ts;
}

} // namespace

Trajectory solve(const ScalarField& initial, const BoundaryFn& boundary, const SolveConfig& config)
{
    validate(config.params);
    validate(config.grid);
    if (!(config.params.epsilon > 0.0))
        throw RangeError("epsilon", "the explicit solver needs epsilon > 0");
    if (!(config.t_end > config.t0))
        throw RangeError("t_end", "t_end must exceed t0");
    if (!(config.cfl > 0.0 && config.cfl < 1.0))
        throw RangeError("cfl", "cfl must lie in (0,1)");
    if (!(initial.grid == config.grid))
        throw RangeError("grid", "initial field grid differs from config grid");

    const auto outputs = output_schedule(config);
    Trajectory traj;
    ScalarField u = initial;
    double t = config.t0;
    std::size_t next = 0;
    const double tiny = 1e-13 * std::max(1.0, std::abs(config.t_end));

    while (next < outputs.size() && outputs[next] <= t + tiny) {
        traj.times.push_back(outputs[next]);
        traj.slices.push_back(u);
        ++next;
    }
    while (next < outputs.size()) {
        double dt = stable_dt(u, config.params, config.cfl);
        const double target = outputs[next];
        bool land = false;
        if (t + dt >= target - tiny) {
            dt = target - t;
            land = true;
        }
        u = step(u, boundary, config.params, dt, t);
        t = land ? target : t + dt;
        while (next < outputs.size() && outputs[next] <= t + tiny) {
            traj.times.push_back(outputs[next]);
            traj.slices.push_back(u);
            ++next;
        }
    }
    return traj;
}

PdeResidual pde_residual(const Trajectory& traj, const Params& params, std::size_t k)
{
    if (k < 1 || k >= traj.size())
        throw IndexError("time index " + std::to_string(k) + " outside [1, " +
                         std::to_string(traj.size()) + ")");
    const ScalarField& cur = traj.slices[k];
    const ScalarField& prev = traj.slices[k - 1];
    const double dt = traj.times[k] - traj.times[k - 1];
    const Grid2& g = cur.grid;
    PdeResidual out{ScalarField(g), ScalarField(g)};
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const auto b = derivative_bundle(cur, params, i, j);
            const double ut = (cur.at(i, j) - prev.at(i, j)) / dt;
            out.residual.at(i, j) = ut - regularized_operator(b, params);
            const double bound = (params.p + 2.0) * std::pow(b.grad_sq_reg, 0.5 * params.gamma) *
                                 std::sqrt(b.hess_sq());
            out.ratio.at(i, j) = std::abs(ut) / (bound + 1e-30);
        }
    return out;
}

} // namespace pparab
