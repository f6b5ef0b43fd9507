#include "pparab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "pparab/errors.hpp"

namespace pparab {

namespace {

// 1 on [0,1], 0 on [1+len, inf), cubic in between
double ramp(double x, double len, double* deriv)
{
    if (x <= 1.0) {
        *deriv = 0.0;
        return 1.0;
    }
    if (x >= 1.0 + len) {
        *deriv = 0.0;
        return 0.0;
    }
    const double t = (x - 1.0) / len;
    *deriv = (-6.0 * t + 6.0 * t * t) / len;
    return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

} // namespace

Cutoff cutoff(double x, double y, double t, const CylinderSpec& spec)
{
    Cutoff c;
    if (t > spec.t0)
        return c;
    const double r = spec.r;
    const double dx = x - spec.x0;
    const double dy = y - spec.y0;
    const double rho = std::hypot(dx, dy) / r;
    const double sigma = (spec.t0 - t) / (r * r);
    double dpsi = 0.0;
    double dchi = 0.0;
    const double psi = ramp(rho, 1.0, &dpsi);
    const double chi = ramp(sigma, 3.0, &dchi);
    c.phi = psi * chi;
    if (dpsi != 0.0) {
        const double dist = rho * r;
        c.dphi = {dpsi * chi * dx / (dist * r), dpsi * chi * dy / (dist * r)};
    }
    c.phi_t = -psi * dchi / (r * r);
    return c;
}

double gd1_lhs(const DerivativeBundle& b, double alpha)
{
    const double V = b.grad_sq_reg;
    const Vec2 hg = b.d2u.apply(b.du);
    const double hg2 = hg[0] * hg[0] + hg[1] * hg[1];
    return std::pow(V, 0.5 * alpha) *
           (b.hess_sq() - b.lap * b.lap + alpha * hg2 / V - alpha * b.lap * b.inf_lap / V);
}

double gd2_lhs(const DerivativeBundle& b, double ut, double beta)
{
    const double V = b.grad_sq_reg;
    return ut * std::pow(V, 0.5 * beta) * (b.lap + beta * b.inf_lap / V);
}

double divergence_structure_residual(const AnalyticField& f, const Params& params,
                                     Structure which, double ab, double h, const Box& box,
                                     double t)
{
    if (!(params.epsilon > 0.0))
        throw RangeError("epsilon", "divergence residual needs epsilon > 0");
    if (!(h > 0.0))
        throw RangeError("h", "h must be positive");
    const double eps = params.epsilon;
    const bool log_branch = std::abs(ab + 2.0) < 1e-14;

    auto V = [&](double x, double y, double tt) {
        const Vec2 g = f.du(x, y, tt);
        return g[0] * g[0] + g[1] * g[1] + eps;
    };
    auto flux = [&](double x, double y) -> Vec2 {
        const Vec2 g = f.du(x, y, t);
        const double w = std::pow(V(x, y, t), 0.5 * ab);
        if (which == Structure::GD1) {
            const Sym2 H = f.d2u(x, y, t);
            const Vec2 hg = H.apply(g);
            const double lap = H.trace();
            return {w * (hg[0] - lap * g[0]), w * (hg[1] - lap * g[1])};
        }
        const double ut = f.ut(x, y, t);
        return {ut * w * g[0], ut * w * g[1]};
    };
    auto potential = [&](double x, double y, double tt) {
        const double v = V(x, y, tt);
        return log_branch ? 0.5 * std::log(v) : std::pow(v, 0.5 * (ab + 2.0)) / (ab + 2.0);
    };

    const int nx = static_cast<int>(std::lround((box.bx - box.ax) / h)) + 1;
    const int ny = static_cast<int>(std::lround((box.by - box.ay) / h)) + 1;
    double worst = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double x = box.ax + i * h;
            const double y = box.ay + j * h;
            const auto b = make_bundle(f.du(x, y, t), f.d2u(x, y, t), params);
            double lhs;
            double rhs = (flux(x + h, y)[0] - flux(x - h, y)[0]) / (2.0 * h) +
                         (flux(x, y + h)[1] - flux(x, y - h)[1]) / (2.0 * h);
            if (which == Structure::GD1) {
                lhs = gd1_lhs(b, ab);
            } else {
                lhs = gd2_lhs(b, f.ut(x, y, t), ab);
                rhs -= (potential(x, y, t + h) - potential(x, y, t - h)) / (2.0 * h);
            }
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

double S_pointwise(const DerivativeBundle& b, std::optional<double> ut, const Weights& w,
                   const Params& params)
{
    const double p = params.p;
    const double s = params.s;
    const double g = params.gamma;
    if (ut) {
        double out = w.w1 * gd1_lhs(b, p - 2.0 + s) + w.w2 * gd2_lhs(b, *ut, p - 2.0 + s - g);
        if (params.epsilon > 0.0)
            out += params.epsilon * (w.w3 * gd1_lhs(b, p - 4.0 + s) +
                                     w.w4 * gd2_lhs(b, *ut, p - 4.0 + s - g));
        return out;
    }
    const auto c = coefficients(w, params, b.theta);
    const auto N = matrix_N(c);
    return std::pow(b.grad_sq_reg, 0.5 * (p - 2.0 + s)) *
           (c.c1 * b.hess_sq() + c.c2 * b.dt_grad_sq + N.eval(b.delta_t, b.inf_lap_norm));
}

KeyInequalityReport key_inequality_report(const Trajectory& traj, const Weights& w, double lambda,
                                          const Params& params, double tol)
{
    KeyInequalityReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const double wscale = std::max(1.0, w.max_abs());
    const double e = params.p - 2.0 + params.s;
    for (const auto& slice : traj.slices) {
        const Grid2& g = slice.grid;
        for (int j = 1; j < g.ny - 1; ++j)
            for (int i = 1; i < g.nx - 1; ++i) {
                const auto b = derivative_bundle(slice, params, i, j);
                const double weight = std::pow(b.grad_sq_reg, 0.5 * e);
                const double lhs = lambda * weight * b.hess_sq();
                const double S = S_pointwise(b, std::nullopt, w, params);
                const double scale = weight *
                                     (b.hess_sq() + b.delta_t * b.delta_t +
                                      b.inf_lap_norm * b.inf_lap_norm + b.dt_grad_sq) *
                                     wscale;
                ++rep.nodes;
                if (lhs > S + tol * scale)
                    ++rep.violations;
                const double margin = scale > 0.0 ? (S - lhs) / scale : S - lhs;
                rep.worst_margin = std::min(rep.worst_margin, margin);
            }
    }
    if (rep.nodes == 0)
        rep.worst_margin = 0.0;
    else
        rep.violation_fraction = static_cast<double>(rep.violations) / rep.nodes;
    return rep;
}

EstimateReport estimate_report(const Trajectory& traj, const Params& params,
                               const CylinderSpec& spec, double s)
{
    const double p = params.p;
    const double gamma = params.gamma;
    const double eps = params.epsilon;
    if (std::abs(s - (gamma - p)) < 1e-12)
        throw RangeError("s", "s = gamma - p is excluded");
    if (!(spec.r > 0.0))
        throw RangeError("r", "cylinder radius must be positive");
    if (traj.size() < 2)
        throw RangeError("trajectory", "need at least two slices");
    const Grid2& g = traj.slices.front().grid;
    const double r = spec.r;
    const double xmax = g.x(g.nx - 1);
    const double ymax = g.y(g.ny - 1);
    if (spec.x0 - 2 * r < g.x0 || spec.x0 + 2 * r > xmax || spec.y0 - 2 * r < g.y0 ||
        spec.y0 + 2 * r > ymax)
        throw RangeError("cylinder", "B_2r leaves the computational domain");
    const double tiny = 1e-12 * std::max(1.0, std::abs(spec.t0));
    if (spec.t0 - 4 * r * r < traj.times.front() - tiny || spec.t0 > traj.times.back() + tiny)
        throw RangeError("cylinder", "trajectory does not cover (t0 - 4r^2, t0]");

    EstimateReport rep;
    rep.log_terms = std::abs(s - (gamma - p + 2.0)) < 1e-12;
    Params ps = params;
    ps.s = s;
    const double area = g.hx * g.hy;
    const double e = p - 2.0 + s;

    // slice closest to t0 for the terminal log integral
    std::size_t k_top = 0;
    for (std::size_t k = 0; k < traj.size(); ++k)
        if (std::abs(traj.times[k] - spec.t0) < std::abs(traj.times[k_top] - spec.t0))
            k_top = k;

    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double t = traj.times[k];
        const double dt = t - traj.times[k - 1];
        const bool in2 = t > spec.t0 - 4 * r * r + tiny && t <= spec.t0 + tiny;
        const bool in1 = t > spec.t0 - r * r + tiny && t <= spec.t0 + tiny;
        if (!in2 && k != k_top)
            continue;
        const ScalarField& u = traj.slices[k];
        const ScalarField& uprev = traj.slices[k - 1];
        for (int j = 1; j < g.ny - 1; ++j)
            for (int i = 1; i < g.nx - 1; ++i) {
                const double dist = std::hypot(g.x(i) - spec.x0, g.y(j) - spec.y0);
                if (dist >= 2 * r)
                    continue;
                const auto b = derivative_bundle(u, ps, i, j);
                const double V = b.grad_sq_reg;
                if (in2) {
                    const double w = dt * area;
                    rep.rhs_grad += w * std::pow(V, 0.5 * e) * b.grad_sq();
                    rep.rhs_power += w * std::pow(V, 0.5 * (p + s - gamma));
                    if (rep.log_terms)
                        rep.log_bulk += w * std::abs(std::log(V));
                    if (in1 && dist < r) {
                        rep.lhs += w * flux_gradient_sq(b, ps).lhs;
                        const double ut = (u.at(i, j) - uprev.at(i, j)) / dt;
                        rep.ut_l2 += w * ut * ut;
                        rep.d2u_l2 += w * b.hess_sq();
                        rep.sup_v_gamma = std::max(rep.sup_v_gamma, std::pow(V, gamma));
                    }
                }
                if (k == k_top && rep.log_terms)
                    rep.log_slice += area * std::abs(std::log(V));
            }
    }
    const double denom =
        (rep.rhs_grad + rep.rhs_power) / (r * r) + eps * (rep.log_bulk / (r * r) + rep.log_slice);
    rep.c_emp = rep.lhs == 0.0 ? 0.0 : rep.lhs / denom;
    const double pp = (p + 2.0) * (p + 2.0);
    rep.corollary_bound = pp * rep.sup_v_gamma * rep.d2u_l2;
    rep.corollary_ok = rep.ut_l2 <= rep.corollary_bound * (1.0 + 1e-12) + 1e-300;
    return rep;
}

std::vector<ThresholdRow> sobolev_threshold_scan(double p, double gamma,
                                                 const std::vector<double>& s_list)
{
    validate(Params{1, p, gamma, 0.0, 0.0});
    using boost::math::quadrature::gauss;
    std::vector<ThresholdRow> rows;
    for (double s : s_list) {
        ThresholdRow row;
        row.s = s;
        row.exponent = 2.0 * ((p + s) / (2.0 * (gamma + 1.0)) - 1.0);
        row.integrable = row.exponent > -1.0;
        const double e = row.exponent;
        // shell [a, 2a] with x = a e^u, u in [0, ln 2]
        std::vector<double> inc;
        for (int k = 1; k <= 12; ++k) {
            const double a = std::ldexp(1.0, -k - 1);
            auto f = [&](double u) { return std::pow(a * std::exp(u), e + 1.0); };
            inc.push_back(gauss<double, 10>::integrate(f, 0.0, std::log(2.0)));
        }
        double sum = 0.0;
        for (double v : inc)
            sum += v;
        row.partial_sum = sum;
        const double ratio = inc[inc.size() - 1] / inc[inc.size() - 2];
        row.numeric_integrable = ratio < 1.0 - 1e-10;
        rows.push_back(row);
    }
    return rows;
}

void to_json(nlohmann::json& j, const EstimateReport& r)
{
    j = nlohmann::json{{"lhs", r.lhs},
                       {"rhs_grad", r.rhs_grad},
                       {"rhs_power", r.rhs_power},
                       {"log_bulk", r.log_bulk},
                       {"log_slice", r.log_slice},
                       {"c_emp", r.c_emp},
                       {"ut_l2", r.ut_l2},
                       {"d2u_l2", r.d2u_l2},
                       {"sup_v_gamma", r.sup_v_gamma},
                       {"corollary_bound", r.corollary_bound},
                       {"corollary_ok", r.corollary_ok},
                       {"log_terms", r.log_terms}};
}

void to_json(nlohmann::json& j, const KeyInequalityReport& r)
{
    j = nlohmann::json{{"violation_fraction", r.violation_fraction},
                       {"worst_margin", r.worst_margin},
                       {"nodes", r.nodes},
                       {"violations", r.violations}};
}

void to_json(nlohmann::json& j, const ThresholdRow& r)
{
    j = nlohmann::json{{"s", r.s},
                       {"exponent", r.exponent},
                       {"integrable", r.integrable},
                       {"numeric_integrable", r.numeric_integrable},
                       {"partial_sum", r.partial_sum}};
}

} // namespace pparab
