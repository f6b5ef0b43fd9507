#include "pparab/diffops.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pparab/errors.hpp"

namespace pparab {

DerivativeBundle make_bundle(const Vec2& du, const Sym2& d2u, const Params& params)
{
    DerivativeBundle b;
    b.du = du;
    b.d2u = d2u;
    b.lap = d2u.trace();

    const Vec2 hg = d2u.apply(du);
    const double g2 = b.grad_sq();
    b.inf_lap = du[0] * hg[0] + du[1] * hg[1];
    b.grad_sq_reg = g2 + params.epsilon;

    if (params.epsilon > 0.0) {
        b.theta = g2 / b.grad_sq_reg;
        b.kappa = params.epsilon / b.grad_sq_reg;
    } else {
        b.theta = 1.0;
        b.kappa = 0.0;
    }
    b.p_theta = (params.p - 2.0) * b.theta + 1.0;

    if (g2 >= kZeroGradSq) {
        const double g = std::sqrt(g2);
        const Vec2 en{du[0] / g, du[1] / g};
        const Vec2 et{-en[1], en[0]};
        const Vec2 hen = d2u.apply(en);
        b.inf_lap_norm = en[0] * hen[0] + en[1] * hen[1];
        // in the plane D_T|Du| has the single component <e_T, D2u e_N>
        const double tn = et[0] * hen[0] + et[1] * hen[1];
        b.dt_grad_sq = tn * tn;
    }
    b.delta_t = b.lap - b.inf_lap_norm;
    return b;
}

std::pair<Vec2, Sym2> central_derivatives(const ScalarField& f, int i, int j)
{
    if (!f.grid.interior(i, j))
        throw BoundaryError("node (" + std::to_string(i) + "," + std::to_string(j) +
                            ") is not interior");
    const double hx = f.grid.hx;
    const double hy = f.grid.hy;
    const double c = f.at(i, j);
    Vec2 du{(f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * hx),
            (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * hy)};
    Sym2 h;
    h.xx = (f.at(i + 1, j) - 2.0 * c + f.at(i - 1, j)) / (hx * hx);
    h.yy = (f.at(i, j + 1) - 2.0 * c + f.at(i, j - 1)) / (hy * hy);
    h.xy = (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) - f.at(i - 1, j + 1) + f.at(i - 1, j - 1)) /
           (4.0 * hx * hy);
    return {du, h};
}

DerivativeBundle derivative_bundle(const ScalarField& field, const Params& params, int i, int j)
{
    auto [du, h] = central_derivatives(field, i, j);
    return make_bundle(du, h, params);
}

double fundamental_gap(std::span<const double> g, std::span<const double> H, int n)
{
    if (n < 2)
        throw RangeError("n", "fundamental inequality needs n >= 2");
    const auto un = static_cast<std::size_t>(n);
    if (g.size() < un || H.size() < un * un)
        throw RangeError("n", "input sizes do not match n");

    double g2 = 0.0;
    for (std::size_t k = 0; k < un; ++k)
        g2 += g[k] * g[k];
    if (!(g2 > 0.0))
        throw ZeroGradient("fundamental_gap: g = 0");

    std::vector<double> hg(un, 0.0);
    double h2 = 0.0;
    double tr = 0.0;
    for (std::size_t r = 0; r < un; ++r) {
        tr += H[r * un + r];
        for (std::size_t c = 0; c < un; ++c) {
            hg[r] += H[r * un + c] * g[c];
            h2 += H[r * un + c] * H[r * un + c];
        }
    }
    double ghg = 0.0;
    double hg2 = 0.0;
    for (std::size_t k = 0; k < un; ++k) {
        ghg += g[k] * hg[k];
        hg2 += hg[k] * hg[k];
    }
    const double ninf = ghg / g2;
    const double dt = hg2 / g2 - ninf * ninf;
    const double delta_t = tr - ninf;
    return h2 - 2.0 * dt - delta_t * delta_t / (n - 1) - ninf * ninf;
}

FluxGradient flux_gradient_sq(const DerivativeBundle& b, const Params& params)
{
    const double e = params.p - 2.0 + params.s;
    const double V = b.grad_sq_reg;
    const double w = std::pow(V, e / 2.0);
    const double h2 = b.hess_sq();
    const Vec2 hg = b.d2u.apply(b.du);
    const double hg2 = hg[0] * hg[0] + hg[1] * hg[1];
    const double g2 = b.grad_sq();

    FluxGradient out;
    out.rhs = w * h2;
    if (e == 0.0) {
        out.lhs = out.rhs;
        return out;
    }
    // D(V^{e/4} Du) = V^{e/4} (D2u + c Du (x) D2u Du), c = (e/2)/V
    const double c = 0.5 * e / V;
    out.lhs = w * (h2 + 2.0 * c * hg2 + c * c * g2 * hg2);
    return out;
}

double flux_gradient_constant(double p, double s)
{
    const double a = 0.5 * (p - 2.0 + s);
    return 2.0 * (1.0 + a * a);
}

} // namespace pparab
