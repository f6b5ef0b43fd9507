#pragma once

#include <array>
#include <span>
#include <utility>

#include "pparab/field.hpp"
#include "pparab/params.hpp"

namespace pparab {

using Vec2 = std::array<double, 2>;

/// Symmetric 2x2 matrix stored as (xx, xy, yy).
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    double trace() const { return xx + yy; }
    double frob_sq() const { return xx * xx + 2.0 * xy * xy + yy * yy; }
    Vec2 apply(const Vec2& v) const { return {xx * v[0] + xy * v[1], xy * v[0] + yy * v[1]}; }
};

/// Gradient squared below this is treated as a critical point.
inline constexpr double kZeroGradSq = 1e-30;

/// Pointwise first and second order quantities of u at one node.
struct DerivativeBundle {
    Vec2 du{};
    Sym2 d2u{};
    double lap = 0.0;
    double inf_lap = 0.0;       ///< <Du, D2u Du>
    double grad_sq_reg = 0.0;   ///< |Du|^2 + eps
    double theta = 1.0;
    double kappa = 0.0;
    double p_theta = 1.0;       ///< (p-2) theta + 1
    double inf_lap_norm = 0.0;  ///< normalized infinity Laplacian, 0 at critical points
    double dt_grad_sq = 0.0;    ///< |D_T |Du||^2, 0 at critical points
    double delta_t = 0.0;       ///< lap - inf_lap_norm

    double grad_sq() const { return du[0] * du[0] + du[1] * du[1]; }
    double hess_sq() const { return d2u.frob_sq(); }
};

/// Assemble all derived quantities from Du and D2u.
DerivativeBundle make_bundle(const Vec2& du, const Sym2& d2u, const Params& params);

/// Central second order differences at an interior node. Throws BoundaryError otherwise.
DerivativeBundle derivative_bundle(const ScalarField& field, const Params& params, int i, int j);

/// Just the stencil values (Du, D2u) at an interior node.
std::pair<Vec2, Sym2> central_derivatives(const ScalarField& field, int i, int j);

/// |H|^2 - 2|D_T|g||^2 - (Delta_T)^2/(n-1) - (Delta_inf^N)^2 for an n-vector g and a
/// symmetric row-major n x n matrix H. Throws ZeroGradient for g = 0, RangeError for n < 2.
double fundamental_gap(std::span<const double> g, std::span<const double> H, int n);

struct FluxGradient {
    double lhs = 0.0;  ///< |D((|Du|^2+eps)^{(p-2+s)/4} Du)|^2
    double rhs = 0.0;  ///< (|Du|^2+eps)^{(p-2+s)/2} |D2u|^2
};

FluxGradient flux_gradient_sq(const DerivativeBundle& bundle, const Params& params);

/// 2(1 + ((p-2+s)/2)^2)
double flux_gradient_constant(double p, double s);

} // namespace pparab
