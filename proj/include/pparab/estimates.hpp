#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"
#include "pparab/diffops.hpp"
#include "pparab/params.hpp"
#include "pparab/quadform.hpp"
#include "pparab/solver.hpp"

namespace pparab {

/// Q_r = B_r(x0,y0) x (t0 - r^2, t0].
struct CylinderSpec {
    double x0 = 0.5;
    double y0 = 0.5;
    double t0 = 0.0;
    double r = 0.1;
};

struct Cutoff {
    double phi = 0.0;
    Vec2 dphi{};
    double phi_t = 0.0;
};

/// C^1 cubic ramps in |x - x0|/r and (t0 - t)/r^2. |r Dphi| <= 3/2, |r^2 phi_t| <= 1/2.
Cutoff cutoff(double x, double y, double t, const CylinderSpec& spec);

/// A smooth function of (x, y, t) given with its derivatives.
struct AnalyticField {
    std::function<double(double, double, double)> u;
    std::function<double(double, double, double)> ut;
    std::function<Vec2(double, double, double)> du;
    std::function<Sym2(double, double, double)> d2u;
};

enum class Structure { GD1, GD2 };

struct Box {
    double ax = 0.2, bx = 1.2, ay = 0.2, by = 1.2;
};

/// Pointwise left sides of the two hidden divergence identities.
double gd1_lhs(const DerivativeBundle& b, double alpha);
double gd2_lhs(const DerivativeBundle& b, double ut, double beta);

/// Max over the nodes of `box` (spacing h) of |algebraic side - divergence side|, where the
/// divergence and time derivative are central differences with step h of the analytic flux.
/// GD2 uses the logarithm when beta = -2. Requires params.epsilon > 0.
double divergence_structure_residual(const AnalyticField& field, const Params& params,
                                     Structure which, double alpha_or_beta, double h,
                                     const Box& box = {}, double t = 0.5);

/// Weighted sum of good structures. Without `ut` the equation has been used to remove time
/// derivatives; with `ut` the four structures are summed directly.
double S_pointwise(const DerivativeBundle& bundle, std::optional<double> ut, const Weights& w,
                   const Params& params);

struct KeyInequalityReport {
    double violation_fraction = 0.0;
    double worst_margin = 0.0;  ///< min of (S - lhs)/scale
    std::size_t nodes = 0;
    std::size_t violations = 0;
};

/// Checks lambda (|Du|^2+eps)^{(p-2+s)/2}|D2u|^2 <= S + tol*scale on every interior node of
/// every slice.
KeyInequalityReport key_inequality_report(const Trajectory& traj, const Weights& w, double lambda,
                                          const Params& params, double tol = 1e-8);

struct EstimateReport {
    double lhs = 0.0;
    double rhs_grad = 0.0;
    double rhs_power = 0.0;
    double log_bulk = 0.0;
    double log_slice = 0.0;
    double c_emp = 0.0;
    double ut_l2 = 0.0;
    double d2u_l2 = 0.0;
    double sup_v_gamma = 0.0;     ///< sup over Q_r of (|Du|^2+eps)^gamma
    double corollary_bound = 0.0; ///< (p+2)^2 sup_v_gamma d2u_l2
    bool corollary_ok = false;
    bool log_terms = false;
};

/// Midpoint quadrature on the node/checkpoint lattice. u_t is the backward difference of
/// slices. Throws RangeError for s = gamma - p or a cylinder outside the data.
EstimateReport estimate_report(const Trajectory& traj, const Params& params,
                               const CylinderSpec& spec, double s);

struct ThresholdRow {
    double s = 0.0;
    double exponent = 0.0;
    bool integrable = false;          ///< exponent > -1
    bool numeric_integrable = false;  ///< dyadic-shell partial sums converge
    double partial_sum = 0.0;
};

std::vector<ThresholdRow> sobolev_threshold_scan(double p, double gamma,
                                                 const std::vector<double>& s_list);

void to_json(nlohmann::json& j, const EstimateReport& r);
void to_json(nlohmann::json& j, const KeyInequalityReport& r);
void to_json(nlohmann::json& j, const ThresholdRow& r);

} // namespace pparab
