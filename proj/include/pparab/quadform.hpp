#pragma once

#include <array>
#include <optional>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "pparab/params.hpp"

namespace pparab {

/// Multipliers of w1 GD1(p-2+s) + w2 GD2(p-2+s) + eps w3 GD1(p-4+s) + eps w4 GD2(p-4+s).
struct Weights {
    double w1 = 0.0;
    double w2 = 0.0;
    double w3 = 0.0;
    double w4 = 0.0;

    double max_abs() const;
    bool operator==(const Weights&) const = default;
};

struct CoefficientSet {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    double theta = 1.0;
    double kappa = 0.0;
    double p_theta = 1.0;
};

/// Symmetric 2x2 form acting on (Delta_T u, Delta_inf^N u).
struct SymForm2 {
    double m11 = 0.0;
    double m12 = 0.0;
    double m22 = 0.0;

    double det() const { return m11 * m22 - m12 * m12; }
    double frob() const;
    double eval(double a, double b) const { return m11 * a * a + 2.0 * m12 * a * b + m22 * b * b; }
};

/// c1..c4 at the given theta. Throws RangeError("theta") outside [0,1].
CoefficientSet coefficients(const Weights& w, const Params& params, double theta);

SymForm2 matrix_M_smooth(int n, double p, double gamma, double s, double w1, double w2);

/// Form left after bounding c1|D2u|^2 from below by the fundamental inequality in dimension n.
/// In the plane m11 = c3; in general m11 = c3 - (n-2)/(n-1) c1.
SymForm2 matrix_M_regularized(const CoefficientSet& c, int n = 2);

/// Form R of the equation-substituted weighted sum. M_regularized(c, 2) - N(c) = c1 I.
SymForm2 matrix_N(const CoefficientSet& c);

/// Off-diagonal numerator c3 P + (c3+c4) - (2c1+c2) at s = 2-p, as a2 k^2 + a1 k + a0.
struct MixedPoly {
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;
};
MixedPoly mixed_term_poly(const Weights& w, double p, double gamma);

/// 4 > (sqrt(p-1) - sqrt(1-gamma))^2 with gamma < 1.
bool case_i_admissible(double p, double gamma);

/// (p - gamma - 2 sqrt((p-1)(1-gamma)) + eta, 2, 0, 0). Throws RangeError when
/// gamma >= 1, eta <= 0 or sup X1 + eta >= inf X2.
Weights weights_case_i(double p, double gamma, double eta);

/// (p - gamma, 2, 4 - p + gamma, 2). Throws RangeError when gamma >= sqrt(2) - 1/2.
Weights weights_case_ii(double p, double gamma);

/// Same formula without the range check.
Weights weights_case_ii_unchecked(double p, double gamma);

/// Explicit weights for the unregularized problem. Throws RangeError off the range condition.
Weights weights_smooth(int n, double p, double gamma, double s);

struct AppendixRoots {
    double root_plus = 0.0;
    double root_minus = 0.0;  ///< +inf when G == P
    double discriminant = 0.0;
    double P = 0.0, K = 0.0, G = 0.0, E = 0.0;
};
AppendixRoots appendix_roots(int n, double p, double gamma, double s);

struct X1X2Bounds {
    double sup_x1 = 0.0;
    double inf_x2 = 0.0;
    std::optional<double> theta2;
};
X1X2Bounds x1x2_bounds(double p, double gamma);

struct CertReport {
    bool ok = false;
    double floor = 0.0;     ///< requested floor
    double floor_c = 0.0;   ///< certified uniform lower bound
    double lambda = 0.0;
    double min_2c1_c2 = 0.0;
    double min_c3 = 0.0;
    double min_detM = 0.0;
    double min_m11 = 0.0;
    double min_c3c4 = 0.0;
    double min_c1 = 0.0;
    std::array<double, 4> argmin_theta{};  ///< for 2c1+c2, c3, det M, m11
    double argmin_c3c4 = 0.0;
    double norm_M = 0.0;
    double norm_N = 0.0;
    double norm_c2 = 0.0;
};

/// 1e-6 max(1, |w|_inf)
double default_floor(const Weights& w);

/// Uniform-in-theta Sylvester check of the regularized form on [0,1].
/// The weight exponent is params.s; params.n selects the fundamental-inequality constant.
CertReport certify_uniform(const Weights& w, const Params& params, double floor,
                           int grid_points = 4097);

/// 1/2 min{1, c/(|c2| + c), c/(|N| + |M|), c/(4 (|M| + |N|)^2)}. Requires c > 0.
double lambda_select(double floor_c, double norm_M, double norm_N, double norm_c2);

/// Coefficient of the single second derivative when n = 1.
double one_dim_coefficient(double p, double gamma, double s, double theta);

struct RegionRow {
    double p = 0.0;
    double gamma = 0.0;
    TheoremCase theorem_case = TheoremCase::Neither;
    bool case_i_ok = false;
    double case_i_min_det = 0.0;
    bool case_ii_ok = false;
    double case_ii_min_c3c4 = 0.0;
    bool smooth_range_ok = false;
};

/// Sweep over (p, gamma). When `s` is empty each row uses s = 2 - p.
/// A non-positive `floor` selects default_floor of each weight vector.
std::vector<RegionRow> region_map(const std::vector<double>& p_grid,
                                  const std::vector<double>& gamma_grid,
                                  std::optional<double> s = std::nullopt, double floor = 0.0,
                                  double eta = 0.05);

void write_region_csv(std::ostream& os, const std::vector<RegionRow>& rows);

void to_json(nlohmann::json& j, const Weights& w);
void from_json(const nlohmann::json& j, Weights& w);
void to_json(nlohmann::json& j, const CertReport& r);

} // namespace pparab
