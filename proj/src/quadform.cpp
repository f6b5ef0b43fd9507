#include "pparab/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>

#include "pparab/errors.hpp"

namespace pparab {

double Weights::max_abs() const
{
    return std::max({std::abs(w1), std::abs(w2), std::abs(w3), std::abs(w4)});
}

double SymForm2::frob() const
{
    return std::sqrt(m11 * m11 + 2.0 * m12 * m12 + m22 * m22);
}

CoefficientSet coefficients(const Weights& w, const Params& params, double theta)
{
    if (!(theta >= 0.0 && theta <= 1.0))
        throw RangeError("theta", "theta must lie in [0,1]");
    const double p = params.p;
    const double s = params.s;
    const double g = params.gamma;
    CoefficientSet c;
    c.theta = theta;
    c.kappa = 1.0 - theta;
    c.p_theta = (p - 2.0) * theta + 1.0;
    c.c1 = w.w1 + w.w3 * c.kappa;
    c.c2 = (w.w1 * (p - 2.0 + s) + w.w3 * (p - 4.0 + s) * c.kappa) * theta;
    c.c3 = w.w2 + w.w4 * c.kappa;
    c.c4 = (w.w2 * (p - 2.0 + s - g) + w.w4 * (p - 4.0 + s - g) * c.kappa) * theta;
    return c;
}

SymForm2 matrix_M_smooth(int n, double p, double gamma, double s, double w1, double w2)
{
    if (n < 2)
        throw RangeError("n", "matrix_M_smooth requires n >= 2");
    SymForm2 m;
    m.m11 = w2 - (static_cast<double>(n - 2) / (n - 1)) * w1;
    m.m12 = 0.5 * (w2 * (2.0 * p - 2.0 + s - gamma) - w1 * (p + s));
    m.m22 = w2 * (p - 1.0) * (p - 1.0 + s - gamma);
    return m;
}

namespace {

double mixed_numerator(const CoefficientSet& c)
{
    return c.c3 * c.p_theta + (c.c3 + c.c4) - (2.0 * c.c1 + c.c2);
}

} // namespace

SymForm2 matrix_M_regularized(const CoefficientSet& c, int n)
{
    if (n < 2)
        throw RangeError("n", "matrix_M_regularized requires n >= 2");
    SymForm2 m;
    m.m11 = c.c3 - (static_cast<double>(n - 2) / (n - 1)) * c.c1;
    m.m12 = 0.5 * mixed_numerator(c);
    m.m22 = (c.c3 + c.c4) * c.p_theta;
    return m;
}

SymForm2 matrix_N(const CoefficientSet& c)
{
    SymForm2 m;
    m.m11 = c.c3 - c.c1;
    m.m12 = 0.5 * mixed_numerator(c);
    m.m22 = (c.c3 + c.c4) * c.p_theta - c.c1;
    return m;
}

MixedPoly mixed_term_poly(const Weights& w, double p, double gamma)
{
    MixedPoly m;
    m.a2 = (4.0 - p + gamma) * w.w4 - 2.0 * w.w3;
    m.a1 = (p - 2.0 - gamma) * (w.w4 - w.w2);
    m.a0 = (p - gamma) * w.w2 - 2.0 * w.w1;
    return m;
}

bool case_i_admissible(double p, double gamma)
{
    if (!(gamma < 1.0) || !(p > 1.0))
        return false;
    const double d = std::sqrt(p - 1.0) - std::sqrt(1.0 - gamma);
    return d * d < 4.0;
}

Weights weights_case_i(double p, double gamma, double eta)
{
    if (!(gamma < 1.0))
        throw RangeError("gamma", "case i weights need gamma < 1");
    if (!(eta > 0.0))
        throw RangeError("eta", "eta must be positive");
    const auto b = x1x2_bounds(p, gamma);
    if (!(b.sup_x1 + eta < b.inf_x2))
        throw RangeError("eta", "sup X1 + eta >= inf X2: no admissible w1");
    return {b.sup_x1 + eta, 2.0, 0.0, 0.0};
}

Weights weights_case_ii_unchecked(double p, double gamma)
{
    return {p - gamma, 2.0, 4.0 - p + gamma, 2.0};
}

Weights weights_case_ii(double p, double gamma)
{
    if (!(gamma < kCaseIIGammaBound))
        throw RangeError("gamma", "case ii weights need gamma < sqrt(2) - 1/2");
    return weights_case_ii_unchecked(p, gamma);
}

AppendixRoots appendix_roots(int n, double p, double gamma, double s)
{
    if (n < 2)
        throw RangeError("n", "appendix_roots requires n >= 2");
    AppendixRoots r;
    const double nm1 = n - 1.0;
    r.P = p - 1.0;
    r.K = gamma + 1.0;
    r.G = p - 1.0 + s - gamma;
    r.E = s + 1.0 + (p - 1.0) / nm1;
    if (!(r.P > 0.0))
        throw RangeError("p", "P = p - 1 must be positive");
    if (!(r.K > 0.0))
        throw RangeError("gamma", "K = gamma + 1 must be positive");
    if (!(r.G > 0.0))
        throw RangeError("s", "G = p - 1 + s - gamma must be positive");
    if (!(r.E > 0.0))
        throw RangeError("s", "E = s + 1 + (p-1)/(n-1) must be positive");

    const double B = r.G / nm1 + r.K;
    const double L = B - (n - 2.0) * r.P / nm1;
    const double sum = std::sqrt(r.P * r.E) + std::sqrt(r.G * B);
    r.discriminant = r.G * r.P * r.E * B;
    // (sqrt(PE) - sqrt(GB))^2/(G-P)^2 rewritten without the cancellation; exact at G = P
    r.root_plus = (L * L) / (sum * sum);
    const double gp = r.G - r.P;
    r.root_minus = gp == 0.0 ? std::numeric_limits<double>::infinity() : (sum * sum) / (gp * gp);
    return r;
}

Weights weights_smooth(int n, double p, double gamma, double s)
{
    Params prm{n, p, gamma, s, 0.0};
    if (!range_condition_smooth(prm))
        throw RangeError("s", "s violates the range condition");
    if (n == 2)
        return {2.0 * p - 2.0 + s - gamma, p + s, 0.0, 0.0};
    const auto r = appendix_roots(n, p, gamma, s);
    const double shift = static_cast<double>(n - 2) / (n - 1);
    double w2;
    if (std::isinf(r.root_minus))
        w2 = shift + r.root_plus + 1.0;
    else
        w2 = shift + 0.5 * (r.root_plus + std::min(r.root_minus, r.root_plus + 10.0));
    return {1.0, w2, 0.0, 0.0};
}

X1X2Bounds x1x2_bounds(double p, double gamma)
{
    if (!(gamma < 1.0))
        throw RangeError("gamma", "x1x2_bounds requires gamma < 1");
    if (!(p > 1.0))
        throw RangeError("p", "p <= 1");
    const double a = std::sqrt(p - 1.0);
    const double b = std::sqrt(1.0 - gamma);
    X1X2Bounds out;
    out.sup_x1 = (a - b) * (a - b);
    out.inf_x2 = std::min(4.0, (a + b) * (a + b));
    const double pg = (p - 2.0) * gamma;
    if (pg > 0.0) {
        const double t2 = (p - 2.0 - gamma) / pg;
        if (t2 > 0.0 && t2 < 1.0)
            out.theta2 = t2;
    }
    return out;
}

double default_floor(const Weights& w)
{
    return 1e-6 * std::max(1.0, w.max_abs());
}

namespace {

struct Minimum {
    double value = std::numeric_limits<double>::infinity();
    double theta = 0.0;

    void offer(double v, double t)
    {
        if (v < value) {
            value = v;
            theta = t;
        }
    }
};

/// Golden-section search for a local minimum of f on [a,b].
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b)
{
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

/// Grid scan plus extra points plus local refinement around the grid argmin.
Minimum minimize_on_unit(const std::function<double(double)>& f, int grid_points,
                         const std::vector<double>& extra)
{
    Minimum m;
    int best = 0;
    const double h = 1.0 / (grid_points - 1);
    for (int k = 0; k < grid_points; ++k) {
        const double t = k == grid_points - 1 ? 1.0 : k * h;
        const double v = f(t);
        if (v < m.value) {
            m.value = v;
            m.theta = t;
            best = k;
        }
    }
    const double lo = std::max(0.0, (best - 1) * h);
    const double hi = std::min(1.0, (best + 1) * h);
    auto [t, v] = golden_min(f, lo, hi);
    m.offer(v, t);
    for (double t_extra : extra)
        if (t_extra >= 0.0 && t_extra <= 1.0)
            m.offer(f(t_extra), t_extra);
    return m;
}

} // namespace

double lambda_select(double floor_c, double norm_M, double norm_N, double norm_c2)
{
    if (!(floor_c > 0.0))
        throw RangeError("floor_c", "lambda_select needs a positive floor");
    const double c = floor_c;
    const double mn = norm_M + norm_N;
    double m = 1.0;
    m = std::min(m, c / (norm_c2 + c));
    if (mn > 0.0) {
        m = std::min(m, c / mn);
        m = std::min(m, c / (4.0 * mn * mn));
    }
    return 0.5 * m;
}

CertReport certify_uniform(const Weights& w, const Params& params, double floor, int grid_points)
{
    if (!(floor > 0.0))
        throw RangeError("floor", "floor must be positive");
    if (grid_points < 3)
        throw RangeError("grid_points", "need at least 3 grid points");
    const int n = std::max(2, params.n);

    auto coef = [&](double t) { return coefficients(w, params, std::clamp(t, 0.0, 1.0)); };

    std::vector<double> extra{1.0 - 1.0 / (2.0 * (2.0 + params.gamma))};
    if (params.gamma < 1.0 && params.p > 1.0)
        if (auto t2 = x1x2_bounds(params.p, params.gamma).theta2)
            extra.push_back(*t2);

    auto f_2c1c2 = [&](double t) { auto c = coef(t); return 2.0 * c.c1 + c.c2; };
    auto f_c3 = [&](double t) { return coef(t).c3; };
    auto f_det = [&](double t) { return matrix_M_regularized(coef(t), n).det(); };
    auto f_m11 = [&](double t) { return matrix_M_regularized(coef(t), n).m11; };
    auto f_c3c4 = [&](double t) { auto c = coef(t); return c.c3 + c.c4; };
    auto f_c1 = [&](double t) { return coef(t).c1; };

    const Minimum m0 = minimize_on_unit(f_2c1c2, grid_points, extra);
    const Minimum m1 = minimize_on_unit(f_c3, grid_points, extra);
    const Minimum m2 = minimize_on_unit(f_det, grid_points, extra);
    const Minimum m3 = minimize_on_unit(f_m11, grid_points, extra);
    const Minimum m4 = minimize_on_unit(f_c3c4, grid_points, extra);
    const Minimum m5 = minimize_on_unit(f_c1, grid_points, extra);

    CertReport r;
    r.floor = floor;
    r.min_2c1_c2 = m0.value;
    r.min_c3 = m1.value;
    r.min_detM = m2.value;
    r.min_m11 = m3.value;
    r.min_c3c4 = m4.value;
    r.min_c1 = m5.value;
    r.argmin_theta = {m0.theta, m1.theta, m2.theta, m3.theta};
    r.argmin_c3c4 = m4.theta;

    const double h = 1.0 / (grid_points - 1);
    for (int k = 0; k < grid_points; ++k) {
        const auto c = coef(k * h);
        r.norm_M = std::max(r.norm_M, matrix_M_regularized(c, n).frob());
        r.norm_N = std::max(r.norm_N, matrix_N(c).frob());
        r.norm_c2 = std::max(r.norm_c2, std::abs(c.c2));
    }

    r.floor_c = std::min({r.min_2c1_c2, r.min_c3, r.min_detM, r.min_m11});
    r.ok = r.floor_c >= floor && r.min_c1 > 0.0;
    if (r.ok)
        r.lambda = lambda_select(r.floor_c, r.norm_M, r.norm_N, r.norm_c2) * std::min(1.0, r.min_c1);
    return r;
}

double one_dim_coefficient(double p, double gamma, double s, double theta)
{
    if (!(theta >= 0.0 && theta <= 1.0))
        throw RangeError("theta", "theta must lie in [0,1]");
    const double k = 1.0 - theta;
    return (p - 1.0) * (p - 1.0 + s - gamma) * theta * theta +
           (2.0 * p - 2.0 + s - gamma) * theta * k + k * k;
}

std::vector<RegionRow> region_map(const std::vector<double>& p_grid,
                                  const std::vector<double>& gamma_grid, std::optional<double> s,
                                  double floor, double eta)
{
    std::vector<RegionRow> rows;
    rows.reserve(p_grid.size() * gamma_grid.size());
    for (double p : p_grid) {
        for (double g : gamma_grid) {
            RegionRow row;
            row.p = p;
            row.gamma = g;
            const double s_row = s.value_or(2.0 - p);
            const Params prm{2, p, g, s_row, 0.0};
            row.theorem_case = theorem_case(p, g);
            row.smooth_range_ok = range_condition_smooth(prm);

            try {
                const Weights wi = weights_case_i(p, g, eta);
                const auto rep = certify_uniform(wi, prm, floor > 0.0 ? floor : default_floor(wi));
                row.case_i_ok = rep.ok;
                row.case_i_min_det = rep.min_detM;
            } catch (const RangeError&) {
                row.case_i_ok = false;
                row.case_i_min_det = std::numeric_limits<double>::quiet_NaN();
            }

            const Weights wii = weights_case_ii_unchecked(p, g);
            const auto rep = certify_uniform(wii, prm, floor > 0.0 ? floor : default_floor(wii));
            row.case_ii_ok = rep.ok;
            row.case_ii_min_c3c4 = rep.min_c3c4;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_region_csv(std::ostream& os, const std::vector<RegionRow>& rows)
{
    os << std::setprecision(12);
    os << "p,gamma,theorem_case,case_i_ok,case_i_min_det,case_ii_ok,case_ii_min_c3c4,smooth_range_ok\n";
    for (const auto& r : rows) {
        os << r.p << ',' << r.gamma << ',' << to_string(r.theorem_case) << ','
           << (r.case_i_ok ? 1 : 0) << ',' << r.case_i_min_det << ',' << (r.case_ii_ok ? 1 : 0)
           << ',' << r.case_ii_min_c3c4 << ',' << (r.smooth_range_ok ? 1 : 0) << '\n';
    }
}

void to_json(nlohmann::json& j, const Weights& w)
{
    j = nlohmann::json{{"w1", w.w1}, {"w2", w.w2}, {"w3", w.w3}, {"w4", w.w4}};
}

void from_json(const nlohmann::json& j, Weights& w)
{
    w.w1 = j.at("w1").get<double>();
    w.w2 = j.at("w2").get<double>();
    w.w3 = j.at("w3").get<double>();
    w.w4 = j.at("w4").get<double>();
}

void to_json(nlohmann::json& j, const CertReport& r)
{
    j = nlohmann::json{{"ok", r.ok},
                       {"floor", r.floor},
                       {"floor_c", r.floor_c},
                       {"lambda", r.lambda},
                       {"min_2c1_c2", r.min_2c1_c2},
                       {"min_c3", r.min_c3},
                       {"min_detM", r.min_detM},
                       {"min_m11", r.min_m11},
                       {"min_c3c4", r.min_c3c4},
                       {"min_c1", r.min_c1},
                       {"argmin_theta", r.argmin_theta},
                       {"argmin_c3c4", r.argmin_c3c4},
                       {"norm_M", r.norm_M},
                       {"norm_N", r.norm_N},
                       {"norm_c2", r.norm_c2}};
}

} // namespace pparab
