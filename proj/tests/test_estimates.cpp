#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pparab/errors.hpp"
#include "pparab/estimates.hpp"
#include "pparab/rng.hpp"

using namespace pparab;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

AnalyticField quadratic_field()
{
    AnalyticField f;
    f.u = [](double x, double y, double) { return x * x + y * y; };
    f.ut = [](double, double, double) { return 0.0; };
    f.du = [](double x, double y, double) { return Vec2{2 * x, 2 * y}; };
    f.d2u = [](double, double, double) { return Sym2{2, 0, 2}; };
    return f;
}

AnalyticField sincos_field()
{
    AnalyticField f;
    f.u = [](double x, double y, double t) { return std::sin(x) * std::cos(y) * (1 + t); };
    f.ut = [](double x, double y, double) { return std::sin(x) * std::cos(y); };
    f.du = [](double x, double y, double t) {
        return Vec2{std::cos(x) * std::cos(y) * (1 + t), -std::sin(x) * std::sin(y) * (1 + t)};
    };
    f.d2u = [](double x, double y, double t) {
        return Sym2{-std::sin(x) * std::cos(y) * (1 + t), -std::cos(x) * std::sin(y) * (1 + t),
                    -std::sin(x) * std::cos(y) * (1 + t)};
    };
    return f;
}

Trajectory heat_run(int n, double eps = 1e-2, double t_end = 0.02)
{
    SolveConfig cfg;
    cfg.grid = make_grid(n, n, 0, 1, 0, 1);
    cfg.params = {2, 2.0, 0.0, 0.0, eps};
    cfg.t_end = t_end;
    const auto u0 = sample(cfg.grid, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    return solve(u0, [](double, double, double) { return 0.0; }, cfg);
}

} // namespace

TEST_CASE("cutoff profile")
{
    const CylinderSpec spec{0.5, 0.5, 1.0, 0.1};
    const auto c = cutoff(0.5, 0.5, 1.0, spec);
    CHECK(c.phi == 1.0);
    CHECK(c.dphi[0] == 0.0);
    CHECK(c.phi_t == 0.0);
    const auto o = cutoff(0.75, 0.5, 1.0, spec);
    CHECK(o.phi == 0.0);
    CHECK(o.dphi[0] == 0.0);
    CHECK(cutoff(0.5, 0.5, 0.95, spec).phi == 0.0);  // t0 - t = 5 r^2
    CHECK(cutoff(0.5, 0.5, 1.1, spec).phi == 0.0);

    double max_grad = 0, max_t = 0;
    SplitMix64 rng(1);
    for (int k = 0; k < 200000; ++k) {
        const double x = rng.uniform(0.2, 0.8), y = rng.uniform(0.2, 0.8), t = rng.uniform(0.9, 1.0);
        const auto q = cutoff(x, y, t, spec);
        REQUIRE(q.phi >= 0.0);
        REQUIRE(q.phi <= 1.0);
        max_grad = std::max(max_grad, spec.r * std::hypot(q.dphi[0], q.dphi[1]));
        max_t = std::max(max_t, spec.r * spec.r * std::abs(q.phi_t));
    }
    CHECK(max_grad <= 1.5 + 1e-12);
    CHECK(max_grad > 1.4);
    CHECK(max_t <= 0.5 + 1e-12);
    CHECK(max_t > 0.45);

    // derivative fields against finite differences
    const double x = 0.62, y = 0.55, t = 0.985, h = 1e-6;
    const auto q = cutoff(x, y, t, spec);
    CHECK(q.dphi[0] == Approx((cutoff(x + h, y, t, spec).phi - cutoff(x - h, y, t, spec).phi) / (2 * h)).epsilon(1e-5));
    CHECK(q.dphi[1] == Approx((cutoff(x, y + h, t, spec).phi - cutoff(x, y - h, t, spec).phi) / (2 * h)).epsilon(1e-5));
    CHECK(q.phi_t == Approx((cutoff(x, y, t + h, spec).phi - cutoff(x, y, t - h, spec).phi) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("first divergence structure is exact on a quadratic")
{
    const Params prm{2, 3, 0, 0, 0.1};
    const auto f = quadratic_field();
    const auto b = make_bundle({1.0, 0.3}, {2, 0, 2}, prm);
    CHECK(gd1_lhs(b, 0.0) == Approx(-8.0));
    CHECK(divergence_structure_residual(f, prm, Structure::GD1, 0.0, 1.0 / 32) < 1e-12);
}

TEST_CASE("divergence residuals shrink under refinement")
{
    const Params prm{2, 3, 0, 0, 0.1};
    const auto f = sincos_field();
    for (auto which : {Structure::GD1, Structure::GD2})
        for (double ab : {-2.0, 0.0, 2.0, 0.5}) {
            const double r1 = divergence_structure_residual(f, prm, which, ab, 1.0 / 16);
            const double r2 = divergence_structure_residual(f, prm, which, ab, 1.0 / 32);
            const double r3 = divergence_structure_residual(f, prm, which, ab, 1.0 / 64);
            CHECK(std::log2(r1 / r2) >= 1.0);
            CHECK(std::log2(r2 / r3) >= 1.0);
        }
    CHECK_THROWS_AS(divergence_structure_residual(f, {2, 3, 0, 0, 0.0}, Structure::GD1, 0, 0.1), RangeError);
}

TEST_CASE("weighted sum: closed form, zero hessian and mode agreement")
{
    const Params prm{2, 2, 0, 0, 0};
    const auto b = make_bundle({0.6, 0.8}, {1, 0, 1}, prm);
    CHECK(b.delta_t == Approx(1.0));
    CHECK(b.inf_lap_norm == Approx(1.0));
    CHECK(b.dt_grad_sq == Approx(0.0));
    // c = (1, 0, 1, 0), N = 0, so S = |D2u|^2 = 2
    CHECK(S_pointwise(b, std::nullopt, {1, 1, 0, 0}, prm) == Approx(2.0));

    const auto z = make_bundle({0.3, -0.2}, {0, 0, 0}, {2, 3, 0.5, -1, 0.1});
    CHECK(S_pointwise(z, std::nullopt, {3, 2, 1, 2}, {2, 3, 0.5, -1, 0.1}) == 0.0);
    CHECK(S_pointwise(z, 0.0, {3, 2, 1, 2}, {2, 3, 0.5, -1, 0.1}) == 0.0);

    // with u_t given by the equation the two modes coincide for any bundle
    SplitMix64 rng(17);
    for (int k = 0; k < 5000; ++k) {
        const Params q{2, rng.uniform(1.1, 6), rng.uniform(-0.9, 1.5), rng.uniform(-3, 1), rng.uniform(0, 0.5)};
        const Weights w{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const auto bb = make_bundle({rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                    {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, q);
        if (bb.grad_sq() < 1e-6 || bb.grad_sq_reg < 1e-3)
            continue;
        const double ut = regularized_operator(bb, q);
        const double sub = S_pointwise(bb, std::nullopt, w, q);
        const double exp = S_pointwise(bb, ut, w, q);
        const double scale = std::pow(bb.grad_sq_reg, 0.5 * (q.p - 2 + q.s)) * (1 + bb.hess_sq()) *
                             std::max(1.0, w.max_abs()) * 50;
        REQUIRE(std::abs(sub - exp) <= 1e-10 * scale);
    }

    // explicit mode is the four-structure sum
    const Params q{2, 3, 0.5, -1, 0.2};
    const Weights w{3, 2, 1, 2};
    const auto bb = make_bundle({0.4, -0.3}, {0.7, -0.2, 0.1}, q);
    const double ut = 0.37;
    const double expect = w.w1 * gd1_lhs(bb, q.p - 2 + q.s) + w.w2 * gd2_lhs(bb, ut, q.p - 2 + q.s - q.gamma) +
                          q.epsilon * (w.w3 * gd1_lhs(bb, q.p - 4 + q.s) + w.w4 * gd2_lhs(bb, ut, q.p - 4 + q.s - q.gamma));
    CHECK(S_pointwise(bb, ut, w, q) == Approx(expect));
}

TEST_CASE("modes agree on solver output")
{
    SolveConfig cfg;
    cfg.grid = make_grid(33, 33, 0, 1, 0, 1);
    cfg.params = {2, 3.0, 0.5, -1.0, 0.05};
    cfg.t_end = 0.01;
    cfg.checkpoints = 2;
    const auto u0 = sample(cfg.grid, [](double x, double y) { return x + 0.3 * std::sin(kPi * x) * std::sin(kPi * y); });
    const auto bc = [](double x, double y, double) { return x + 0.3 * std::sin(kPi * x) * std::sin(kPi * y); };
    auto t1 = solve(u0, bc, cfg);
    // last small step for a backward difference
    const double dt = 1e-6;
    const auto next = step(t1.slices.back(), bc, cfg.params, dt, cfg.t_end);
    const Weights w = weights_case_ii(3.0, 0.5);
    double worst = 0, scale = 0;
    for (int j = 2; j < 31; ++j)
        for (int i = 2; i < 31; ++i) {
            const auto b = derivative_bundle(t1.slices.back(), cfg.params, i, j);
            const double ut = (next.at(i, j) - t1.slices.back().at(i, j)) / dt;
            worst = std::max(worst, std::abs(S_pointwise(b, ut, w, cfg.params) -
                                             S_pointwise(b, std::nullopt, w, cfg.params)));
            scale = std::max(scale, std::abs(S_pointwise(b, std::nullopt, w, cfg.params)));
        }
    CHECK(worst <= 1e-6 * scale);
}

TEST_CASE("key inequality report")
{
    const auto traj = heat_run(33);
    const Params prm{2, 2, 0, 0, 1e-2};
    const auto w = weights_case_ii(2, 0);
    const auto cert = certify_uniform(w, prm, default_floor(w));
    REQUIRE(cert.ok);
    const auto rep = key_inequality_report(traj, w, cert.lambda, prm);
    CHECK(rep.violation_fraction == 0.0);
    CHECK(rep.nodes == traj.size() * 31 * 31);
    CHECK(rep.worst_margin >= 0.0);

    Trajectory constant;
    for (double t : {0.0, 0.1}) {
        constant.times.push_back(t);
        constant.slices.push_back(sample(make_grid(9, 9, 0, 1, 0, 1), [](double, double) { return 2.0; }));
    }
    const auto rc = key_inequality_report(constant, w, cert.lambda, prm);
    CHECK(rc.violation_fraction == 0.0);
    CHECK(rc.worst_margin == 0.0);

    // negative control
    SolveConfig cfg;
    cfg.grid = make_grid(33, 33, 0, 1, 0, 1);
    cfg.params = {2, 3.0, 0.0, -1.0, 1e-2};
    cfg.t_end = 0.01;
    const auto u0 = sample(cfg.grid, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    const auto tr = solve(u0, [](double, double, double) { return 0.0; }, cfg);
    const Weights bad{0, 0, 0, 1};
    CHECK_FALSE(certify_uniform(bad, cfg.params, default_floor(bad)).ok);
    const auto rb = key_inequality_report(tr, bad, 1e-3, cfg.params);
    CHECK(rb.violation_fraction > 0.0);
    CHECK(rb.worst_margin < 0.0);
}

TEST_CASE("estimate report")
{
    const Params prm{2, 2, 0, 0, 1e-2};
    const CylinderSpec spec{0.5, 0.5, 0.02, 0.06};
    std::vector<double> c;
    for (int n : {33, 65, 129}) {
        const auto rep = estimate_report(heat_run(n, 1e-2, 0.02), prm, spec, 0.5);
        CHECK(rep.lhs > 0);
        CHECK(std::isfinite(rep.c_emp));
        CHECK_FALSE(rep.log_terms);
        CHECK(rep.corollary_ok);
        c.push_back(rep.c_emp);
    }
    CHECK(std::abs(c[1] / c[0] - 1) < 0.5);
    CHECK(std::abs(c[2] / c[1] - 1) < 0.05);

    // log terms when s = gamma - p + 2
    const auto lg = estimate_report(heat_run(33), prm, spec, 0.0 - 2.0 + 2.0);
    CHECK(lg.log_terms);
    const Params q{2, 3, 0, 0, 1e-2};
    const auto withlog = estimate_report(heat_run(33), q, spec, -1.0);
    CHECK(withlog.log_terms);
    CHECK(withlog.log_bulk > 0);
    CHECK(withlog.log_slice > 0);

    CHECK_THROWS_AS(estimate_report(heat_run(17), prm, spec, -2.0), RangeError);
    CHECK_THROWS_AS(estimate_report(heat_run(17), prm, {0.1, 0.5, 0.02, 0.06}, 0.0), RangeError);
    CHECK_THROWS_AS(estimate_report(heat_run(17), prm, {0.5, 0.5, 0.02, 0.1}, 0.0), RangeError);

    Trajectory constant;
    for (int k = 0; k <= 10; ++k) {
        constant.times.push_back(0.002 * k);
        constant.slices.push_back(sample(make_grid(33, 33, 0, 1, 0, 1), [](double, double) { return 1.0; }));
    }
    const auto rc = estimate_report(constant, prm, spec, 0.0);
    CHECK(rc.lhs == 0.0);
    CHECK(rc.rhs_grad == 0.0);
    CHECK(rc.c_emp == 0.0);
    CHECK(rc.ut_l2 == 0.0);
    CHECK(rc.d2u_l2 == 0.0);
}

TEST_CASE("threshold scan")
{
    const auto rows = sobolev_threshold_scan(3, 0, {-1.0});
    CHECK(rows[0].exponent == Approx(0.0));
    CHECK(rows[0].integrable);
    CHECK(rows[0].numeric_integrable);
    const auto edge = sobolev_threshold_scan(2, 1, {0.0});
    CHECK(edge[0].exponent == Approx(-1.0));
    CHECK_FALSE(edge[0].integrable);
    CHECK_FALSE(edge[0].numeric_integrable);
    const auto h = sobolev_threshold_scan(2, 0, {0.0});
    CHECK(h[0].exponent == Approx(0.0));
    CHECK(h[0].integrable);

    for (double g : {-0.5, 0.0, 0.7}) {
        const double thr = g + 1 - 3.0;
        std::vector<double> s;
        for (int k = -20; k <= 20; ++k)
            if (k != 0)
                s.push_back(thr + 0.05 * k);
        for (const auto& r : sobolev_threshold_scan(3.0, g, s)) {
            CHECK(r.integrable == (r.s > thr));
            CHECK(r.numeric_integrable == r.integrable);
        }
    }
}
