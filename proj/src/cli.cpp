#include "pparab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "pparab/diffops.hpp"
#include "pparab/errors.hpp"
#include "pparab/estimates.hpp"
#include "pparab/field.hpp"
#include "pparab/quadform.hpp"
#include "pparab/rng.hpp"
#include "pparab/solver.hpp"

namespace pparab::cli {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

const std::vector<std::pair<std::string, std::string>> kCommands{
    {"fundamental-check", "sample the pointwise Hessian inequality in dimensions 2..5"},
    {"divstruct-test", "refinement study of the two divergence identities"},
    {"cert", "certify a weight vector uniformly in theta"},
    {"region-map", "case i / case ii certification over a (p, gamma) grid (CSV)"},
    {"solve", "explicit solve of the regularized equation on the unit square"},
    {"verify-estimate", "solve, then check the pointwise inequality and the local estimate"},
    {"counterexample", "residual of the one-dimensional explicit solution"},
    {"threshold-scan", "integrability of the radial profile across s"}};

struct RawFlags {
    std::string config;
    std::string out;
    double p = 0, gamma = 0, s = 0, epsilon = 0, r = 0, eta = 0;
    int nx = 0;
    std::uint64_t seed = 0;
    long samples = 0;
};

void add_flags(CLI::App* sub, RawFlags& f)
{
    sub->add_option("--config", f.config, "JSON config (flags override it)");
    sub->add_option("--out", f.out, "output path");
    sub->add_option("-p,--p", f.p, "exponent p > 1");
    sub->add_option("-g,--gamma", f.gamma, "degeneracy exponent gamma > -1");
    sub->add_option("-s", f.s, "weight exponent s");
    sub->add_option("--epsilon", f.epsilon, "regularization eps >= 0");
    sub->add_option("--nx", f.nx, "nodes per direction")->check(CLI::Range(3, 100000));
    sub->add_option("--r", f.r, "cylinder radius")->check(CLI::PositiveNumber);
    sub->add_option("--eta", f.eta, "case i margin")->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "PRNG seed");
    sub->add_option("--samples", f.samples, "sample count")->check(CLI::PositiveNumber);
}

json load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open config " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw IoError("invalid JSON in " + path + ": " + e.what());
    }
}

void merge_params(const json& cfg, Params& prm, bool& s_given)
{
    auto take = [&](const json& obj) {
        if (obj.contains("n")) prm.n = obj["n"].get<int>();
        if (obj.contains("p")) prm.p = obj["p"].get<double>();
        if (obj.contains("gamma")) prm.gamma = obj["gamma"].get<double>();
        if (obj.contains("epsilon")) prm.epsilon = obj["epsilon"].get<double>();
        if (obj.contains("s")) {
            prm.s = obj["s"].get<double>();
            s_given = true;
        }
    };
    take(cfg);
    if (cfg.contains("params"))
        take(cfg["params"]);
}

} // namespace

Command parse(const std::vector<std::string>& argv)
{
    CLI::App app{"pparab: solver and certifier for the regularized general p-parabolic equation"};
    app.require_subcommand(1, 1);
    app.footer("Precedence: built-in defaults < --config file < explicit flags.\n"
               "Exit codes: 0 ok, 1 domain failure, 2 usage, 3 I/O.");
    RawFlags f;
    std::vector<CLI::App*> subs;
    for (const auto& [name, about] : kCommands) {
        auto* sub = app.add_subcommand(name, about);
        add_flags(sub, f);
        subs.push_back(sub);
    }

    Command cmd;
    std::vector<std::string> args(argv.rbegin(), argv.rend());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        cmd.name = "help";
        cmd.help = app.help();
        for (auto* sub : subs)
            if (sub->parsed())
                cmd.help = sub->help();
        return cmd;
    } catch (const CLI::ParseError& e) {
        std::string what = e.what();
        if (what.empty())
            what = "invalid arguments";
        throw UsageError(what + " (see --help)");
    }

    CLI::App* sub = nullptr;
    for (auto* s : subs)
        if (s->parsed())
            sub = s;
    cmd.name = sub->get_name();

    if (!f.config.empty()) {
        cmd.config = load_config(f.config);
        merge_params(cmd.config, cmd.params, cmd.s_given);
        if (cmd.config.contains("eta")) cmd.eta = cmd.config["eta"].get<double>();
        if (cmd.config.contains("r")) cmd.r = cmd.config["r"].get<double>();
        if (cmd.config.contains("seed")) cmd.seed = cmd.config["seed"].get<std::uint64_t>();
        if (cmd.config.contains("samples")) cmd.samples = cmd.config["samples"].get<long>();
        if (cmd.config.contains("nx")) cmd.nx = cmd.config["nx"].get<int>();
        if (cmd.config.contains("grid") && cmd.config["grid"].contains("nx"))
            cmd.nx = cmd.config["grid"]["nx"].get<int>();
        if (cmd.config.contains("cylinder") && cmd.config["cylinder"].contains("r"))
            cmd.r = cmd.config["cylinder"]["r"].get<double>();
    }
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--p")) cmd.params.p = f.p;
    if (given("--gamma")) cmd.params.gamma = f.gamma;
    if (given("-s")) {
        cmd.params.s = f.s;
        cmd.s_given = true;
    }
    if (given("--epsilon")) cmd.params.epsilon = f.epsilon;
    if (given("--nx")) cmd.nx = f.nx;
    if (given("--r")) cmd.r = f.r;
    if (given("--eta")) cmd.eta = f.eta;
    if (given("--seed")) cmd.seed = f.seed;
    if (given("--samples")) cmd.samples = f.samples;
    cmd.out = f.out;

    if (cmd.name == "solve" || cmd.name == "verify-estimate") {
        if (!cmd.nx && !cmd.config.contains("grid"))
            throw UsageError(cmd.name + " needs --nx or a config with a grid (see --help)");
    }
    return cmd;
}

namespace {

std::string dump(const json& j)
{
    return j.dump(2);
}

/// Writes to --out when given, otherwise to `out`.
void emit(const Command& cmd, std::ostream& out, const std::string& text)
{
    if (cmd.out.empty()) {
        out << text;
        if (!text.empty() && text.back() != '\n')
            out << '\n';
        return;
    }
    std::ofstream os(cmd.out);
    if (!os)
        throw IoError("cannot open " + cmd.out + " for writing");
    os << text;
    if (!text.empty() && text.back() != '\n')
        os << '\n';
    if (!os)
        throw IoError("write failed: " + cmd.out);
}

double cfg_double(const json& cfg, const char* key, double fallback)
{
    return cfg.contains(key) ? cfg[key].get<double>() : fallback;
}

Weights resolve_weights(const Command& cmd, const Params& prm)
{
    json spec = cmd.config.contains("weights") ? cmd.config["weights"] : json("case_ii");
    if (spec.is_object())
        return spec.get<Weights>();
    const std::string kind = spec.get<std::string>();
    if (kind == "case_i")
        return weights_case_i(prm.p, prm.gamma, cmd.eta);
    if (kind == "case_ii")
        return weights_case_ii_unchecked(prm.p, prm.gamma);
    if (kind == "smooth")
        return weights_smooth(prm.n, prm.p, prm.gamma, prm.s);
    throw UsageError("unknown weights '" + kind + "'");
}

int run_fundamental(const Command& cmd, std::ostream& out)
{
    SplitMix64 rng(cmd.seed);
    json report = json::object();
    bool pass = true;
    for (int n = 2; n <= 5; ++n) {
        std::vector<double> g(n), H(n * n);
        double worst = std::numeric_limits<double>::infinity();
        double worst_abs = 0.0;
        for (long k = 0; k < cmd.samples; ++k) {
            double g2 = 0.0;
            do {
                g2 = 0.0;
                for (auto& v : g) {
                    v = rng.uniform(-1.0, 1.0);
                    g2 += v * v;
                }
            } while (g2 < 1e-12);
            for (int a = 0; a < n; ++a)
                for (int b = a; b < n; ++b)
                    H[a * n + b] = H[b * n + a] = rng.uniform(-1.0, 1.0);
            double h2 = 0.0;
            for (double v : H)
                h2 += v * v;
            const double rel = fundamental_gap(g, H, n) / (1.0 + h2);
            worst = std::min(worst, rel);
            worst_abs = std::max(worst_abs, std::abs(rel));
        }
        const bool ok = worst >= -1e-12 && (n != 2 || worst_abs <= 1e-12);
        pass = pass && ok;
        report[std::to_string(n)] = {{"worst_gap_rel", worst}, {"max_abs_gap_rel", worst_abs},
                                     {"ok", ok}};
    }
    report["samples"] = cmd.samples;
    report["seed"] = cmd.seed;
    report["ok"] = pass;
    emit(cmd, out, dump(report));
    return pass ? kExitOk : kExitDomain;
}

AnalyticField sincos_field()
{
    AnalyticField f;
    f.u = [](double x, double y, double t) { return std::sin(x) * std::cos(y) * (1.0 + t); };
    f.ut = [](double x, double y, double) { return std::sin(x) * std::cos(y); };
    f.du = [](double x, double y, double t) {
        return Vec2{std::cos(x) * std::cos(y) * (1.0 + t), -std::sin(x) * std::sin(y) * (1.0 + t)};
    };
    f.d2u = [](double x, double y, double t) {
        const double a = 1.0 + t;
        return Sym2{-std::sin(x) * std::cos(y) * a, -std::cos(x) * std::sin(y) * a,
                    -std::sin(x) * std::cos(y) * a};
    };
    return f;
}

int run_divstruct(const Command& cmd, std::ostream& out)
{
    Params prm = validate(cmd.params);
    if (!(prm.epsilon > 0.0))
        prm.epsilon = 0.1;
    const auto field = sincos_field();
    json rows = json::array();
    bool pass = true;
    for (auto which : {Structure::GD1, Structure::GD2}) {
        for (double ab : {-2.0, 0.0, 2.0}) {
            std::vector<double> res;
            for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128})
                res.push_back(divergence_structure_residual(field, prm, which, ab, h));
            const double o1 = std::log2(res[0] / res[1]);
            const double o2 = std::log2(res[1] / res[2]);
            const bool ok = res[2] < 1e-12 || (o1 >= 1.0 && o2 >= 1.0);
            pass = pass && ok;
            rows.push_back({{"structure", which == Structure::GD1 ? "GD1" : "GD2"},
                            {"exponent", ab},
                            {"residuals", res},
                            {"orders", {o1, o2}},
                            {"ok", ok}});
        }
    }
    emit(cmd, out, dump(json{{"epsilon", prm.epsilon}, {"rows", rows}, {"ok", pass}}));
    return pass ? kExitOk : kExitDomain;
}

int run_cert(const Command& cmd, std::ostream& out)
{
    Params prm = cmd.params;
    if (!cmd.s_given)
        prm.s = 2.0 - prm.p;
    validate(prm);
    const Weights w = resolve_weights(cmd, prm);
    const double floor = cfg_double(cmd.config, "floor", default_floor(w));
    const auto rep = certify_uniform(w, prm, floor);
    json j = rep;
    j["weights"] = w;
    j["params"] = prm;
    j["theorem_case"] = std::string(to_string(theorem_case(prm.p, prm.gamma)));
    j["case_i_admissible"] = case_i_admissible(prm.p, prm.gamma);
    emit(cmd, out, dump(j));
    return rep.ok ? kExitOk : kExitDomain;
}

std::vector<double> grid_from(const json& cfg, const char* key, std::vector<double> fallback)
{
    if (!cfg.contains(key))
        return fallback;
    const json& g = cfg[key];
    if (g.is_array())
        return g.get<std::vector<double>>();
    const double lo = g.at("min").get<double>();
    const double hi = g.at("max").get<double>();
    const int count = g.at("count").get<int>();
    if (count < 1)
        throw UsageError(std::string(key) + ".count must be positive");
    std::vector<double> v(count);
    for (int k = 0; k < count; ++k)
        v[k] = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
    return v;
}

int run_region(const Command& cmd, std::ostream& out)
{
    std::vector<double> pg(141), gg(100);
    for (int k = 0; k < 141; ++k)
        pg[k] = 1.0 + 7.0 * (k + 1) / 141.0;
    for (int j = 0; j < 100; ++j)
        gg[j] = -0.99 + 2.48 * j / 99.0;
    pg = grid_from(cmd.config, "p_grid", pg);
    gg = grid_from(cmd.config, "gamma_grid", gg);
    std::optional<double> s;
    if (cmd.s_given)
        s = cmd.params.s;
    const double floor = cfg_double(cmd.config, "floor", 0.0);
    const auto rows = region_map(pg, gg, s, floor, cmd.eta);
    std::ostringstream os;
    write_region_csv(os, rows);
    emit(cmd, out, os.str());
    return kExitOk;
}

struct Setup {
    ScalarField initial;
    BoundaryFn boundary;
    SolveConfig config;
};

Setup make_setup(const Command& cmd)
{
    Setup st;
    SolveConfig& c = st.config;
    c.params = cmd.params;
    if (!(c.params.epsilon > 0.0) && !cmd.config.contains("epsilon") &&
        !(cmd.config.contains("params") && cmd.config["params"].contains("epsilon")))
        c.params.epsilon = 1e-2;
    if (!cmd.s_given)
        c.params.s = 2.0 - c.params.p;
    validate(c.params);
    const json& cfg = cmd.config;
    if (cfg.contains("grid")) {
        const json& g = cfg["grid"];
        c.grid.nx = g.value("nx", 33);
        c.grid.ny = g.value("ny", c.grid.nx);
        c.grid.hx = g.value("hx", 1.0 / (c.grid.nx - 1));
        c.grid.hy = g.value("hy", 1.0 / (c.grid.ny - 1));
        c.grid.x0 = g.value("x0", 0.0);
        c.grid.y0 = g.value("y0", 0.0);
    }
    if (cmd.nx) {
        c.grid.nx = c.grid.ny = *cmd.nx;
        c.grid.hx = c.grid.hy = 1.0 / (*cmd.nx - 1);
    }
    validate(c.grid);
    c.t0 = cfg_double(cfg, "t0", 0.0);
    double t_end = 0.05;
    if (cmd.name == "verify-estimate")
        t_end = std::max(t_end, 4.0 * cmd.r * cmd.r + 0.01);
    c.t_end = cfg_double(cfg, "t_end", c.t0 + t_end);
    c.cfl = cfg_double(cfg, "cfl", 0.2);
    if (cfg.contains("checkpoints")) {
        if (cfg["checkpoints"].is_array())
            c.output_times = cfg["checkpoints"].get<std::vector<double>>();
        else
            c.checkpoints = cfg["checkpoints"].get<int>();
    }

    const std::string init = cfg.value("initial", std::string("sine"));
    if (init == "sine") {
        st.initial = sample(c.grid, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
        st.boundary = [](double, double, double) { return 0.0; };
    } else if (init == "tilted") {
        auto u0 = [](double x, double y) { return x + 0.3 * std::sin(kPi * x) * std::sin(kPi * y); };
        st.initial = sample(c.grid, u0);
        st.boundary = [u0](double x, double y, double) { return u0(x, y); };
    } else if (init == "counterexample") {
        const auto ce = exact_counterexample(c.params.p, c.params.gamma);
        const double t0 = c.t0;
        st.initial = sample(c.grid, [ce, t0](double x, double) { return ce.u(x, t0); });
        st.boundary = [ce](double x, double, double t) { return ce.u(x, t); };
    } else {
        throw UsageError("unknown initial data '" + init + "'");
    }
    return st;
}

int run_solve(const Command& cmd, std::ostream& out)
{
    const Setup st = make_setup(cmd);
    const Trajectory traj = solve(st.initial, st.boundary, st.config);
    json j;
    j["params"] = st.config.params;
    j["times"] = traj.times;
    std::vector<double> maxabs;
    for (const auto& sl : traj.slices) {
        double m = 0.0;
        for (double v : sl.values)
            m = std::max(m, std::abs(v));
        maxabs.push_back(m);
    }
    j["max_abs"] = maxabs;
    if (!cmd.out.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cmd.out, ec);
        if (ec)
            throw IoError("cannot create directory " + cmd.out);
        std::vector<std::string> files;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            std::ostringstream name;
            name << cmd.out << "/slice_" << std::setw(3) << std::setfill('0') << k << ".csv";
            write_csv(name.str(), traj.slices[k]);
            files.push_back(name.str());
        }
        j["files"] = files;
    }
    out << dump(j) << '\n';
    return kExitOk;
}

int run_verify(const Command& cmd, std::ostream& out)
{
    const Setup st = make_setup(cmd);
    const Params& prm = st.config.params;
    const Weights w = resolve_weights(cmd, prm);
    const double floor = cfg_double(cmd.config, "floor", default_floor(w));
    const auto cert = certify_uniform(w, prm, floor);
    const Trajectory traj = solve(st.initial, st.boundary, st.config);

    const double lambda = cert.ok ? cert.lambda : cfg_double(cmd.config, "lambda", 1e-3);
    const auto key = key_inequality_report(traj, w, lambda, prm, cfg_double(cmd.config, "tol", 1e-6));

    CylinderSpec cyl;
    cyl.x0 = st.config.grid.x0 + 0.5 * (st.config.grid.nx - 1) * st.config.grid.hx;
    cyl.y0 = st.config.grid.y0 + 0.5 * (st.config.grid.ny - 1) * st.config.grid.hy;
    cyl.t0 = st.config.t_end;
    cyl.r = cmd.r;
    if (cmd.config.contains("cylinder")) {
        const json& c = cmd.config["cylinder"];
        cyl.x0 = c.value("x0", cyl.x0);
        cyl.y0 = c.value("y0", cyl.y0);
        cyl.t0 = c.value("t0", cyl.t0);
    }
    const auto est = estimate_report(traj, prm, cyl, prm.s);

    json j;
    j["params"] = prm;
    j["weights"] = w;
    j["cert"] = cert;
    j["lambda"] = lambda;
    j["key_inequality"] = key;
    j["estimate"] = est;
    out << dump(j) << '\n';

    if (!cmd.out.empty()) {
        std::ofstream os(cmd.out);
        if (!os)
            throw IoError("cannot open " + cmd.out + " for writing");
        os << std::setprecision(12);
        os << "p,gamma,s,epsilon,nx,r,lhs,rhs_grad,rhs_power,log_bulk,log_slice,c_emp,ut_l2,"
              "d2u_l2,violation_fraction\n";
        os << prm.p << ',' << prm.gamma << ',' << prm.s << ',' << prm.epsilon << ','
           << st.config.grid.nx << ',' << cyl.r << ',' << est.lhs << ',' << est.rhs_grad << ','
           << est.rhs_power << ',' << est.log_bulk << ',' << est.log_slice << ',' << est.c_emp
           << ',' << est.ut_l2 << ',' << est.d2u_l2 << ',' << key.violation_fraction << '\n';
        if (!os)
            throw IoError("write failed: " + cmd.out);
    }
    return cert.ok && key.violation_fraction == 0.0 ? kExitOk : kExitDomain;
}

int run_counterexample(const Command& cmd, std::ostream& out)
{
    const auto ce = exact_counterexample(cmd.params.p, cmd.params.gamma);
    SplitMix64 rng(cmd.seed);
    const long n = cmd.samples;
    double worst = 0.0;
    for (long k = 0; k < n; ++k) {
        double x = rng.uniform(0.1, 1.0);
        if (rng.uniform() < 0.5)
            x = -x;
        worst = std::max(worst, std::abs(ce.residual(x)));
    }
    json j{{"p", ce.p},         {"gamma", ce.gamma}, {"alpha", ce.alpha}, {"C", ce.C},
           {"samples", n},      {"max_residual", worst},
           {"threshold_s", ce.gamma + 1.0 - ce.p}};
    emit(cmd, out, dump(j));
    return worst <= 1e-12 * std::max(1.0, std::abs(ce.C)) ? kExitOk : kExitDomain;
}

int run_threshold(const Command& cmd, std::ostream& out)
{
    validate(cmd.params);
    const double thr = cmd.params.gamma + 1.0 - cmd.params.p;
    std::vector<double> s_list;
    if (cmd.config.contains("s_list")) {
        s_list = cmd.config["s_list"].get<std::vector<double>>();
    } else {
        for (int k = -20; k <= 20; ++k)
            s_list.push_back(thr + 0.05 * k);
    }
    const auto rows = sobolev_threshold_scan(cmd.params.p, cmd.params.gamma, s_list);
    std::ostringstream os;
    os << std::setprecision(12) << "s,exponent,integrable,numeric_integrable\n";
    for (const auto& r : rows)
        os << r.s << ',' << r.exponent << ',' << (r.integrable ? 1 : 0) << ','
           << (r.numeric_integrable ? 1 : 0) << '\n';
    emit(cmd, out, os.str());
    return kExitOk;
}

} // namespace

int run(const Command& cmd, std::ostream& out, std::ostream& err)
{
    (void)err;
    if (cmd.name == "help") {
        out << cmd.help;
        return kExitOk;
    }
    if (cmd.name == "fundamental-check") return run_fundamental(cmd, out);
    if (cmd.name == "divstruct-test") return run_divstruct(cmd, out);
    if (cmd.name == "cert") return run_cert(cmd, out);
    if (cmd.name == "region-map") return run_region(cmd, out);
    if (cmd.name == "solve") return run_solve(cmd, out);
    if (cmd.name == "verify-estimate") return run_verify(cmd, out);
    if (cmd.name == "counterexample") return run_counterexample(cmd, out);
    if (cmd.name == "threshold-scan") return run_threshold(cmd, out);
    throw UsageError("unknown command " + cmd.name);
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(parse(args), out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const BlowupError& e) {
        err << "blowup at t=" << e.time() << ": " << e.what() << '\n';
        return kExitDomain;
    } catch (const RangeError& e) {
        err << "range error (" << e.field() << "): " << e.what() << '\n';
        return kExitDomain;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}

} // namespace pparab::cli
