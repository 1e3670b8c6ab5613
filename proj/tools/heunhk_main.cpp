// Command-line front end: every subcommand prints machine-readable JSON (or
// CSV where stated) with the resolved configuration echoed under "config".
// Exit codes: 0 success, 2 validation error, 3 numeric-tolerance failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "heunhk/finite_gap.hpp"
#include "heunhk/painleve6.hpp"

using json = nlohmann::ordered_json;
using namespace heunhk;

namespace {

cplx parse_cplx(const std::string &s)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        return cplx(std::stod(s), 0.0);
    }
    return cplx(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
}

std::vector<cplx> parse_cplx_list(const std::string &s)
{
    std::vector<cplx> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (!item.empty()) {
            out.push_back(parse_cplx(item));
        }
    }
    return out;
}

std::vector<int> parse_int_list(const std::string &s)
{
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(std::stoi(item));
        }
    }
    return out;
}

json jc(cplx z)
{
    return json::array({z.real(), z.imag()});
}

json jc_list(const std::vector<cplx> &v)
{
    json out = json::array();
    for (cplx z : v) {
        out.push_back(jc(z));
    }
    return out;
}

struct Emitter {
    std::string output; // empty = stdout

    void text(const std::string &body) const
    {
        if (output.empty()) {
            std::cout << body;
        } else {
            std::ofstream f(output, std::ios::binary);
            f << body;
        }
    }
    void object(const json &j) const { text(j.dump(2) + "\n"); }
};

struct CommonFlags {
    std::string omega1 = "0.5,0", omega3 = "0,0.5";
    int l0 = 0, l1 = 0, l2 = 0, l3 = 0;
    std::string r, b, s;
    std::string E = "0,0";

    Lattice lattice() const { return Lattice(parse_cplx(omega1), parse_cplx(omega3)); }

    FuchsianData data() const
    {
        std::vector<int> rv = r.empty() ? std::vector<int>{} : parse_int_list(r);
        std::vector<cplx> bv = b.empty() ? std::vector<cplx>{} : parse_cplx_list(b);
        std::vector<cplx> sv = s.empty() ? std::vector<cplx>(rv.size(), cplx(0.0))
                                         : parse_cplx_list(s);
        return elliptic_from_algebraic(lattice(), {l0, l1, l2, l3}, rv, bv, sv, parse_cplx(E));
    }

    json config() const
    {
        json c;
        c["omega1"] = jc(parse_cplx(omega1));
        c["omega3"] = jc(parse_cplx(omega3));
        c["l"] = {l0, l1, l2, l3};
        c["r"] = r;
        c["b"] = b;
        c["s"] = s;
        c["E"] = jc(parse_cplx(E));
        return c;
    }

    void add_fuchsian_flags(CLI::App *cmd)
    {
        cmd->add_option("--omega1", omega1, "half-period, re,im");
        cmd->add_option("--omega3", omega3, "half-period, re,im");
        cmd->add_option("--l0", l0);
        cmd->add_option("--l1", l1);
        cmd->add_option("--l2", l2);
        cmd->add_option("--l3", l3);
        cmd->add_option("--r", r, "extra-singularity orders, comma separated");
        cmd->add_option("--b", b, "extra singularities, re,im;re,im;...");
        cmd->add_option("--s", s, "s parameters, re,im;re,im;...");
        cmd->add_option("--E", E, "spectral parameter, re,im");
    }
};

std::string term_label(const XiTerm &t)
{
    switch (t.kind) {
    case XiTerm::constant:
        return "1";
    case XiTerm::wp_power:
        return "wp(x+w" + std::to_string(t.i) + ")^" + std::to_string(t.m);
    default:
        return "(wp-b" + std::to_string(t.i + 1) + ")^-" + std::to_string(t.m);
    }
}

RiccatiFamily parse_family(const std::string &s)
{
    if (s == "zero") {
        return RiccatiFamily::zero;
    }
    if (s == "e1") {
        return RiccatiFamily::e1;
    }
    if (s == "e2") {
        return RiccatiFamily::e2;
    }
    if (s == "e3") {
        return RiccatiFamily::e3;
    }
    throw singular_collision("unknown family '" + s + "' (want zero|e1|e2|e3)");
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Fuchsian / elliptic-form solver: integral representations, "
                 "Hermite-Krichever data, Painleve VI families, spectral polynomials"};
    app.require_subcommand(1);

    std::string output;
    std::uint64_t seed = 1234567;
    std::string format = "json";
    int threads = 1;
    app.add_option("-o,--output", output, "write to file instead of stdout");
    app.add_option("--seed", seed, "collocation seed (HEUNHK_SEED overrides)");
    app.add_option("--format", format, "json|csv where applicable");
    app.add_option("--threads", threads, "reserved; pipelines run single-threaded by default");

    CommonFlags cf;

    auto *cmd_lattice = app.add_subcommand("lattice", "lattice constants and residuals");
    cmd_lattice->add_option("--omega1", cf.omega1, "half-period, re,im");
    cmd_lattice->add_option("--omega3", cf.omega3, "half-period, re,im");

    auto *cmd_app = app.add_subcommand("apparency", "Frobenius apparency test");
    cf.add_fuchsian_flags(cmd_app);

    auto *cmd_xi = app.add_subcommand("xi", "even doubly-periodic product solution");
    cf.add_fuchsian_flags(cmd_xi);

    auto *cmd_mon = app.add_subcommand("monodromy", "multipliers and Hermite-Krichever data");
    cf.add_fuchsian_flags(cmd_mon);

    auto *cmd_solve = app.add_subcommand("solve", "integral-representation solution along a path");
    cf.add_fuchsian_flags(cmd_solve);
    std::string solve_x = "0.35,0.41";
    int solve_n = 12;
    cmd_solve->add_option("--x", solve_x, "target point, re,im");
    cmd_solve->add_option("--n", solve_n, "number of reported points");

    auto *cmd_p6 = app.add_subcommand("p6", "Painleve VI solution families");
    cmd_p6->require_subcommand(1);
    std::string C1 = "0.31,0.07", C3 = "0.54,-0.11", D1 = "1,0", D3 = "0,0", tau_s = "0,0.8";
    std::string family = "zero";
    bool check = false;
    auto *p6_h = cmd_p6->add_subcommand("hitchin", "kappa = (1/2,1/2,1/2,1/2) family");
    p6_h->add_option("--C1", C1);
    p6_h->add_option("--C3", C3);
    p6_h->add_option("--tau", tau_s);
    p6_h->add_flag("--check", check, "verify the PVI equation numerically");
    auto *p6_r = cmd_p6->add_subcommand("riccati", "degenerate families, l = (0,0,0,0)");
    p6_r->add_option("--D1", D1);
    p6_r->add_option("--D3", D3);
    p6_r->add_option("--family", family, "zero|e1|e2|e3");
    p6_r->add_option("--tau", tau_s);
    p6_r->add_flag("--check", check);
    auto *p6_l = cmd_p6->add_subcommand("l01", "kappa_inf = 3/2 family, l = (1,0,0,0)");
    p6_l->add_option("--C1", C1);
    p6_l->add_option("--C3", C3);
    bool l01_degenerate = false;
    p6_l->add_flag("--degenerate", l01_degenerate, "use the D-family instead of (C1, C3)");
    p6_l->add_option("--D1", D1);
    p6_l->add_option("--D3", D3);
    p6_l->add_option("--family", family, "zero|e1|e2|e3 (degenerate mode)");
    p6_l->add_option("--tau", tau_s);
    p6_l->add_flag("--check", check);
    auto *p6_sweep = cmd_p6->add_subcommand("sweep", "CSV sweep over tau");
    std::string kind = "hitchin", tau_start = "0,0.6", tau_end = "0,1.4";
    int sweep_n = 9;
    p6_sweep->add_option("--kind", kind, "hitchin|riccati|l01|l01deg");
    p6_sweep->add_option("--C1", C1);
    p6_sweep->add_option("--C3", C3);
    p6_sweep->add_option("--D1", D1);
    p6_sweep->add_option("--D3", D3);
    p6_sweep->add_option("--family", family);
    p6_sweep->add_option("--tau-start", tau_start);
    p6_sweep->add_option("--tau-end", tau_end);
    p6_sweep->add_option("--n", sweep_n);

    auto *cmd_fg = app.add_subcommand("finitegap", "spectral polynomials and band edges");
    cmd_fg->require_subcommand(1);
    std::string fg_l = "1,0,0,0";
    int root_index = 0;
    auto *fg_m0 = cmd_fg->add_subcommand("m0", "Treibich-Verdier case");
    fg_m0->add_option("--l", fg_l, "l0,l1,l2,l3");
    fg_m0->add_option("--omega1", cf.omega1);
    fg_m0->add_option("--omega3", cf.omega3);
    auto *fg_m1 = cmd_fg->add_subcommand("m1r2", "one extra singularity of order 2, s1 = 0");
    fg_m1->add_option("--l", fg_l, "l0,l1,l2,l3");
    fg_m1->add_option("--root-index", root_index, "index into the f0 roots");
    fg_m1->add_option("--omega1", cf.omega1);
    fg_m1->add_option("--omega3", cf.omega3);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        json err;
        err["error"]["kind"] = "usage";
        err["error"]["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    }

    if (const char *env = std::getenv("HEUNHK_SEED")) {
        seed = std::strtoull(env, nullptr, 10);
    }
    Emitter emit{output};

    auto base_config = [&](const std::string &sub) {
        json c;
        c["subcommand"] = sub;
        c["seed"] = seed;
        c["format"] = format;
        c["threads"] = threads;
        return c;
    };

    try {
        if (cmd_lattice->parsed()) {
            const Lattice lat = cf.lattice();
            json out;
            out["omega1"] = jc(lat.omega(1));
            out["omega3"] = jc(lat.omega(3));
            out["e"] = {jc(lat.e(1)), jc(lat.e(2)), jc(lat.e(3))};
            out["eta"] = {jc(lat.eta(1)), jc(lat.eta(2)), jc(lat.eta(3))};
            out["g2"] = jc(lat.g2());
            out["g3"] = jc(lat.g3());
            out["tau"] = jc(lat.tau());
            out["legendre_residual"] = lat.legendre_residual();
            out["config"] = base_config("lattice");
            out["config"]["omega1"] = jc(parse_cplx(cf.omega1));
            out["config"]["omega3"] = jc(parse_cplx(cf.omega3));
            emit.object(out);
        } else if (cmd_app->parsed()) {
            const FuchsianData d = cf.data();
            if (d.M() == 0) {
                throw singular_collision("apparency needs at least one extra singularity (--r/--b)");
            }
            json out;
            bool all_ok = true;
            json per = json::array();
            for (int ip = 0; ip < d.M(); ++ip) {
                const auto res = frobenius_is_apparent(local_expansion(d, ip, +1));
                all_ok = all_ok && res.apparent;
                json rec;
                rec["index"] = ip + 1;
                rec["apparent"] = res.apparent;
                rec["witness"] = jc(res.witness);
                rec["witness_relative"] = std::abs(res.witness) / res.scale;
                per.push_back(rec);
            }
            out["apparent"] = all_ok;
            out["witness"] = per[0]["witness"];
            out["singularities"] = per;
            if (d.M() == 1 && d.r[0] == 1) {
                const cplx W = 4.0 * d.b[0] * d.b[0] * d.b[0] - d.lat.g2() * d.b[0] - d.lat.g3();
                cplx lsum(0.0);
                for (int i = 1; i <= 3; ++i) {
                    lsum += double(d.l[i]) / (2.0 * (d.b[0] - d.lat.e(i)));
                }
                const cplx mu1 = -d.s_tilde[0] / W + lsum;
                out["p_required"] = jc(apparency_p_of_mu(d.l, d.b[0], mu1, d.lat));
                out["p"] = jc(d.p);
            }
            out["config"] = base_config("apparency");
            out["config"].update(cf.config());
            emit.object(out);
        } else if (cmd_xi->parsed()) {
            const FuchsianData d = cf.data();
            XiOptions opts;
            opts.seed = seed;
            const XiFunction xi = build_xi(d, opts);
            const QValue q = q_value_detail(xi);
            json out;
            out["nullspace_dim"] = xi.nullspace_dim();
            out["heldout_residual"] = xi.heldout_residual();
            json terms = json::array();
            for (std::size_t j = 0; j < xi.terms().size(); ++j) {
                json t;
                t["term"] = term_label(xi.terms()[j]);
                t["coef"] = jc(xi.coef()[j]);
                terms.push_back(t);
            }
            out["coefficients"] = terms;
            out["Q"] = jc(q.mean);
            out["Q_spread_rel"] = q.spread_rel;
            out["config"] = base_config("xi");
            out["config"].update(cf.config());
            emit.object(out);
        } else if (cmd_mon->parsed()) {
            const FuchsianData d = cf.data();
            XiOptions opts;
            opts.seed = seed;
            const XiFunction xi = build_xi(d, opts);
            const HKData hk = hk_analyze(xi);
            json out;
            out["m1"] = jc(hk.m1);
            out["m3"] = jc(hk.m3);
            out["alpha"] = jc(hk.alpha);
            out["kappa"] = jc(hk.kappa);
            out["Q"] = jc(hk.Q);
            out["branch"] = hk.degenerate ? "degenerate" : "generic";
            out["nullspace_dim"] = hk.nullspace_dim;
            out["config"] = base_config("monodromy");
            out["config"].update(cf.config());
            emit.object(out);
        } else if (cmd_solve->parsed()) {
            const FuchsianData d = cf.data();
            XiOptions opts;
            opts.seed = seed;
            const XiFunction xi = build_xi(d, opts);
            const cplx Q = q_value(xi);
            const cplx sq = std::sqrt(-Q);
            const cplx x0 = default_basepoint(xi);
            const cplx x1 = parse_cplx(solve_x);
            std::ostringstream csv;
            csv << "x_re,x_im,lambda_re,lambda_im,residual\n";
            for (int k = 0; k < solve_n; ++k) {
                const double tfrac = (solve_n == 1) ? 1.0 : double(k) / double(solve_n - 1);
                const cplx x = x0 + tfrac * (x1 - x0);
                if (d.singular_distance(x) < 0.02 * std::abs(d.lat.omega(1))) {
                    continue;
                }
                const auto [lam, lam_g] = lambda_eval(xi, sq, x);
                (void)lam_g;
                const double rho = 0.1 * d.singular_distance(x);
                // Either sign of sqrt(Xi(x)) works as the continuation reference;
                // the ratio in the Cauchy formula is branch-invariant.
                const cplx d2 =
                    lambda_second_derivative(xi, sq, x, lam, std::sqrt(xi.eval(x)), rho);
                const double residual =
                    std::abs(d2 - (d.v(x) - d.E) * lam) / (1.0 + std::abs(d2));
                csv << fmt_double(x.real()) << ',' << fmt_double(x.imag()) << ','
                    << fmt_double(lam.real()) << ',' << fmt_double(lam.imag()) << ','
                    << fmt_double(residual) << "\n";
            }
            emit.text(csv.str());
        } else if (p6_h->parsed() || p6_r->parsed() || p6_l->parsed()) {
            const cplx tau = parse_cplx(tau_s);
            std::function<cplx(cplx)> fn;
            P6Kappas kp{};
            std::array<int, 4> l{};
            std::string sub;
            if (p6_h->parsed()) {
                const cplx c1 = parse_cplx(C1), c3 = parse_cplx(C3);
                fn = [c1, c3](cplx t) { return hitchin_b1(c1, c3, t); };
                l = {0, 0, 0, 0};
                sub = "p6 hitchin";
            } else if (p6_r->parsed()) {
                const cplx d1 = parse_cplx(D1), d3 = parse_cplx(D3);
                const RiccatiFamily fam = parse_family(family);
                fn = [d1, d3, fam](cplx t) { return riccati_b1(d1, d3, t, fam); };
                l = {0, 0, 0, 0};
                sub = "p6 riccati";
            } else if (!l01_degenerate) {
                const cplx c1 = parse_cplx(C1), c3 = parse_cplx(C3);
                fn = [c1, c3](cplx t) { return l01_b1(c1, c3, t); };
                l = {1, 0, 0, 0};
                sub = "p6 l01";
            } else {
                const cplx d1 = parse_cplx(D1), d3 = parse_cplx(D3);
                const RiccatiFamily fam = parse_family(family);
                fn = [d1, d3, fam](cplx t) { return l01_degenerate_b1(d1, d3, t, fam); };
                l = {1, 0, 0, 0};
                sub = "p6 l01 --degenerate";
            }
            kp = kappas_from_l(l);
            const Lattice lat = p6_lattice(tau);
            const cplx b1 = fn(tau);
            json out;
            out["b1"] = jc(b1);
            out["lambda"] = jc((b1 - lat.e(1)) / (lat.e(2) - lat.e(1)));
            out["t"] = jc((lat.e(3) - lat.e(1)) / (lat.e(2) - lat.e(1)));
            if (check) {
                out["residual_p6"] = verify_p6(fn, kp, tau).residual;
                out["residual_elliptic"] = p6_elliptic_residual(fn, l, tau);
            } else {
                out["residual_p6"] = nullptr;
                out["residual_elliptic"] = nullptr;
            }
            out["config"] = base_config(sub);
            out["config"]["C1"] = C1;
            out["config"]["C3"] = C3;
            out["config"]["D1"] = D1;
            out["config"]["D3"] = D3;
            out["config"]["family"] = family;
            out["config"]["tau"] = jc(tau);
            emit.object(out);
        } else if (p6_sweep->parsed()) {
            std::function<cplx(cplx)> fn;
            P6Kappas kp{};
            if (kind == "hitchin") {
                const cplx c1 = parse_cplx(C1), c3 = parse_cplx(C3);
                fn = [c1, c3](cplx t) { return hitchin_b1(c1, c3, t); };
                kp = kappas_from_l({0, 0, 0, 0});
            } else if (kind == "riccati") {
                const cplx d1 = parse_cplx(D1), d3 = parse_cplx(D3);
                const RiccatiFamily fam = parse_family(family);
                fn = [d1, d3, fam](cplx t) { return riccati_b1(d1, d3, t, fam); };
                kp = kappas_from_l({0, 0, 0, 0});
            } else if (kind == "l01") {
                const cplx c1 = parse_cplx(C1), c3 = parse_cplx(C3);
                fn = [c1, c3](cplx t) { return l01_b1(c1, c3, t); };
                kp = kappas_from_l({1, 0, 0, 0});
            } else if (kind == "l01deg") {
                const cplx d1 = parse_cplx(D1), d3 = parse_cplx(D3);
                const RiccatiFamily fam = parse_family(family);
                fn = [d1, d3, fam](cplx t) { return l01_degenerate_b1(d1, d3, t, fam); };
                kp = kappas_from_l({1, 0, 0, 0});
            } else {
                throw singular_collision("unknown sweep kind '" + kind + "'");
            }
            const cplx ts = parse_cplx(tau_start), te = parse_cplx(tau_end);
            std::ostringstream csv;
            csv << "tau_re,tau_im,t_re,t_im,lambda_re,lambda_im,residual\n";
            for (int k = 0; k < sweep_n; ++k) {
                const double f = (sweep_n == 1) ? 0.0 : double(k) / double(sweep_n - 1);
                const cplx tau = ts + f * (te - ts);
                const P6Point pt = verify_p6(fn, kp, tau);
                csv << fmt_double(tau.real()) << ',' << fmt_double(tau.imag()) << ','
                    << fmt_double(pt.t.real()) << ',' << fmt_double(pt.t.imag()) << ','
                    << fmt_double(pt.lambda.real()) << ',' << fmt_double(pt.lambda.imag()) << ','
                    << fmt_double(pt.residual) << "\n";
            }
            emit.text(csv.str());
        } else if (fg_m0->parsed() || fg_m1->parsed()) {
            const auto lv = parse_int_list(fg_l);
            if (lv.size() != 4) {
                throw singular_collision("--l wants four comma-separated integers");
            }
            const std::array<int, 4> l{lv[0], lv[1], lv[2], lv[3]};
            const Lattice lat = cf.lattice();
            SpectralOptions opts;
            opts.seed = seed;
            SpectralData sd;
            json out;
            if (fg_m0->parsed()) {
                sd = spectral_poly_m0(l, lat, opts);
                out["config"] = base_config("finitegap m0");
            } else {
                const auto roots = treibich_b1_roots(l, lat);
                if (root_index < 0 || root_index >= int(roots.size())) {
                    throw singular_collision("--root-index out of range");
                }
                sd = spectral_poly_m1r2(l, roots[root_index], lat, opts);
                out["config"] = base_config("finitegap m1r2");
                out["config"]["root_index"] = root_index;
                out["b1_roots"] = jc_list(roots);
                out["b1"] = jc(roots[root_index]);
            }
            out["g"] = sd.g;
            out["Q_coeffs"] = jc_list(sd.Q_poly.c);
            out["band_edges"] = jc_list(sd.band_edges);
            out["fit_residual"] = sd.fit_residual;
            out["config"]["l"] = fg_l;
            out["config"]["omega1"] = jc(parse_cplx(cf.omega1));
            out["config"]["omega3"] = jc(parse_cplx(cf.omega3));
            emit.object(out);
        }
    } catch (const validation_error &e) {
        json err;
        err["error"]["kind"] = e.kind();
        err["error"]["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const numeric_error &e) {
        json err;
        err["error"]["kind"] = e.kind();
        err["error"]["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 3;
    } catch (const std::exception &e) {
        json err;
        err["error"]["kind"] = "internal";
        err["error"]["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 3;
    }
    return 0;
}
