#include "heunhk/painleve6.hpp"

#include <cmath>

namespace heunhk {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

int family_index(RiccatiFamily f)
{
    switch (f) {
    case RiccatiFamily::e1: return 1;
    case RiccatiFamily::e2: return 2;
    case RiccatiFamily::e3: return 3;
    default: return 0;
    }
}

cplx weier_cubic(cplx b, const Lattice &lat)
{
    return 4.0 * b * b * b - lat.g2() * b - lat.g3();
}

void require_selector(const Lattice &lat, cplx om)
{
    if (lat.on_lattice(om, 1e-9 * std::abs(lat.omega(1)))) {
        throw degenerate_selector("selector point C1 w3 - C3 w1 lies on the lattice");
    }
}

cplx safe_div(cplx num, cplx den, const char *what)
{
    if (std::abs(den) < 1e-14 * (1.0 + std::abs(num))) {
        throw denominator_zero(std::string(what) + ": vanishing denominator");
    }
    return num / den;
}

std::array<int, 4> l_of(P6Family fam)
{
    return fam == P6Family::l0000 ? std::array<int, 4>{0, 0, 0, 0}
                                  : std::array<int, 4>{1, 0, 0, 0};
}

} // namespace

P6Kappas kappas_from_l(const std::array<int, 4> &l)
{
    return {l[1] + 0.5, l[2] + 0.5, l[3] + 0.5, l[0] + 0.5};
}

Lattice p6_lattice(cplx tau)
{
    return Lattice(cplx(0.5), tau / 2.0);
}

cplx hitchin_b1(cplx C1, cplx C3, cplx tau)
{
    const Lattice lat = p6_lattice(tau);
    const cplx om = C1 * lat.omega(3) - C3 * lat.omega(1);
    require_selector(lat, om);
    const cplx eta = C1 * lat.eta(3) - C3 * lat.eta(1);
    const cplx den = lat.zeta(om) - eta;
    return lat.wp(om) + safe_div(lat.wp_prime(om), 2.0 * den, "hitchin_b1");
}

cplx riccati_b1(cplx D1, cplx D3, cplx tau, RiccatiFamily family)
{
    const Lattice lat = p6_lattice(tau);
    const cplx om = D1 * lat.omega(3) - D3 * lat.omega(1);
    const cplx eta = D1 * lat.eta(3) - D3 * lat.eta(1);
    if (std::abs(om) < 1e-14 && std::abs(eta) < 1e-14) {
        throw degenerate_selector("riccati_b1: trivial selector");
    }
    const int i = family_index(family);
    if (i == 0) {
        return -safe_div(eta, om, "riccati_b1");
    }
    const cplx ei = lat.e(i);
    return safe_div((lat.g2() / 4.0 - 2.0 * ei * ei) * om + ei * eta, ei * om + eta,
                    "riccati_b1");
}

cplx l01_b1(cplx C1, cplx C3, cplx tau)
{
    const Lattice lat = p6_lattice(tau);
    const cplx om = C1 * lat.omega(3) - C3 * lat.omega(1);
    require_selector(lat, om);
    const cplx eta = C1 * lat.eta(3) - C3 * lat.eta(1);
    const cplx xi = lat.zeta(om) - eta;
    const cplx P = lat.wp(om), Pp = lat.wp_prime(om), g2 = lat.g2();
    const cplx num = 2.0 * P * xi * xi * xi + 3.0 * Pp * xi * xi + (6.0 * P * P - g2) * xi + P * Pp;
    const cplx den = 2.0 * (xi * xi * xi - 3.0 * P * xi - Pp);
    return safe_div(num, den, "l01_b1");
}

cplx l01_degenerate_b1(cplx D1, cplx D3, cplx tau, RiccatiFamily family)
{
    const Lattice lat = p6_lattice(tau);
    const cplx om = D1 * lat.omega(3) - D3 * lat.omega(1);
    const cplx eta = D1 * lat.eta(3) - D3 * lat.eta(1);
    const cplx g2 = lat.g2(), g3 = lat.g3();
    const int i = family_index(family);
    if (i == 0) {
        const cplx num = 4.0 * eta * eta * eta + g2 * om * om * eta - 2.0 * g3 * om * om * om;
        const cplx den = om * (g2 * om * om - 12.0 * eta * eta);
        return safe_div(num, den, "l01_degenerate_b1");
    }
    const cplx ei = lat.e(i);
    const cplx num = -g2 * ei * om / 2.0 + (6.0 * ei * ei - g2) * eta;
    const cplx den = (6.0 * ei * ei - g2) * om - 6.0 * ei * eta;
    return safe_div(num, den, "l01_degenerate_b1");
}

cplx q_closed(P6Family fam, cplx b1, cplx mu1, const Lattice &lat)
{
    const cplx e1 = lat.e(1), e2 = lat.e(2), e3 = lat.e(3);
    if (fam == P6Family::l0000) {
        return 2.0 * mu1 * (2.0 * mu1 * (e1 - b1) + 1.0) * (2.0 * (e2 - b1) * mu1 + 1.0) *
               (2.0 * mu1 * (e3 - b1) + 1.0);
    }
    const cplx W = weier_cubic(b1, lat);
    const cplx cubic = 2.0 * W * mu1 * mu1 * mu1 - (12.0 * b1 * b1 - lat.g2()) * mu1 * mu1 + 4.0;
    auto factor = [&](cplx ei, cplx ejek) {
        return 2.0 * (b1 * b1 + ei * b1 + ejek) * mu1 - 2.0 * b1 - ei;
    };
    return -cubic * factor(e1, e2 * e3) * factor(e2, e1 * e3) * factor(e3, e1 * e2);
}

HKClosed hk_forward(P6Family fam, cplx b1, cplx mu1, const Lattice &lat)
{
    const cplx sq = std::sqrt(-q_closed(fam, b1, mu1, lat));
    if (fam == P6Family::l0000) {
        if (std::abs(mu1) < 1e-14) {
            throw denominator_zero("hk_forward: mu1 = 0 is the degenerate branch");
        }
        return {b1 - 1.0 / (2.0 * mu1), -sq / (2.0 * mu1 * mu1), sq / (2.0 * mu1)};
    }
    const cplx W = weier_cubic(b1, lat);
    const cplx g2 = lat.g2(), g3 = lat.g3();
    const cplx den = 2.0 * W * mu1 * mu1 * mu1 - (12.0 * b1 * b1 - g2) * mu1 * mu1 + 4.0;
    const cplx pa_num = 2.0 * W * b1 * mu1 * mu1 * mu1 +
                        (-24.0 * b1 * b1 * b1 + 4.0 * g2 * b1 + 3.0 * g3) * mu1 * mu1 +
                        (24.0 * b1 * b1 - 2.0 * g2) * mu1 - 8.0 * b1;
    const cplx pp_num = -4.0 * (W * mu1 * mu1 * mu1 - (12.0 * b1 * b1 - g2) * mu1 * mu1 +
                                12.0 * b1 * mu1 - 4.0);
    return {safe_div(pa_num, den, "hk_forward"), pp_num / (den * den) * sq,
            2.0 * mu1 / den * sq};
}

std::pair<cplx, cplx> hk_inverse(P6Family fam, const HKClosed &v, const Lattice &lat)
{
    const cplx pa = v.wp_alpha, pp = v.wp_prime_alpha, ka = v.kappa;
    if (fam == P6Family::l0000) {
        const cplx mu1 = -safe_div(ka, pp, "hk_inverse");
        const cplx b1 = pa - safe_div(pp, 2.0 * ka, "hk_inverse");
        return {b1, mu1};
    }
    const cplx g2 = lat.g2();
    const cplx b1_num = 2.0 * pa * ka * ka * ka - 3.0 * pp * ka * ka + (6.0 * pa * pa - g2) * ka -
                        pa * pp;
    const cplx b1_den = 2.0 * (ka * ka * ka - 3.0 * pa * ka + pp);
    const cplx mu_num = 2.0 * (ka * ka * ka - 3.0 * pa * ka + pp) * ka;
    const cplx mu_den = -2.0 * pp * ka * ka * ka + (12.0 * pa * pa - g2) * ka * ka -
                        6.0 * pa * pp * ka + pp * pp;
    return {safe_div(b1_num, b1_den, "hk_inverse"), safe_div(mu_num, mu_den, "hk_inverse")};
}

FuchsianData p6_fuchsian(const std::array<int, 4> &l, cplx b1, cplx mu1, const Lattice &lat)
{
    const cplx W = weier_cubic(b1, lat);
    cplx lsum(0.0);
    for (int i = 1; i <= 3; ++i) {
        lsum += double(l[i]) / (2.0 * (b1 - lat.e(i)));
    }
    const cplx s_tilde1 = (lsum - mu1) * W;
    const cplx p = apparency_p_of_mu(l, b1, mu1, lat);
    cplx cross = 2.0 * (double(l[1] * l[2]) * lat.e(3) + double(l[2] * l[3]) * lat.e(1) +
                        double(l[3] * l[1]) * lat.e(2));
    cplx lterm(0.0);
    for (int i = 1; i <= 3; ++i) {
        lterm += double(l[i]) * (double(l[i]) * lat.e(i) + 2.0 * (lat.e(i) + b1));
    }
    const cplx E_tilde = p + cross - lterm;
    const cplx Cg = 1.5 * b1; // -b1/2 + 2 b1 for M=1, r1=1
    const cplx E = E_tilde - Cg;
    const cplx s1 = s_tilde1 + (12.0 * b1 * b1 - lat.g2()) / 8.0;
    return elliptic_from_algebraic(lat, l, {1}, {b1}, {s1}, E);
}

P6Point verify_p6(const std::function<cplx(cplx)> &b1_of_tau, const P6Kappas &kp, cplx tau0,
                  double h)
{
    if (h <= 0.0) {
        h = 1e-4 * std::abs(tau0);
    }
    std::array<cplx, 5> lam{}, tt{};
    for (int k = -2; k <= 2; ++k) {
        const cplx tau = tau0 + double(k) * h;
        const Lattice lat = p6_lattice(tau);
        const cplx e1 = lat.e(1), e2 = lat.e(2), e3 = lat.e(3);
        const cplx b1 = b1_of_tau(tau);
        if (!std::isfinite(b1.real()) || !std::isfinite(b1.imag())) {
            throw stencil_through_singularity("b1 not finite inside the stencil");
        }
        lam[k + 2] = (b1 - e1) / (e2 - e1);
        tt[k + 2] = (e3 - e1) / (e2 - e1);
    }
    const cplx lam0 = lam[2], t0 = tt[2];
    const double guard = 1e-5;
    if (std::abs(lam0) < guard || std::abs(lam0 - 1.0) < guard || std::abs(lam0 - t0) < guard ||
        std::abs(t0) < guard || std::abs(t0 - 1.0) < guard) {
        throw stencil_through_singularity("lambda or t too close to a PVI singular locus");
    }

    auto d1 = [&](const std::array<cplx, 5> &f) {
        return (-f[4] + 8.0 * f[3] - 8.0 * f[1] + f[0]) / (12.0 * h);
    };
    auto d2 = [&](const std::array<cplx, 5> &f) {
        return (-f[4] + 16.0 * f[3] - 30.0 * f[2] + 16.0 * f[1] - f[0]) / (12.0 * h * h);
    };
    const cplx lam_tau = d1(lam), lam_tautau = d2(lam);
    const cplx t_tau = d1(tt), t_tautau = d2(tt);
    const cplx lam_t = lam_tau / t_tau;
    const cplx lam_tt = (lam_tautau * t_tau - lam_tau * t_tautau) / (t_tau * t_tau * t_tau);

    const cplx t = t0, la = lam0;
    const double k0 = kp.k0, k1 = kp.k1, kt = kp.kt, kinf = kp.kinf;
    const cplx rhs =
        0.5 * (1.0 / la + 1.0 / (la - 1.0) + 1.0 / (la - t)) * lam_t * lam_t -
        (1.0 / t + 1.0 / (t - 1.0) + 1.0 / (la - t)) * lam_t +
        la * (la - 1.0) * (la - t) / (t * t * (t - 1.0) * (t - 1.0)) *
            (kinf * kinf / 2.0 - k0 * k0 / 2.0 * t / (la * la) +
             k1 * k1 / 2.0 * (t - 1.0) / ((la - 1.0) * (la - 1.0)) +
             (1.0 - kt * kt) / 2.0 * t * (t - 1.0) / ((la - t) * (la - t)));
    const double residual = std::abs(lam_tt - rhs) / std::max(1.0, std::abs(lam_tt));
    return {lam0, t0, residual};
}

double p6_elliptic_residual(const std::function<cplx(cplx)> &b1_of_tau,
                            const std::array<int, 4> &l, cplx tau0, double h)
{
    if (h <= 0.0) {
        h = 1e-4 * std::abs(tau0);
    }
    std::array<cplx, 5> delta{};
    cplx prev;
    for (int k = -2; k <= 2; ++k) {
        const cplx tau = tau0 + double(k) * h;
        const Lattice lat = p6_lattice(tau);
        const cplx root = lat.wp_inverse(b1_of_tau(tau));
        cplx pick = root;
        if (k > -2) {
            // Follow the branch: nearest representative of +-root to the previous value.
            double best = std::numeric_limits<double>::infinity();
            for (cplx cand : {root, -root}) {
                const cplx adj = prev + lat.reduce(cand - prev);
                if (std::abs(adj - prev) < best) {
                    best = std::abs(adj - prev);
                    pick = adj;
                }
            }
        }
        delta[k + 2] = pick;
        prev = pick;
    }
    const cplx d2 =
        (-delta[4] + 16.0 * delta[3] - 30.0 * delta[2] + 16.0 * delta[1] - delta[0]) /
        (12.0 * h * h);
    const Lattice lat = p6_lattice(tau0);
    cplx rhs(0.0);
    for (int i = 0; i < 4; ++i) {
        const double ki = double(l[i]) + 0.5;
        rhs += ki * ki * lat.wp_prime(delta[2] + lat.omega(i));
    }
    rhs *= -1.0 / (8.0 * pi * pi);
    return std::abs(d2 - rhs) / std::max(1.0, std::abs(d2));
}

IsomonodromyReport isomonodromy_check(cplx C1, cplx C3, const std::vector<cplx> &tau_grid,
                                      P6Family fam)
{
    IsomonodromyReport rep;
    for (cplx tau : tau_grid) {
        const Lattice lat = p6_lattice(tau);
        const cplx om = C1 * lat.omega(3) - C3 * lat.omega(1);
        require_selector(lat, om);
        const HKClosed v{lat.wp(om), -lat.wp_prime(om),
                         lat.zeta(om) - (C1 * lat.eta(3) - C3 * lat.eta(1))};
        const auto [b1, mu1] = hk_inverse(fam, v, lat);
        const FuchsianData d = p6_fuchsian(l_of(fam), b1, mu1, lat);
        const XiFunction xi = build_xi(d);
        const cplx Q = q_value(xi);
        const Multipliers mult = monodromy_multipliers(xi, std::sqrt(-Q));
        rep.taus.push_back(tau);
        rep.m1s.push_back(mult.m1);
        rep.m3s.push_back(mult.m3);
    }
    auto spread_mod2 = [](const std::vector<cplx> &ms) {
        double spread = 0.0;
        for (cplx m : ms) {
            cplx d = m - ms.front();
            d -= 2.0 * std::round(d.real() / 2.0);
            spread = std::max(spread, std::abs(d));
        }
        return spread;
    };
    rep.spread1 = spread_mod2(rep.m1s);
    rep.spread3 = spread_mod2(rep.m3s);
    if (std::max(rep.spread1, rep.spread3) > 0.5) {
        throw branch_jump("monodromy exponents jumped across the tau grid");
    }
    return rep;
}

} // namespace heunhk
