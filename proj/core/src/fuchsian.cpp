#include "heunhk/fuchsian.hpp"

#include <algorithm>
#include <cmath>

namespace heunhk {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

cplx weier_cubic(cplx b, cplx g2, cplx g3)
{
    return 4.0 * b * b * b - g2 * b - g3;
}

// The brace of the o_{i'} formula shared (up to its l-part) with s_tilde.
cplx gauge_brace(const FuchsianData &d, int ip)
{
    const cplx b = d.b[ip];
    const double r = d.r[ip];
    cplx cross(0.0);
    for (int j = 0; j < d.M(); ++j) {
        if (j != ip) {
            cross += double(d.r[j]) / (b - d.b[j]);
        }
    }
    return r / 8.0 * (12.0 * b * b - d.lat.g2()) +
           0.5 * weier_cubic(b, d.lat.g2(), d.lat.g3()) * cross;
}

cplx o_l_part(const FuchsianData &d, int ip)
{
    const cplx b = d.b[ip];
    const cplx e1 = d.lat.e(1), e2 = d.lat.e(2), e3 = d.lat.e(3);
    return 2.0 * (double(d.l[1]) * (b - e2) * (b - e3) + double(d.l[2]) * (b - e1) * (b - e3) +
                  double(d.l[3]) * (b - e1) * (b - e2));
}

void derive_fields(FuchsianData &d)
{
    const cplx e1 = d.lat.e(1), e2 = d.lat.e(2), e3 = d.lat.e(3);
    const int M = d.M();

    d.o.resize(M);
    d.s_tilde.resize(M);
    d.delta.resize(M);
    for (int ip = 0; ip < M; ++ip) {
        const double r = d.r[ip];
        d.o[ip] = -d.s[ip] + r * (gauge_brace(d, ip) + o_l_part(d, ip));
        d.s_tilde[ip] = d.s[ip] - r * gauge_brace(d, ip);
        d.delta[ip] = d.lat.wp_inverse(d.b[ip]);
    }

    cplx br(0.0), br2(0.0), rs(0.0), lr(0.0);
    for (int ip = 0; ip < M; ++ip) {
        br += d.b[ip] * double(d.r[ip]);
        br2 += d.b[ip] * double(d.r[ip]) * double(d.r[ip]);
        rs += double(d.r[ip]);
        for (int i = 1; i <= 3; ++i) {
            lr += double(d.l[i]) * double(d.r[ip]) * (d.lat.e(i) + d.b[ip]);
        }
    }
    d.Cg = -0.5 * br2 + 2.0 * br * rs;
    d.p = d.E + (e1 * double(d.l[1] * d.l[1]) + e2 * double(d.l[2] * d.l[2]) +
                 e3 * double(d.l[3] * d.l[3])) -
          2.0 * (double(d.l[1] * d.l[2]) * e3 + double(d.l[2] * d.l[3]) * e1 +
                 double(d.l[3] * d.l[1]) * e2) -
          0.5 * br2 + 2.0 * lr + 2.0 * br * rs;
}

void validate_inputs(const Lattice &lat, const std::array<int, 4> &l, const std::vector<int> &r,
                     const std::vector<cplx> &b)
{
    for (int li : l) {
        if (li < 0) {
            throw singular_collision("l_i must be non-negative integers");
        }
    }
    if (r.size() != b.size()) {
        throw singular_collision("r and b must have the same length");
    }
    for (int ri : r) {
        if (ri <= 0) {
            throw singular_collision("r_{i'} must be positive integers");
        }
    }
    double scale = 1.0;
    for (int i = 1; i <= 3; ++i) {
        scale = std::max(scale, std::abs(lat.e(i)));
    }
    for (const cplx &bi : b) {
        scale = std::max(scale, std::abs(bi));
    }
    const double tol = 1e-9 * scale;
    for (std::size_t ip = 0; ip < b.size(); ++ip) {
        for (int i = 1; i <= 3; ++i) {
            if (std::abs(b[ip] - lat.e(i)) < tol) {
                throw singular_collision("b collides with a lattice branch point e_i");
            }
        }
        for (std::size_t j = ip + 1; j < b.size(); ++j) {
            if (std::abs(b[ip] - b[j]) < tol) {
                throw singular_collision("two extra singularities coincide");
            }
        }
    }
}

} // namespace

int FuchsianData::N() const
{
    int n = l[0] + l[1] + l[2] + l[3];
    for (int ri : r) {
        n += ri;
    }
    return n;
}

int FuchsianData::r_total() const
{
    int n = 0;
    for (int ri : r) {
        n += ri;
    }
    return n;
}

cplx FuchsianData::v(cplx x) const
{
    cplx acc(0.0);
    for (int i = 0; i < 4; ++i) {
        if (l[i] != 0) {
            acc += double(l[i] * (l[i] + 1)) * lat.wp(x + lat.omega(i));
        }
    }
    const cplx wz = (M() > 0) ? lat.wp(x) : cplx(0.0);
    for (int ip = 0; ip < M(); ++ip) {
        const double rr = r[ip];
        acc += rr / 2.0 * (rr / 2.0 + 1.0) * (lat.wp(x - delta[ip]) + lat.wp(x + delta[ip]));
        acc += s[ip] / (wz - b[ip]);
    }
    return acc;
}

cplx FuchsianData::v_prime(cplx x) const
{
    cplx acc(0.0);
    for (int i = 0; i < 4; ++i) {
        if (l[i] != 0) {
            acc += double(l[i] * (l[i] + 1)) * lat.wp_prime(x + lat.omega(i));
        }
    }
    if (M() > 0) {
        const cplx wz = lat.wp(x), wpz = lat.wp_prime(x);
        for (int ip = 0; ip < M(); ++ip) {
            const double rr = r[ip];
            acc += rr / 2.0 * (rr / 2.0 + 1.0) *
                   (lat.wp_prime(x - delta[ip]) + lat.wp_prime(x + delta[ip]));
            acc -= s[ip] * wpz / ((wz - b[ip]) * (wz - b[ip]));
        }
    }
    return acc;
}

cplx FuchsianData::psi_g_sq_z(cplx z) const
{
    cplx acc(1.0);
    for (int ip = 0; ip < M(); ++ip) {
        for (int k = 0; k < r[ip]; ++k) {
            acc *= z - b[ip];
        }
    }
    return acc;
}

cplx FuchsianData::gauge_first_order(cplx x) const
{
    if (M() == 0) {
        return cplx(0.0);
    }
    const cplx wz = lat.wp(x), wpz = lat.wp_prime(x);
    cplx acc(0.0);
    for (int ip = 0; ip < M(); ++ip) {
        acc += double(r[ip]) * wpz / (wz - b[ip]);
    }
    return acc;
}

cplx FuchsianData::gauge_potential(cplx x) const
{
    const double R = r_total();
    cplx acc = (double(l[0]) + R) * (double(l[0]) + 1.0 - R) * lat.wp(x);
    for (int i = 1; i <= 3; ++i) {
        if (l[i] != 0) {
            acc += double(l[i] * (l[i] + 1)) * lat.wp(x + lat.omega(i));
        }
    }
    if (M() > 0) {
        const cplx wz = lat.wp(x);
        for (int ip = 0; ip < M(); ++ip) {
            acc += s_tilde[ip] / (wz - b[ip]);
        }
    }
    return acc;
}

std::vector<cplx> FuchsianData::singular_points() const
{
    std::vector<cplx> pts;
    for (int i = 0; i < 4; ++i) {
        pts.push_back(lat.reduce_corner(lat.omega(i)));
    }
    pts[0] = cplx(0.0);
    for (int ip = 0; ip < M(); ++ip) {
        pts.push_back(lat.reduce_corner(delta[ip]));
        pts.push_back(lat.reduce_corner(-delta[ip]));
    }
    return pts;
}

double FuchsianData::singular_distance(cplx x) const
{
    double dmin = std::numeric_limits<double>::infinity();
    for (cplx p : singular_points()) {
        dmin = std::min(dmin, lat.distance_mod_lattice(x, p));
    }
    return dmin;
}

FuchsianData elliptic_from_algebraic(const Lattice &lat, const std::array<int, 4> &l,
                                     const std::vector<int> &r, const std::vector<cplx> &b,
                                     const std::vector<cplx> &s, cplx E)
{
    validate_inputs(lat, l, r, b);
    if (s.size() != r.size()) {
        throw singular_collision("s and r must have the same length");
    }
    FuchsianData d{lat};
    d.l = l;
    d.r = r;
    d.b = b;
    d.s = s;
    d.E = E;
    derive_fields(d);
    return d;
}

FuchsianData elliptic_from_algebraic_o(const Lattice &lat, const std::array<int, 4> &l,
                                       const std::vector<int> &r, const std::vector<cplx> &b,
                                       const std::vector<cplx> &o, cplx E)
{
    validate_inputs(lat, l, r, b);
    if (o.size() != r.size()) {
        throw singular_collision("o and r must have the same length");
    }
    FuchsianData d{lat};
    d.l = l;
    d.r = r;
    d.b = b;
    d.s.assign(r.size(), cplx(0.0));
    d.E = E;
    derive_fields(d); // with s = 0: o = r * brace-part
    for (int ip = 0; ip < d.M(); ++ip) {
        d.s[ip] = d.o[ip] - o[ip]; // s = -o + r{...} = (r{...}) - o
    }
    derive_fields(d);
    return d;
}

std::pair<std::vector<cplx>, cplx> gauge_shift(const FuchsianData &d)
{
    return {d.s_tilde, d.Cg};
}

LocalExpansion local_expansion(const FuchsianData &d, int iprime, int sign, int extra)
{
    if (iprime < 0 || iprime >= d.M()) {
        throw insufficient_coefficients("local_expansion: no such extra singularity");
    }
    const cplx a = double(sign) * d.delta[iprime];
    const int n = d.r[iprime] + 1;
    const int jmax = n + extra;

    // Radius: at most a third of the distance to the nearest other
    // singularity of the gauge form.
    double dist = std::numeric_limits<double>::infinity();
    for (cplx p : d.singular_points()) {
        const double dd = d.lat.distance_mod_lattice(a, p);
        if (dd > 1e-10 * std::abs(d.lat.omega(1))) {
            dist = std::min(dist, dd);
        }
    }
    const double rho = dist / 3.0;

    // f'' + P f' + Q f = 0 with P = -gauge_first_order, Q = E + Cg - gauge_potential.
    const int nfft = 256;
    std::vector<cplx> psamp(nfft), qsamp(nfft);
    for (int k = 0; k < nfft; ++k) {
        const cplx w = rho * std::exp(cplx(0.0, 2.0 * pi * k / nfft));
        const cplx x = a + w;
        psamp[k] = -d.gauge_first_order(x) * w;                       // (x-a) P(x)
        qsamp[k] = (d.E + d.Cg - d.gauge_potential(x)) * w * w;       // (x-a)^2 Q(x)
    }
    LocalExpansion le;
    le.a = a;
    le.n = n;
    le.p.resize(jmax + 1);
    le.q.resize(jmax + 1);
    for (int j = 0; j <= jmax; ++j) {
        cplx ap(0.0), aq(0.0);
        for (int k = 0; k < nfft; ++k) {
            const cplx ph = std::exp(cplx(0.0, -2.0 * pi * j * k / nfft));
            ap += psamp[k] * ph;
            aq += qsamp[k] * ph;
        }
        const double rj = std::pow(rho, double(j));
        le.p[j] = ap / (double(nfft) * rj);
        le.q[j] = aq / (double(nfft) * rj);
    }
    return le;
}

ApparencyResult frobenius_is_apparent(const LocalExpansion &le)
{
    const int n = le.n;
    if (n < 1) {
        throw insufficient_coefficients("frobenius_is_apparent: exponent gap must be >= 1");
    }
    if (int(le.p.size()) < n + 1 || int(le.q.size()) < n + 1) {
        throw insufficient_coefficients("frobenius_is_apparent: need Laurent coefficients up to j = n");
    }
    const cplx a1 = le.alpha1();

    ApparencyResult res;
    res.c.assign(n, cplx(0.0));
    res.c[0] = 1.0;
    for (int j = 1; j < n; ++j) {
        cplx rhs(0.0);
        for (int jp = 0; jp < j; ++jp) {
            rhs += ((a1 + double(jp)) * le.p[j - jp] + le.q[j - jp]) * res.c[jp];
        }
        res.c[j] = -rhs / le.indicial(a1 + double(j));
    }
    cplx witness(0.0);
    for (int jp = 0; jp < n; ++jp) {
        witness += ((a1 + double(jp)) * le.p[n - jp] + le.q[n - jp]) * res.c[jp];
    }
    res.witness = witness;

    double cmax = 0.0, pqmax = 0.0;
    for (const cplx &cj : res.c) {
        cmax = std::max(cmax, std::abs(cj));
    }
    for (int j = 0; j <= n; ++j) {
        pqmax = std::max({pqmax, std::abs(le.p[j]), std::abs(le.q[j])});
    }
    res.scale = std::max(cmax * pqmax, 1e-300);
    res.apparent = std::abs(witness) < 1e-9 * res.scale;
    return res;
}

cplx apparency_p_of_mu(const std::array<int, 4> &l, cplx b1, cplx mu1, const Lattice &lat)
{
    const double scale = std::max({1.0, std::abs(lat.e(1)), std::abs(lat.e(2)), std::abs(lat.e(3))});
    for (int i = 1; i <= 3; ++i) {
        if (std::abs(b1 - lat.e(i)) < 1e-9 * scale) {
            throw singular_collision("apparency_p_of_mu: b1 collides with e_i");
        }
    }
    cplx lin(0.0);
    for (int i = 1; i <= 3; ++i) {
        lin += (double(l[i]) + 0.5) / (b1 - lat.e(i));
    }
    const double l123 = l[1] + l[2] + l[3];
    return weier_cubic(b1, lat.g2(), lat.g3()) * (-mu1 * mu1 + lin * mu1) -
           b1 * (l123 - double(l[0])) * (l123 + double(l[0]) + 1.0);
}

std::array<cplx, 4> apparency_cubic_r2(const std::array<int, 4> &l, cplx b1, cplx E,
                                       const Lattice &lat)
{
    auto [f0, f1] = f0_f1_polys(l, lat);
    return {cplx(1.0), 12.0 * b1 * b1 - lat.g2(),
            4.0 * weier_cubic(b1, lat.g2(), lat.g3()) * E + f1.eval(b1), f0.eval(b1)};
}

std::pair<Poly, Poly> f0_f1_polys(const std::array<int, 4> &l, const Lattice &lat)
{
    const cplx g2 = lat.g2(), g3 = lat.g3();
    const Poly W({-g3, -g2, cplx(0.0), cplx(4.0)}); // 4 b^3 - g2 b - g3
    const Poly six_sq = Poly({-g2 / 2.0, cplx(0.0), cplx(6.0)}); // 6 b^2 - g2/2

    auto others = [](int i) -> std::pair<int, int> {
        switch (i) {
        case 1: return {2, 3};
        case 2: return {1, 3};
        default: return {1, 2};
        }
    };

    Poly f0 = W * W * cplx(double((2 * l[0] + 1) * (2 * l[0] + 1)));
    Poly f1 = (Poly({cplx(0.0), cplx(1.0)}) * W) *
                  cplx(-2.0 * double(2 * l[0] * l[0] + 2 * l[0] + 5)) +
              six_sq * six_sq;
    for (int i = 1; i <= 3; ++i) {
        auto [i1, i2] = others(i);
        const cplx ei = lat.e(i), ej = lat.e(i1), ek = lat.e(i2);
        const Poly bj = Poly::linear(ej), bk = Poly::linear(ek);
        f0 += bj * bj * bk * bk *
              cplx(-16.0 * double((2 * l[i] + 1) * (2 * l[i] + 1)) * (ei - ej) * (ei - ek));
        f1 += bj * bk * Poly({ei * ei + ej * ek, ei}) *
              cplx(-8.0 * double(2 * l[i] * l[i] + 2 * l[i] + 1));
    }
    return {f0, f1};
}

} // namespace heunhk
