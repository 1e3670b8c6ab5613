#include "heunhk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace heunhk {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;
const cplx imag_unit(0.0, 1.0);
constexpr std::size_t max_theta_terms = 4096;

std::string cplx_str(cplx z)
{
    std::ostringstream os;
    os.precision(17);
    os << '(' << z.real() << ',' << z.imag() << ')';
    return os.str();
}

double binom(int n, int k)
{
    double r = 1.0;
    for (int j = 1; j <= k; ++j) {
        r *= double(n - k + j) / double(j);
    }
    return r;
}

} // namespace

Lattice::Lattice(cplx omega1, cplx omega3) : omega1_(omega1), omega3_(omega3)
{
    if (!std::isfinite(omega1.real()) || !std::isfinite(omega1.imag()) ||
        !std::isfinite(omega3.real()) || !std::isfinite(omega3.imag()) ||
        omega1 == cplx(0.0)) {
        throw degenerate_lattice("non-finite or zero half-period");
    }
    tau_ = omega3 / omega1;
    if (tau_.imag() <= 0.0) {
        throw degenerate_lattice("Im(omega3/omega1) must be positive, got " + cplx_str(tau_));
    }
    q_ = std::exp(imag_unit * pi * tau_);
    if (std::abs(q_) >= 1.0 - 1e-6) {
        throw degenerate_lattice("nome too close to the unit circle, |q| = " +
                                 std::to_string(std::abs(q_)));
    }

    omegas_ = {cplx(0.0), omega1_, -omega1_ - omega3_, omega3_};
    pole_guard_ = 1e-8 * std::abs(omega1_);

    // Theta null values. E(s) = exp(i*pi*tau*s) keeps complex powers of the
    // nome branch-free.
    auto E = [&](double s) { return std::exp(imag_unit * pi * tau_ * s); };
    cplx t2(0.0), t3(0.0), t4(0.0), t1p(0.0), t1ppp(0.0);
    for (std::size_t n = 0; n < max_theta_terms; ++n) {
        const double nn = double(n);
        const double tw = 2.0 * nn + 1.0;
        const cplx qh = E((nn + 0.5) * (nn + 0.5));
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        t2 += 2.0 * qh;
        t1p += 2.0 * sgn * tw * qh;
        t1ppp += -2.0 * sgn * tw * tw * tw * qh;
        if (n >= 1) {
            const cplx qn = E(nn * nn);
            t3 += 2.0 * qn;
            t4 += 2.0 * sgn * qn; // here sgn = (-1)^n
        }
        if (std::abs(qh) < 1e-18 * (std::abs(t2) + 1.0) && n > 2) {
            break;
        }
    }
    t3 += 1.0;
    t4 += 1.0;
    theta20_ = t2;
    theta30_ = t3;
    theta40_ = t4;
    theta1p0_ = t1p;

    const cplx rfac = pi * pi / (12.0 * omega1_ * omega1_);
    const cplx t2q = t2 * t2 * t2 * t2, t4q = t4 * t4 * t4 * t4;
    es_[0] = rfac * (t2q + 2.0 * t4q);
    es_[1] = rfac * (t2q - t4q);
    es_[2] = -rfac * (2.0 * t2q + t4q);

    g2_ = -4.0 * (es_[0] * es_[1] + es_[1] * es_[2] + es_[2] * es_[0]);
    g3_ = 4.0 * es_[0] * es_[1] * es_[2];

    etas_[0] = -pi * pi / (12.0 * omega1_) * (t1ppp / t1p);
    etas_[2] = (etas_[0] * omega3_ - imag_unit * pi / 2.0) / omega1_; // Legendre
    etas_[1] = -etas_[0] - etas_[2];

    wp_fac_ = pi * theta30_ * theta40_ / (2.0 * omega1_);
    wp_fac_ *= wp_fac_;
    sigma_fac_ = 2.0 * omega1_ / (pi * theta1p0_);
}

double Lattice::legendre_residual() const
{
    return std::abs(etas_[0] * omega3_ - etas_[2] * omega1_ - imag_unit * pi / 2.0);
}

Lattice::Theta12 Lattice::theta12(cplx u) const
{
    auto E = [&](double s) { return std::exp(imag_unit * pi * tau_ * s); };
    const cplx s1 = std::sin(u), c1 = std::cos(u);
    const cplx s2 = 2.0 * s1 * c1, c2 = c1 * c1 - s1 * s1;
    cplx sn = s1, cn = c1; // sin((2n+1)u), cos((2n+1)u)
    Theta12 th{0.0, 0.0, 0.0, 0.0};
    std::size_t quiet = 0;
    for (std::size_t n = 0; n < max_theta_terms; ++n) {
        const double tw = 2.0 * double(n) + 1.0;
        const cplx qh = E((double(n) + 0.5) * (double(n) + 0.5));
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        const cplx a1 = 2.0 * sgn * qh * sn;
        const cplx a1p = 2.0 * sgn * tw * qh * cn;
        const cplx a2 = 2.0 * qh * cn;
        const cplx a2p = -2.0 * tw * qh * sn;
        th.t1 += a1;
        th.t1p += a1p;
        th.t2 += a2;
        th.t2p += a2p;
        const double scale = std::abs(th.t1) + std::abs(th.t2) + 1e-300;
        if (std::abs(a1) + std::abs(a2) <= 1e-17 * scale) {
            if (++quiet == 2) {
                break;
            }
        } else {
            quiet = 0;
        }
        const cplx ns = sn * c2 + cn * s2;
        const cplx nc = cn * c2 - sn * s2;
        sn = ns;
        cn = nc;
    }
    return th;
}

std::pair<double, double> Lattice::lattice_coords(cplx z) const
{
    const cplx w = z / (2.0 * omega1_); // = a + b*tau
    const double b = w.imag() / tau_.imag();
    const double a = w.real() - b * tau_.real();
    return {a, b};
}

Lattice::Reduced Lattice::reduce_full(cplx z) const
{
    auto [a, b] = lattice_coords(z);
    const double m = std::floor(a + 0.5);
    const double n = std::floor(b + 0.5);
    return {z - 2.0 * m * omega1_ - 2.0 * n * omega3_, long(m), long(n)};
}

cplx Lattice::reduce(cplx z) const
{
    return reduce_full(z).z;
}

cplx Lattice::reduce_corner(cplx z) const
{
    auto [a, b] = lattice_coords(z);
    return z - 2.0 * std::floor(a) * omega1_ - 2.0 * std::floor(b) * omega3_;
}

double Lattice::lattice_distance(cplx z) const
{
    const cplx zr = reduce_full(z).z;
    // The centred representative may not be the closest lattice translate for
    // strongly sheared cells; check the four corner neighbours too.
    double d = std::abs(zr);
    for (int dm = -1; dm <= 1; ++dm) {
        for (int dn = -1; dn <= 1; ++dn) {
            d = std::min(d, std::abs(zr - 2.0 * double(dm) * omega1_ - 2.0 * double(dn) * omega3_));
        }
    }
    return d;
}

double Lattice::distance_mod_lattice(cplx z, cplx p) const
{
    return lattice_distance(z - p);
}

bool Lattice::on_lattice(cplx z, double tol) const
{
    return lattice_distance(z) < tol;
}

void Lattice::require_off_lattice(cplx zr, const char *what) const
{
    if (lattice_distance(zr) < pole_guard_) {
        throw pole_proximity(std::string(what) + ": argument within pole guard of a lattice point");
    }
}

cplx Lattice::wp_reduced(cplx zr) const
{
    const cplx u = pi * zr / (2.0 * omega1_);
    const Theta12 th = theta12(u);
    const cplx r = th.t2 / th.t1;
    return es_[0] + wp_fac_ * r * r;
}

cplx Lattice::wp_prime_reduced(cplx zr) const
{
    const cplx u = pi * zr / (2.0 * omega1_);
    const Theta12 th = theta12(u);
    const cplx r = th.t2 / th.t1;
    const cplx dr = (th.t2p * th.t1 - th.t2 * th.t1p) / (th.t1 * th.t1);
    return 2.0 * wp_fac_ * r * dr * (pi / (2.0 * omega1_));
}

cplx Lattice::wp(cplx z) const
{
    const cplx zr = reduce_full(z).z;
    require_off_lattice(zr, "wp");
    return wp_reduced(zr);
}

cplx Lattice::wp_prime(cplx z) const
{
    const cplx zr = reduce_full(z).z;
    require_off_lattice(zr, "wp_prime");
    return wp_prime_reduced(zr);
}

cplx Lattice::wp_second(cplx z) const
{
    const cplx p = wp(z);
    return 6.0 * p * p - g2_ / 2.0;
}

void Lattice::wp_derivs(cplx z, std::vector<cplx> &out) const
{
    if (out.empty()) {
        return;
    }
    const cplx zr = reduce_full(z).z;
    require_off_lattice(zr, "wp_derivs");
    out[0] = wp_reduced(zr);
    if (out.size() > 1) {
        out[1] = wp_prime_reduced(zr);
    }
    // (d/dz)^k of wp''= 6 wp^2 - g2/2, via Leibniz on the square.
    for (std::size_t n = 2; n < out.size(); ++n) {
        cplx acc(0.0);
        for (std::size_t k = 0; k + 2 <= n; ++k) {
            acc += binom(int(n) - 2, int(k)) * out[k] * out[n - 2 - k];
        }
        out[n] = 6.0 * acc;
        if (n == 2) {
            out[n] -= g2_ / 2.0;
        }
    }
}

cplx Lattice::zeta(cplx z) const
{
    const Reduced red = reduce_full(z);
    require_off_lattice(red.z, "zeta");
    const cplx u = pi * red.z / (2.0 * omega1_);
    const Theta12 th = theta12(u);
    cplx val = etas_[0] * red.z / omega1_ + pi / (2.0 * omega1_) * th.t1p / th.t1;
    return val + 2.0 * double(red.m) * etas_[0] + 2.0 * double(red.n) * etas_[2];
}

cplx Lattice::sigma(cplx z) const
{
    const Reduced red = reduce_full(z);
    const cplx u = pi * red.z / (2.0 * omega1_);
    const Theta12 th = theta12(u);
    cplx val = sigma_fac_ * std::exp(etas_[0] * red.z * red.z / (2.0 * omega1_)) * th.t1;
    if (red.m == 0 && red.n == 0) {
        return val;
    }
    // sigma(z + 2m w1 + 2n w3) = (-1)^(m+n+mn) sigma(z) exp(H (z + m w1 + n w3)),
    // H = 2m eta1 + 2n eta3.
    const cplx H = 2.0 * double(red.m) * etas_[0] + 2.0 * double(red.n) * etas_[2];
    const double sgn = ((red.m + red.n + red.m * red.n) % 2 == 0) ? 1.0 : -1.0;
    return sgn * val * std::exp(H * (red.z + double(red.m) * omega1_ + double(red.n) * omega3_));
}

cplx Lattice::co_sigma(int i, cplx z) const
{
    return std::exp(-etas_[i - 1] * z) * sigma(z + omegas_[i]) / sigma(omegas_[i]);
}

cplx Lattice::co_wp(int i, cplx z) const
{
    const cplx zr = reduce_full(z).z;
    require_off_lattice(zr, "co_wp");
    return co_sigma(i, z) / sigma(z);
}

cplx Lattice::phi(int i, cplx alpha, cplx z) const
{
    if (on_lattice(alpha, pole_guard_)) {
        throw alpha_on_lattice("phi: alpha within pole guard of a lattice point");
    }
    if (lattice_distance(z + omegas_[i]) < pole_guard_) {
        throw pole_proximity("phi: z + omega_i within pole guard of a lattice point");
    }
    return sigma(z + omegas_[i] - alpha) / sigma(z + omegas_[i]) * std::exp(zeta(alpha) * z);
}

void Lattice::phi_derivs(int i, cplx alpha, cplx z, std::vector<cplx> &out) const
{
    if (out.empty()) {
        return;
    }
    const std::size_t kmax = out.size() - 1;
    out[0] = phi(i, alpha, z);
    if (kmax == 0) {
        return;
    }
    // log Phi has derivative g(z) = zeta(z+w_i-alpha) - zeta(z+w_i) + zeta(alpha),
    // so Phi^(k) = Phi * B_k(g, g', ...) with the complete Bell recursion.
    std::vector<cplx> g(kmax);
    g[0] = zeta(z + omegas_[i] - alpha) - zeta(z + omegas_[i]) + zeta(alpha);
    if (kmax > 1) {
        std::vector<cplx> da(kmax - 1), db(kmax - 1);
        wp_derivs(z + omegas_[i] - alpha, da);
        wp_derivs(z + omegas_[i], db);
        for (std::size_t j = 1; j < kmax; ++j) {
            g[j] = -da[j - 1] + db[j - 1];
        }
    }
    std::vector<cplx> bell(kmax + 1);
    bell[0] = 1.0;
    for (std::size_t k = 0; k < kmax; ++k) {
        cplx acc(0.0);
        for (std::size_t j = 0; j <= k; ++j) {
            acc += binom(int(k), int(j)) * bell[k - j] * g[j];
        }
        bell[k + 1] = acc;
    }
    for (std::size_t k = 1; k <= kmax; ++k) {
        out[k] = out[0] * bell[k];
    }
}

cplx Lattice::wp_inverse(cplx w, std::optional<cplx> sign_hint) const
{
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        throw no_convergence("wp_inverse: non-finite target");
    }
    const double scale = std::max({1.0, std::abs(es_[0]), std::abs(es_[1]), std::abs(es_[2]), std::abs(w)});
    for (int i = 1; i <= 3; ++i) {
        if (std::abs(w - e(i)) < 1e-12 * scale) {
            return reduce_corner(omegas_[i]);
        }
    }

    // Newton from a deterministic seed grid, best initial residual first.
    std::vector<cplx> seeds;
    for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
            seeds.push_back(2.0 * ((i + 0.5) / 7.0 - 0.5) * omega1_ +
                            2.0 * ((j + 0.5) / 7.0 - 0.5) * omega3_);
        }
    }
    if (std::abs(w) > 4.0 * scale) {
        // Large targets live near the pole; 1/sqrt(w) is an excellent seed.
        const cplx s = 1.0 / std::sqrt(w);
        seeds.insert(seeds.begin(), {s, -s});
    }
    std::vector<std::pair<double, cplx>> ranked;
    ranked.reserve(seeds.size());
    for (cplx s : seeds) {
        if (lattice_distance(s) < 64.0 * pole_guard_) {
            continue;
        }
        ranked.emplace_back(std::abs(wp(s) - w), s);
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });

    const double tol = 1e-11 * std::max(1.0, std::abs(w));
    cplx root(0.0);
    bool found = false;
    for (const auto &[res0, seed] : ranked) {
        cplx zk = seed;
        for (int it = 0; it < 60; ++it) {
            cplx f, fp;
            try {
                f = wp(zk) - w;
                fp = wp_prime(zk);
            } catch (const pole_proximity &) {
                break;
            }
            if (std::abs(f) < tol) {
                found = true;
                break;
            }
            if (std::abs(fp) < 1e-14 * (1.0 + std::abs(f))) {
                zk += 0.05 * omega1_ + 0.03 * omega3_;
                continue;
            }
            cplx step = f / fp;
            const double cap = 0.45 * std::min(std::abs(omega1_), std::abs(omega3_));
            if (std::abs(step) > cap) {
                step *= cap / std::abs(step);
            }
            zk = reduce(zk - step);
            if (lattice_distance(zk) < 4.0 * pole_guard_) {
                zk += 16.0 * pole_guard_ * (omega1_ / std::abs(omega1_));
            }
        }
        if (found) {
            root = zk;
            break;
        }
    }
    if (!found) {
        throw no_convergence("wp_inverse: Newton failed from every seed for w = " + cplx_str(w));
    }

    const cplx c1 = reduce_corner(root);
    const cplx c2 = reduce_corner(-root);
    if (sign_hint) {
        const cplx h = *sign_hint;
        return (std::abs(wp_prime(c1) - h) <= std::abs(wp_prime(c2) - h)) ? c1 : c2;
    }
    auto half_plane = [&](cplx c) { return (c / omega1_).imag() >= -1e-12; };
    const bool h1 = half_plane(c1), h2 = half_plane(c2);
    if (h1 != h2) {
        return h1 ? c1 : c2;
    }
    const cplx centre = omega1_ + omega3_;
    const double d1 = std::abs(c1 - centre), d2 = std::abs(c2 - centre);
    if (std::abs(d1 - d2) > 1e-12 * std::abs(centre)) {
        return d1 < d2 ? c1 : c2;
    }
    if (c1.real() != c2.real()) {
        return c1.real() < c2.real() ? c1 : c2;
    }
    return c1.imag() <= c2.imag() ? c1 : c2;
}

} // namespace heunhk
