#include "heunhk/finite_gap.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace heunhk {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

// Q of the per-E Xi normalised to 1 at a fixed generic point x_star.
struct QhatSampler {
    std::function<FuchsianData(cplx)> make_data;
    const Lattice &lat;
    cplx x_star;
    std::uint64_t seed;

    cplx operator()(cplx E) const
    {
        const FuchsianData d = make_data(E);
        XiOptions opts;
        opts.seed = seed;
        const XiFunction xi = build_xi(d, opts);
        const cplx at_star = xi.eval(x_star);
        if (std::abs(at_star) < 1e-12) {
            throw root_conditioning("Xi vanishes at the normalisation point");
        }
        const XiFunction xin = xi.rescaled(1.0 / at_star);
        return q_value(xin);
    }
};

struct RationalFit {
    Poly numerator; // monic of degree 2g+1, in the scaled variable
    Poly denominator;
    double heldout;
};

// Fit qhat(E) = N(E)/D(E) with N monic of degree 2g+1, deg D = 2g, over
// scaled samples; returns the held-out relative residual.
RationalFit fit_rational(const std::vector<cplx> &Es, const std::vector<cplx> &qs, int g,
                         int n_fit)
{
    const int dn = 2 * g + 1, dd = 2 * g;
    const int unknowns = (dn) + (dd + 1); // n_0..n_{2g}, d_0..d_{2g}
    Eigen::MatrixXcd A(n_fit, unknowns);
    Eigen::VectorXcd rhs(n_fit);
    for (int k = 0; k < n_fit; ++k) {
        cplx Ep(1.0);
        for (int j = 0; j <= dd; ++j) {
            A(k, dn + j) = qs[k] * Ep; // d_j terms
            if (j < dn) {
                A(k, j) = -Ep; // n_j terms
            }
            Ep *= Es[k];
        }
        rhs(k) = Ep; // = E^{2g+1}
    }
    Eigen::VectorXcd sol = A.colPivHouseholderQr().solve(rhs);

    RationalFit fit;
    fit.numerator.c.assign(dn + 1, cplx(0.0));
    for (int j = 0; j < dn; ++j) {
        fit.numerator.c[j] = sol(j);
    }
    fit.numerator.c[dn] = 1.0;
    fit.denominator.c.assign(dd + 1, cplx(0.0));
    for (int j = 0; j <= dd; ++j) {
        fit.denominator.c[j] = sol(dn + j);
    }

    double worst = 0.0;
    for (std::size_t k = n_fit; k < Es.size(); ++k) {
        const cplx N = fit.numerator.eval(Es[k]);
        const cplx D = fit.denominator.eval(Es[k]);
        const double denom = std::abs(qs[k] * D) + std::abs(N) + 1.0;
        worst = std::max(worst, std::abs(qs[k] * D - N) / denom);
    }
    fit.heldout = worst;
    return fit;
}

SpectralData detect_spectral(const QhatSampler &sampler, const Lattice &lat,
                             const SpectralOptions &opts)
{
    // Sample radius set by the potential scale.
    double escale = 1.0;
    for (int i = 1; i <= 3; ++i) {
        escale = std::max(escale, std::abs(lat.e(i)));
    }
    const double R = 3.0 * escale;

    std::vector<cplx> Es, qs;
    auto ensure_samples = [&](int count) {
        while (int(Es.size()) < count) {
            const std::size_t k = Es.size();
            // Dense deterministic angles, incommensurate with any small cycle.
            const double th = 2.0 * pi * std::fmod(0.61803398874989484 * double(k + 1), 1.0);
            cplx E = R * std::exp(cplx(0.0, th));
            for (int tries = 0;; ++tries) {
                try {
                    qs.push_back(sampler(E));
                    break;
                } catch (const root_conditioning &) {
                    if (tries >= 4) {
                        throw;
                    }
                    E *= std::exp(cplx(0.0, 0.013));
                }
            }
            Es.push_back(E / R); // fit in the scaled variable
        }
    };

    for (int g = 0; g <= opts.g_max; ++g) {
        const int n_fit = 4 * g + 6;
        const int n_held = 2 * g + 5;
        ensure_samples(n_fit + n_held);
        const RationalFit fit = fit_rational(Es, qs, g, n_fit);
        if (fit.heldout < opts.fit_tol) {
            SpectralData sd;
            sd.g = g;
            sd.fit_residual = fit.heldout;
            // Unscale: Q(E) = R^{2g+1} N(E/R).
            sd.Q_poly.c.assign(2 * g + 2, cplx(0.0));
            for (int j = 0; j <= 2 * g + 1; ++j) {
                sd.Q_poly.c[j] = fit.numerator.c[j] * std::pow(R, double(2 * g + 1 - j));
            }
            sd.band_edges = poly_roots(sd.Q_poly);
            return sd;
        }
    }
    throw degree_detection_failed("no rational fit of Q below g_max reached the residual floor");
}

} // namespace

SpectralData spectral_poly_m0(const std::array<int, 4> &l, const Lattice &lat,
                              const SpectralOptions &opts)
{
    const cplx x_star = 2.0 * 0.313 * lat.omega(1) + 2.0 * 0.171 * lat.omega(3);
    QhatSampler sampler{
        [&lat, l](cplx E) { return elliptic_from_algebraic(lat, l, {}, {}, {}, E); }, lat, x_star,
        opts.seed};
    return detect_spectral(sampler, lat, opts);
}

std::vector<cplx> treibich_b1_roots(const std::array<int, 4> &l, const Lattice &lat)
{
    auto [f0, f1] = f0_f1_polys(l, lat);
    (void)f1;
    std::vector<cplx> roots = poly_roots(f0);

    // Polish on f0 and validate through the Frobenius recursion at +-delta1.
    const Poly df0 = f0.derivative();
    std::mt19937_64 rng(20240817);
    for (cplx &b1 : roots) {
        for (int it = 0; it < 30; ++it) {
            const cplx f = f0.eval(b1), fp = df0.eval(b1);
            if (std::abs(fp) < 1e-300) {
                break;
            }
            const cplx step = f / fp;
            b1 -= step;
            if (std::abs(step) < 1e-14 * (1.0 + std::abs(b1))) {
                break;
            }
        }
        for (int k = 0; k < 3; ++k) {
            const cplx E(double(rng() % 1000) / 250.0 - 2.0, double(rng() % 1000) / 250.0 - 2.0);
            const FuchsianData d = elliptic_from_algebraic(lat, l, {2}, {b1}, {cplx(0.0)}, E);
            for (int sign : {+1, -1}) {
                const auto app = frobenius_is_apparent(local_expansion(d, 0, sign));
                if (!app.apparent) {
                    throw root_conditioning("f0 root failed the apparency validation");
                }
            }
        }
    }
    return roots;
}

SpectralData spectral_poly_m1r2(const std::array<int, 4> &l, cplx b1_root, const Lattice &lat,
                                const SpectralOptions &opts)
{
    const cplx x_star = 2.0 * 0.293 * lat.omega(1) + 2.0 * 0.181 * lat.omega(3);
    QhatSampler sampler{[&lat, l, b1_root](cplx E) {
                            return elliptic_from_algebraic(lat, l, {2}, {b1_root}, {cplx(0.0)},
                                                           E);
                        },
                        lat, x_star, opts.seed};
    return detect_spectral(sampler, lat, opts);
}

} // namespace heunhk
