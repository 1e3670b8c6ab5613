#include "heunhk/xi.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace heunhk {

namespace {

double uniform01(std::mt19937_64 &rng)
{
    return double(rng() >> 11) * 0x1.0p-53;
}

// Derivatives 0..3 of p^m from derivatives of p.
void power_derivs(const std::vector<cplx> &p, int m, std::array<cplx, 4> &out)
{
    const double md = m;
    const cplx pm3 = (m >= 3) ? std::pow(p[0], m - 3) : cplx(0.0);
    const cplx pm2 = (m >= 2) ? ((m >= 3) ? pm3 * p[0] : cplx(1.0)) : cplx(0.0);
    const cplx pm1 = (m >= 1) ? ((m >= 2) ? pm2 * p[0] : cplx(1.0)) : cplx(0.0);
    const cplx pm0 = pm1 * p[0];
    out[0] = pm0;
    out[1] = md * pm1 * p[1];
    out[2] = md * (md - 1.0) * pm2 * p[1] * p[1] + md * pm1 * p[2];
    out[3] = md * (md - 1.0) * (md - 2.0) * pm3 * p[1] * p[1] * p[1] +
             3.0 * md * (md - 1.0) * pm2 * p[1] * p[2] + md * pm1 * p[3];
}

// Derivatives 0..3 of u^{-m} from derivatives of u.
void inv_power_derivs(const std::vector<cplx> &u, int m, std::array<cplx, 4> &out)
{
    const double md = m;
    const cplx im1 = std::pow(u[0], -(m + 1));
    const cplx im0 = im1 * u[0];
    const cplx im2 = im1 / u[0];
    const cplx im3 = im2 / u[0];
    out[0] = im0;
    out[1] = -md * im1 * u[1];
    out[2] = md * (md + 1.0) * im2 * u[1] * u[1] - md * im1 * u[2];
    out[3] = -md * (md + 1.0) * (md + 2.0) * im3 * u[1] * u[1] * u[1] +
             3.0 * md * (md + 1.0) * im2 * u[1] * u[2] - md * im1 * u[3];
}

struct TermEvaluator {
    const FuchsianData &d;
    std::vector<std::vector<cplx>> wp_at; // wp derivs at x + omega_i as needed
    std::vector<cplx> wp0;                // wp derivs at x

    TermEvaluator(const FuchsianData &data, cplx x) : d(data)
    {
        wp_at.assign(4, {});
        bool need0 = d.M() > 0;
        for (int i = 0; i < 4; ++i) {
            if (d.l[i] > 0) {
                wp_at[i].assign(4, cplx(0.0));
                d.lat.wp_derivs(x + d.lat.omega(i), wp_at[i]);
            }
        }
        if (need0 && wp_at[0].empty()) {
            wp0.assign(4, cplx(0.0));
            d.lat.wp_derivs(x, wp0);
        } else if (need0) {
            wp0 = wp_at[0];
        }
    }

    void derivs(const XiTerm &t, std::array<cplx, 4> &out) const
    {
        switch (t.kind) {
        case XiTerm::constant:
            out = {cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0)};
            return;
        case XiTerm::wp_power:
            power_derivs(wp_at[t.i], t.m, out);
            return;
        case XiTerm::pole_power: {
            std::vector<cplx> u = wp0;
            u[0] -= d.b[t.i];
            inv_power_derivs(u, t.m, out);
            return;
        }
        }
    }
};

std::vector<cplx> collocation_points(const FuchsianData &d, std::mt19937_64 &rng, int count,
                                     double guard)
{
    std::vector<cplx> pts;
    int attempts = 0;
    while (int(pts.size()) < count) {
        if (++attempts > 100000) {
            throw empty_nullspace("could not place collocation points away from singularities");
        }
        const double a = 0.02 + 0.96 * uniform01(rng);
        const double bb = 0.02 + 0.96 * uniform01(rng);
        const cplx x = 2.0 * a * d.lat.omega(1) + 2.0 * bb * d.lat.omega(3);
        if (d.singular_distance(x) < guard) {
            continue;
        }
        pts.push_back(x);
    }
    return pts;
}

} // namespace

std::vector<XiTerm> xi_terms(const FuchsianData &d)
{
    std::vector<XiTerm> terms;
    terms.push_back({XiTerm::constant, 0, 0});
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < d.l[i]; ++j) {
            terms.push_back({XiTerm::wp_power, i, d.l[i] - j});
        }
    }
    for (int ip = 0; ip < d.M(); ++ip) {
        for (int j = 0; j < d.r[ip]; ++j) {
            terms.push_back({XiTerm::pole_power, ip, d.r[ip] - j});
        }
    }
    return terms;
}

XiFunction::XiFunction(FuchsianData d, std::vector<XiTerm> terms,
                       std::vector<std::vector<cplx>> nullspace, double heldout_residual)
    : d_(std::move(d)), terms_(std::move(terms)), nullspace_(std::move(nullspace)),
      heldout_residual_(heldout_residual)
{
    coef_ = nullspace_.front();
}

void XiFunction::evals(cplx x, std::array<cplx, 4> &out) const
{
    TermEvaluator ev(d_, x);
    out = {cplx(0.0), cplx(0.0), cplx(0.0), cplx(0.0)};
    std::array<cplx, 4> t{};
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        ev.derivs(terms_[j], t);
        for (int k = 0; k < 4; ++k) {
            out[k] += coef_[j] * t[k];
        }
    }
}

cplx XiFunction::eval(cplx x, int deriv) const
{
    std::array<cplx, 4> out{};
    evals(x, out);
    return out[deriv];
}

cplx XiFunction::eval_z(cplx z) const
{
    cplx acc(0.0);
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const XiTerm &t = terms_[j];
        cplx val(0.0);
        switch (t.kind) {
        case XiTerm::constant:
            val = 1.0;
            break;
        case XiTerm::wp_power:
            if (t.i == 0) {
                val = std::pow(z, t.m);
            } else {
                const auto [j1, j2] = (t.i == 1)   ? std::pair{2, 3}
                                      : (t.i == 2) ? std::pair{1, 3}
                                                   : std::pair{1, 2};
                const cplx A = (d_.lat.e(t.i) - d_.lat.e(j1)) * (d_.lat.e(t.i) - d_.lat.e(j2));
                val = std::pow(d_.lat.e(t.i) + A / (z - d_.lat.e(t.i)), t.m);
            }
            break;
        case XiTerm::pole_power:
            val = std::pow(z - d_.b[t.i], -t.m);
            break;
        }
        acc += coef_[j] * val;
    }
    return acc;
}

cplx XiFunction::dz(cplx z) const
{
    cplx acc(0.0);
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const XiTerm &t = terms_[j];
        cplx val(0.0);
        switch (t.kind) {
        case XiTerm::constant:
            break;
        case XiTerm::wp_power:
            if (t.i == 0) {
                val = double(t.m) * std::pow(z, t.m - 1);
            } else {
                const auto [j1, j2] = (t.i == 1)   ? std::pair{2, 3}
                                      : (t.i == 2) ? std::pair{1, 3}
                                                   : std::pair{1, 2};
                const cplx ei = d_.lat.e(t.i);
                const cplx A = (ei - d_.lat.e(j1)) * (ei - d_.lat.e(j2));
                val = double(t.m) * std::pow(ei + A / (z - ei), t.m - 1) *
                      (-A / ((z - ei) * (z - ei)));
            }
            break;
        case XiTerm::pole_power:
            val = -double(t.m) * std::pow(z - d_.b[t.i], -t.m - 1);
            break;
        }
        acc += coef_[j] * val;
    }
    return acc;
}

cplx XiFunction::at_zero() const
{
    if (d_.l[0] != 0) {
        throw pole_proximity("Xi has a pole at the origin when l0 > 0");
    }
    cplx acc(0.0);
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const XiTerm &t = terms_[j];
        if (t.kind == XiTerm::constant) {
            acc += coef_[j];
        } else if (t.kind == XiTerm::wp_power) {
            acc += coef_[j] * std::pow(d_.lat.e(t.i), t.m); // wp(omega_i) = e_i
        }
        // pole_power terms vanish at z = infinity.
    }
    return acc;
}

Poly XiFunction::numerator() const
{
    // Factor list of the base polynomial prod (z-b)^r prod_{i>=1} (z-e_i)^{l_i};
    // each term may cancel part of it.
    auto base_with = [&](int drop_kind, int drop_i, int drop_m) {
        Poly out = Poly::constant(cplx(1.0));
        for (int ip = 0; ip < d_.M(); ++ip) {
            int pw = d_.r[ip] - ((drop_kind == XiTerm::pole_power && drop_i == ip) ? drop_m : 0);
            out = out * poly_pow(Poly::linear(d_.b[ip]), pw);
        }
        for (int i = 1; i <= 3; ++i) {
            int pw = d_.l[i] - ((drop_kind == XiTerm::wp_power && drop_i == i) ? drop_m : 0);
            out = out * poly_pow(Poly::linear(d_.lat.e(i)), pw);
        }
        return out;
    };

    Poly acc = Poly::constant(cplx(0.0));
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const XiTerm &t = terms_[j];
        switch (t.kind) {
        case XiTerm::constant:
            acc += base_with(-1, 0, 0) * coef_[j];
            break;
        case XiTerm::wp_power:
            if (t.i == 0) {
                std::vector<cplx> zc(t.m + 1, cplx(0.0));
                zc[t.m] = 1.0;
                acc += Poly(zc) * base_with(-1, 0, 0) * coef_[j];
            } else {
                const auto [j1, j2] = (t.i == 1)   ? std::pair{2, 3}
                                      : (t.i == 2) ? std::pair{1, 3}
                                                   : std::pair{1, 2};
                const cplx ei = d_.lat.e(t.i);
                const cplx A = (ei - d_.lat.e(j1)) * (ei - d_.lat.e(j2));
                // (e_i + A/(z-e_i))^m * base: binomial in the pole part.
                double binom = 1.0;
                for (int k = 0; k <= t.m; ++k) {
                    const cplx fac = binom * std::pow(ei, t.m - k) * std::pow(A, k);
                    acc += base_with(XiTerm::wp_power, t.i, k) * (coef_[j] * fac);
                    binom *= double(t.m - k) / double(k + 1);
                }
            }
            break;
        case XiTerm::pole_power:
            acc += base_with(XiTerm::pole_power, t.i, t.m) * coef_[j];
            break;
        }
    }
    acc.trim(1e-12);
    return acc;
}

XiFunction XiFunction::rescaled(cplx factor) const
{
    XiFunction out = *this;
    for (auto &c : out.coef_) {
        c *= factor;
    }
    return out;
}

XiFunction XiFunction::with_coef(std::vector<cplx> coef) const
{
    XiFunction out = *this;
    out.coef_ = std::move(coef);
    return out;
}

XiFunction build_xi(const FuchsianData &d, const XiOptions &opts)
{
    for (int ip = 0; ip < d.M(); ++ip) {
        const auto app = frobenius_is_apparent(local_expansion(d, ip, +1));
        if (!app.apparent) {
            throw not_apparent("extra singularity " + std::to_string(ip + 1) +
                               " is not apparent; witness magnitude " +
                               std::to_string(std::abs(app.witness) / app.scale) +
                               " relative to coefficient scale");
        }
    }

    const auto terms = xi_terms(d);
    const int U = int(terms.size());
    const int rows = std::max(opts.oversample * U, U + 3);
    const int held = 2 * U;
    const double guard = opts.guard_frac * std::abs(d.lat.omega(1));

    std::mt19937_64 rng(opts.seed);
    const auto pts = collocation_points(d, rng, rows + held, guard);

    // Row k: (d^3/dx^3 - 4(v-E) d/dx - 2 v') applied to each term at x_k.
    auto op_row = [&](cplx x, std::vector<cplx> &row) {
        TermEvaluator ev(d, x);
        const cplx vx = d.v(x), vpx = d.v_prime(x);
        std::array<cplx, 4> t{};
        for (int j = 0; j < U; ++j) {
            ev.derivs(terms[j], t);
            row[j] = t[3] - 4.0 * (vx - d.E) * t[1] - 2.0 * vpx * t[0];
        }
    };

    Eigen::MatrixXcd A(rows, U);
    std::vector<cplx> row(U);
    for (int k = 0; k < rows; ++k) {
        op_row(pts[k], row);
        for (int j = 0; j < U; ++j) {
            A(k, j) = row[j];
        }
    }

    // Column scaling for conditioning.
    Eigen::VectorXd colscale(U);
    for (int j = 0; j < U; ++j) {
        colscale(j) = std::max(A.col(j).cwiseAbs().maxCoeff(), 1e-300);
        A.col(j) /= colscale(j);
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();
    const double smax = sv(0);
    int dim = 0;
    for (int j = U - 1; j >= 0; --j) {
        if (sv(j) <= opts.svd_rel_tol * std::max(smax, 1e-300)) {
            ++dim;
        } else {
            break;
        }
    }
    if (smax <= 1e-300) {
        dim = U; // operator annihilates the whole basis (free case)
    }
    if (dim == 0) {
        throw empty_nullspace("collocation matrix has trivial nullspace; sigma_min/sigma_max = " +
                              std::to_string(sv(U - 1) / smax));
    }

    std::vector<std::vector<cplx>> ns;
    for (int v = 0; v < dim; ++v) {
        std::vector<cplx> coef(U);
        int imax = 0;
        double amax = 0.0;
        for (int j = 0; j < U; ++j) {
            coef[j] = svd.matrixV()(j, U - 1 - v) / colscale(j);
            if (std::abs(coef[j]) > amax) {
                amax = std::abs(coef[j]);
                imax = j;
            }
        }
        const cplx piv = coef[imax];
        for (auto &c : coef) {
            c /= piv;
        }
        ns.push_back(std::move(coef));
    }

    // Held-out validation of every nullspace vector.
    double worst = 0.0;
    for (const auto &coef : ns) {
        for (int k = rows; k < rows + held; ++k) {
            op_row(pts[k], row);
            cplx resid(0.0);
            double scale = 0.0;
            for (int j = 0; j < U; ++j) {
                resid += coef[j] * row[j];
                scale += std::abs(coef[j] * row[j]);
            }
            worst = std::max(worst, std::abs(resid) / std::max(scale, 1e-300));
        }
    }
    if (worst > opts.heldout_tol) {
        throw empty_nullspace("held-out collocation residual " + std::to_string(worst) +
                              " exceeds tolerance");
    }
    return XiFunction(d, terms, std::move(ns), worst);
}

QValue q_value_detail(const XiFunction &xi, std::uint64_t seed)
{
    const FuchsianData &d = xi.data();
    std::mt19937_64 rng(seed);
    const double guard = 0.05 * std::abs(d.lat.omega(1));
    const auto pts = collocation_points(d, rng, 10, guard);

    QValue q;
    q.samples.reserve(pts.size());
    cplx mean(0.0);
    double term_scale = 0.0;
    std::array<cplx, 4> xs{};
    for (cplx x : pts) {
        xi.evals(x, xs);
        const cplx vx = d.v(x);
        const cplx Qx = xs[0] * xs[0] * (d.E - vx) + 0.5 * xs[0] * xs[2] - 0.25 * xs[1] * xs[1];
        q.samples.push_back(Qx);
        mean += Qx;
        term_scale = std::max(term_scale, std::abs(xs[0] * xs[0]) * (std::abs(d.E) + std::abs(vx)) +
                                              0.5 * std::abs(xs[0] * xs[2]) +
                                              0.25 * std::abs(xs[1] * xs[1]));
    }
    mean /= double(q.samples.size());
    double spread = 0.0;
    for (cplx Qx : q.samples) {
        spread = std::max(spread, std::abs(Qx - mean));
    }
    q.mean = mean;
    q.spread_rel = spread / std::max(std::abs(mean), 1e-6 * std::max(term_scale, 1e-300));
    return q;
}

cplx q_value(const XiFunction &xi)
{
    const QValue q = q_value_detail(xi);
    if (q.spread_rel >= 1e-8) {
        throw non_constant_q("Q varies across sample points; relative spread " +
                             std::to_string(q.spread_rel));
    }
    return q.mean;
}

} // namespace heunhk
