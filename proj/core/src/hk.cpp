#include "heunhk/hk.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace heunhk {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;
const cplx iu(0.0, 1.0);

double uniform01(std::mt19937_64 &rng)
{
    return double(rng() >> 11) * 0x1.0p-53;
}

double min_pair_distance(const std::vector<cplx> &pts)
{
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const double d = std::abs(pts[a] - pts[b]);
            if (d > 1e-9) {
                dmin = std::min(dmin, d);
            }
        }
    }
    return dmin;
}

double dist_to_set(cplx x, const std::vector<cplx> &pts)
{
    double dmin = std::numeric_limits<double>::infinity();
    for (cplx p : pts) {
        dmin = std::min(dmin, std::abs(x - p));
    }
    return dmin;
}

// Walks Lambda and Lambda_g through the plane, keeping the sqrt branches and
// the accumulated integral consistent across successive targets.
class LambdaTracker {
public:
    LambdaTracker(const XiFunction &xi, cplx sqrt_mQ, cplx x0)
        : xi_(xi), sqrt_mQ_(sqrt_mQ), avoid_(with_translates(lambda_bad_points(xi), xi.lattice()))
    {
        const double period = std::min(std::abs(2.0 * xi.lattice().omega(1)),
                                       std::abs(2.0 * xi.lattice().omega(3)));
        rho_ = std::min(0.045 * period, 0.45 * min_pair_distance(avoid_));
        x_ = x0;
        sqrt_xi_ = std::sqrt(xi_eval(x0));
        sqrt_G_ = std::sqrt(G_eval(x0));
        integral_ = cplx(0.0);
        if (dist_to_set(x0, avoid_) < 0.5 * rho_) {
            throw path_through_singularity("lambda basepoint too close to a singular point");
        }
    }

    cplx xi_eval(cplx x) const { return xi_.eval(x); }
    cplx G_eval(cplx x) const
    {
        return xi_.eval(x) * xi_.data().psi_g_sq_z(xi_.lattice().wp(x));
    }

    std::pair<cplx, cplx> advance(cplx y)
    {
        const Polyline path = build_path(x_, y, avoid_, rho_);
        const auto sx = sqrt_continue([this](cplx t) { return xi_eval(t); }, path, sqrt_xi_);
        const auto sg = sqrt_continue([this](cplx t) { return G_eval(t); }, path, sqrt_G_);
        if (sqrt_mQ_ != cplx(0.0)) {
            integral_ += integrate_path([this](cplx t) { return sqrt_mQ_ / xi_eval(t); }, path);
        }
        x_ = y;
        sqrt_xi_ = sx.back();
        sqrt_G_ = sg.back();
        return value();
    }

    std::pair<cplx, cplx> value() const
    {
        const cplx ex = std::exp(integral_);
        return {sqrt_xi_ * ex, sqrt_G_ * ex};
    }

    cplx position() const { return x_; }
    cplx sqrt_xi() const { return sqrt_xi_; }
    cplx sqrt_G() const { return sqrt_G_; }
    cplx integral() const { return integral_; }
    double rho() const { return rho_; }
    const std::vector<cplx> &avoid() const { return avoid_; }

private:
    const XiFunction &xi_;
    cplx sqrt_mQ_;
    std::vector<cplx> avoid_;
    double rho_;
    cplx x_, sqrt_xi_, sqrt_G_, integral_;
};

} // namespace

HKData flip_sqrt_sign(const HKData &hk)
{
    HKData out = hk;
    out.sqrt_mQ = -hk.sqrt_mQ;
    out.m1 = -hk.m1;
    out.m3 = -hk.m3;
    out.alpha = -hk.alpha;
    out.kappa = -hk.kappa;
    return out;
}

std::vector<cplx> lambda_bad_points(const XiFunction &xi)
{
    const FuchsianData &d = xi.data();
    std::vector<cplx> pts = d.singular_points();
    const Poly num = xi.numerator();
    if (num.degree() >= 1) {
        for (cplx zj : poly_roots(num)) {
            bool structural = false;
            for (cplx bb : d.b) {
                if (std::abs(zj - bb) < 1e-7 * std::max(1.0, std::abs(bb))) {
                    structural = true; // already covered by +-delta
                }
            }
            if (structural) {
                continue;
            }
            cplx t;
            try {
                t = d.lat.wp_inverse(zj);
            } catch (const no_convergence &) {
                continue;
            }
            pts.push_back(d.lat.reduce_corner(t));
            pts.push_back(d.lat.reduce_corner(-t));
        }
    }
    return pts;
}

std::vector<cplx> with_translates(const std::vector<cplx> &reps, const Lattice &lat)
{
    std::vector<cplx> out;
    out.reserve(reps.size() * 16);
    for (cplx p : reps) {
        for (int m = -1; m <= 2; ++m) {
            for (int n = -1; n <= 2; ++n) {
                out.push_back(p + 2.0 * double(m) * lat.omega(1) + 2.0 * double(n) * lat.omega(3));
            }
        }
    }
    return out;
}

cplx default_basepoint(const XiFunction &xi)
{
    const Lattice &lat = xi.lattice();
    const auto bad = with_translates(lambda_bad_points(xi), lat);
    std::mt19937_64 rng(424243);
    cplx best(0.0);
    double best_score = -1.0;
    for (int k = 0; k < 64; ++k) {
        const double a = 0.08 + 0.84 * uniform01(rng);
        const double b = 0.08 + 0.84 * uniform01(rng);
        const cplx x = 2.0 * a * lat.omega(1) + 2.0 * b * lat.omega(3);
        const double score = dist_to_set(x, bad);
        if (score > best_score) {
            best_score = score;
            best = x;
        }
    }
    return best;
}

LambdaSamples lambda_along(const XiFunction &xi, cplx sqrt_mQ, const Polyline &path)
{
    LambdaSamples out;
    out.path = path;
    LambdaTracker tr(xi, sqrt_mQ, path.start());
    auto push = [&] {
        const auto [lam, lam_g] = tr.value();
        out.lambda.push_back(lam);
        out.lambda_g.push_back(lam_g);
        out.sqrt_xi.push_back(tr.sqrt_xi());
        out.sqrt_G.push_back(tr.sqrt_G());
        out.integral.push_back(tr.integral());
    };
    push();
    for (std::size_t k = 1; k < path.pts.size(); ++k) {
        tr.advance(path.pts[k]);
        push();
    }
    return out;
}

std::pair<cplx, cplx> lambda_eval(const XiFunction &xi, cplx sqrt_mQ, cplx x)
{
    LambdaTracker tr(xi, sqrt_mQ, default_basepoint(xi));
    return tr.advance(x);
}

cplx lambda_second_derivative(const XiFunction &xi, cplx sqrt_mQ, cplx x, cplx lambda_at_x,
                              cplx sqrt_xi_at_x, double rho)
{
    const int n = 16;
    cplx acc(0.0);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * pi * k / n;
        const cplx dxk = rho * std::exp(iu * th);
        Polyline seg;
        seg.pts = {x, x + dxk};
        const auto sx = sqrt_continue([&](cplx t) { return xi.eval(t); }, seg, sqrt_xi_at_x);
        cplx dI(0.0);
        if (sqrt_mQ != cplx(0.0)) {
            dI = integrate_path([&](cplx t) { return sqrt_mQ / xi.eval(t); }, seg);
        }
        const cplx lam = lambda_at_x * (sx.back() / sqrt_xi_at_x) * std::exp(dI);
        acc += lam * std::exp(-2.0 * iu * th);
    }
    return 2.0 * acc / (double(n) * rho * rho);
}

Multipliers monodromy_multipliers(const XiFunction &xi, cplx sqrt_mQ)
{
    const Lattice &lat = xi.lattice();
    const auto bad = with_translates(lambda_bad_points(xi), lat);

    // Offset start in the omega2 direction, nudged until clear of singular points.
    const double period = std::min(std::abs(2.0 * lat.omega(1)), std::abs(2.0 * lat.omega(3)));
    const double rho = std::min(0.045 * period, 0.45 * min_pair_distance(bad));
    cplx eps = 0.1 * lat.omega(2);
    for (int k = 0; k < 24 && dist_to_set(eps, bad) < 1.2 * rho; ++k) {
        eps += 0.021 * lat.omega(2) + 0.013 * lat.omega(1);
    }
    if (dist_to_set(eps, bad) < rho) {
        throw path_through_singularity("no admissible offset for the period path");
    }

    Multipliers out;
    for (int j : {1, 3}) {
        const Polyline path = build_path(eps, eps + 2.0 * lat.omega(j), bad, rho);
        const auto sg = sqrt_continue(
            [&](cplx t) { return xi.eval(t) * xi.data().psi_g_sq_z(lat.wp(t)); }, path);
        cplx integral(0.0);
        if (sqrt_mQ != cplx(0.0)) {
            integral = integrate_path([&](cplx t) { return sqrt_mQ / xi.eval(t); }, path);
        }
        // G is elliptic, so the end/start ratio of its continued sqrt is +-1.
        const cplx ratio = sg.back() / sg.front();
        const double sign = (ratio.real() >= 0.0) ? 1.0 : -1.0;
        const cplx rho_j = sign * std::exp(integral);
        const cplx m_j = -iu * std::log(rho_j) / pi;
        if (j == 1) {
            out.rho1 = rho_j;
            out.m1 = m_j;
        } else {
            out.rho3 = rho_j;
            out.m3 = m_j;
        }
    }
    return out;
}

HKData hk_from_multipliers(cplx m1, cplx m3, const Lattice &lat)
{
    HKData hk;
    hk.m1 = m1;
    hk.m3 = m3;
    hk.alpha = -m1 * lat.omega(3) + m3 * lat.omega(1);
    hk.degenerate = lat.on_lattice(hk.alpha, 1e-6 * std::abs(lat.omega(1)));
    if (hk.degenerate) {
        hk.kappa = -m1 * lat.eta(3) + m3 * lat.eta(1);
    } else {
        hk.kappa = -lat.zeta(hk.alpha) - m1 * lat.eta(3) + m3 * lat.eta(1);
    }
    return hk;
}

HKData hk_analyze(const XiFunction &xi)
{
    const cplx Q = q_value(xi);
    const cplx sqrt_mQ = std::sqrt(-Q);
    const Multipliers mult = monodromy_multipliers(xi, sqrt_mQ);
    HKData hk = hk_from_multipliers(mult.m1, mult.m3, xi.lattice());
    hk.Q = Q;
    hk.sqrt_mQ = sqrt_mQ;
    hk.nullspace_dim = xi.nullspace_dim();
    return hk;
}

cplx hk_period_factor(const HKData &hk, const Lattice &lat, int j)
{
    if (hk.degenerate) {
        return std::exp(2.0 * hk.kappa * lat.omega(j));
    }
    return std::exp(-2.0 * lat.eta(j) * hk.alpha + 2.0 * lat.omega(j) * lat.zeta(hk.alpha) +
                    2.0 * hk.kappa * lat.omega(j));
}

HKFit hk_decompose(const XiFunction &xi, const HKData &hk)
{
    const FuchsianData &d = xi.data();
    const Lattice &lat = d.lat;

    std::array<int, 4> lt = d.l;
    lt[0] += d.r_total();

    // Basis evaluators at x.
    struct Basis {
        int kind; // 0: Phi_i^{(j)}, 1: const, 2: wp^{(j)}(x+w_i), 3: wp'/(wp-e_i)
        int i, j;
    };
    std::vector<Basis> basis;
    if (!hk.degenerate) {
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < lt[i]; ++j) {
                basis.push_back({0, i, j});
            }
        }
    } else {
        basis.push_back({1, 0, 0});
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j + 1 < lt[i]; ++j) {
                basis.push_back({2, i, j});
            }
        }
        for (int i = 1; i <= 3; ++i) {
            basis.push_back({3, i, 0});
        }
    }
    const int nb = int(basis.size());

    // Sample nodes on a circle inside the cell, radius shrunk until clear.
    const auto bad = with_translates(lambda_bad_points(xi), lat);
    const cplx centre = lat.omega(1) + lat.omega(3);
    const int K = std::max(32, 4 * nb);
    double radius = 0.37 * std::min({std::abs(lat.omega(1)), std::abs(lat.omega(2)),
                                     std::abs(lat.omega(3))});
    std::vector<cplx> nodes;
    for (int attempt = 0; attempt < 24; ++attempt) {
        nodes.clear();
        bool ok = true;
        for (int k = 0; k < K; ++k) {
            const cplx x = centre + radius * std::exp(iu * (2.0 * pi * k / K + 0.37));
            if (dist_to_set(x, bad) < 0.02 * std::abs(lat.omega(1))) {
                ok = false;
                break;
            }
            nodes.push_back(x);
        }
        if (ok) {
            break;
        }
        radius *= 0.91;
        nodes.clear();
    }
    if (nodes.empty()) {
        throw path_through_singularity("no admissible sample circle for the ansatz fit");
    }

    LambdaTracker tr(xi, hk.sqrt_mQ, default_basepoint(xi));
    Eigen::MatrixXcd A(K, nb);
    Eigen::VectorXcd rhs(K);
    std::vector<cplx> phi_buf;
    for (int k = 0; k < K; ++k) {
        const cplx x = nodes[k];
        const auto [lam, lam_g] = tr.advance(x);
        (void)lam;
        rhs(k) = lam_g * std::exp(-hk.kappa * x);
        for (int bidx = 0; bidx < nb; ++bidx) {
            const Basis &bs = basis[bidx];
            cplx val(0.0);
            switch (bs.kind) {
            case 0: {
                phi_buf.assign(bs.j + 1, cplx(0.0));
                lat.phi_derivs(bs.i, hk.alpha, x, phi_buf);
                val = phi_buf[bs.j];
                break;
            }
            case 1:
                val = 1.0;
                break;
            case 2: {
                phi_buf.assign(bs.j + 1, cplx(0.0));
                lat.wp_derivs(x + lat.omega(bs.i), phi_buf);
                val = phi_buf[bs.j];
                break;
            }
            case 3:
                val = lat.wp_prime(x) / (lat.wp(x) - lat.e(bs.i));
                break;
            }
            A(k, bidx) = val;
        }
    }

    Eigen::VectorXcd sol = A.colPivHouseholderQr().solve(rhs);
    const double resid = (A * sol - rhs).norm() / std::max(rhs.norm(), 1e-300);
    if (resid > 1e-6) {
        throw fit_residual_too_large("ansatz fit residual " + std::to_string(resid) +
                                     " (wrong branch or sign?)");
    }
    HKFit fit;
    fit.coef.assign(sol.data(), sol.data() + nb);
    fit.residual = resid;
    fit.sample_x = nodes;
    return fit;
}

BetheData bethe_roots(const XiFunction &xi, const HKData &hk)
{
    const FuchsianData &d = xi.data();
    const Lattice &lat = d.lat;
    if (xi.nullspace_dim() != 1) {
        throw root_conditioning("bethe_roots requires a one-dimensional nullspace");
    }
    if (std::abs(hk.Q) == 0.0 || hk.sqrt_mQ == cplx(0.0)) {
        throw root_conditioning("bethe_roots requires Q != 0");
    }

    const Poly num = xi.numerator();
    std::vector<cplx> zs = poly_roots(num);
    const int l = d.N();
    if (int(zs.size()) != l) {
        throw root_conditioning("numerator degree " + std::to_string(zs.size()) +
                                " does not match l = " + std::to_string(l));
    }

    double zscale = 1.0;
    for (cplx z : zs) {
        zscale = std::max(zscale, std::abs(z));
    }
    const double cluster_tol = 1e-6 * zscale;

    // Separate structural clusters at z = b_{i'} from simple roots.
    std::vector<cplx> simple;
    std::vector<int> cluster_count(d.M(), 0);
    for (cplx z : zs) {
        int hit = -1;
        for (int ip = 0; ip < d.M(); ++ip) {
            if (std::abs(z - d.b[ip]) < cluster_tol) {
                hit = ip;
            }
        }
        if (hit >= 0) {
            ++cluster_count[hit];
        } else {
            simple.push_back(z);
        }
    }
    for (int ip = 0; ip < d.M(); ++ip) {
        if (cluster_count[ip] != 0 && cluster_count[ip] != d.r[ip] + 1) {
            throw root_conditioning("unexpected multiplicity at an extra singularity");
        }
    }
    for (std::size_t a = 0; a < simple.size(); ++a) {
        for (std::size_t b2 = a + 1; b2 < simple.size(); ++b2) {
            if (std::abs(simple[a] - simple[b2]) < cluster_tol) {
                throw root_conditioning("multiple Bethe roots beyond the structural ones");
            }
        }
    }

    BetheData bd;
    bd.l = l;
    cplx t_sum(0.0);
    for (cplx zj : simple) {
        const cplx dxidz = xi.dz(zj);
        const cplx hint = 2.0 * hk.sqrt_mQ / dxidz;
        const cplx tj = lat.wp_inverse(zj, hint);
        const double res = std::abs(dxidz - 2.0 * hk.sqrt_mQ / lat.wp_prime(tj)) /
                           std::max(1.0, std::abs(dxidz));
        bd.t.push_back(tj);
        bd.z.push_back(zj);
        bd.sign_residual.push_back(res);
        t_sum += tj;
    }

    cplx lw_sum(0.0);
    for (int i = 1; i <= 3; ++i) {
        lw_sum += double(d.l[i]) * lat.omega(i);
    }

    // Structural clusters sit at one of +-delta; pick the signs that satisfy
    // alpha = sum t_j - sum l_i omega_i mod the lattice.
    std::vector<int> clusters;
    for (int ip = 0; ip < d.M(); ++ip) {
        if (cluster_count[ip] > 0) {
            clusters.push_back(ip);
        }
    }
    std::vector<int> best_signs(clusters.size(), +1);
    if (!clusters.empty()) {
        double best = std::numeric_limits<double>::infinity();
        const int combos = 1 << clusters.size();
        for (int mask = 0; mask < combos; ++mask) {
            cplx tot = t_sum;
            for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
                const double sg = (mask >> ci) & 1 ? -1.0 : 1.0;
                tot += sg * double(d.r[clusters[ci]] + 1) * d.delta[clusters[ci]];
            }
            const double dist = lat.lattice_distance(tot - lw_sum - hk.alpha);
            if (dist < best) {
                best = dist;
                for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
                    best_signs[ci] = ((mask >> ci) & 1) ? -1 : +1;
                }
            }
        }
    }
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        const int ip = clusters[ci];
        const cplx tj = double(best_signs[ci]) * d.delta[ip];
        for (int k = 0; k < d.r[ip] + 1; ++k) {
            bd.t.push_back(tj);
            bd.z.push_back(d.b[ip]);
            t_sum += tj;
        }
    }

    bd.c = cplx(0.0);
    for (cplx tj : bd.t) {
        bd.c += lat.zeta(tj);
    }
    if (d.l[0] == 0) {
        bd.c += hk.sqrt_mQ / xi.at_zero();
    }

    // Normalisation against the continued Lambda_g at the basepoint.
    const cplx x0 = default_basepoint(xi);
    const auto [lam0, lam0_g] = lambda_eval(xi, hk.sqrt_mQ, x0);
    (void)lam0;
    BetheData probe = bd;
    probe.C0 = 1.0;
    bd.C0 = lam0_g / bethe_eval(probe, xi, x0);
    return bd;
}

cplx bethe_eval(const BetheData &bd, const XiFunction &xi, cplx x)
{
    const FuchsianData &d = xi.data();
    const Lattice &lat = d.lat;
    const int lt0 = d.l[0] + d.r_total();
    cplx val = bd.C0 * std::exp(bd.c * x);
    for (cplx tj : bd.t) {
        val *= lat.sigma(x - tj);
    }
    val /= std::pow(lat.sigma(x), lt0);
    for (int i = 1; i <= 3; ++i) {
        if (d.l[i] != 0) {
            val /= std::pow(lat.co_sigma(i, x), d.l[i]);
        }
    }
    return val;
}

} // namespace heunhk
