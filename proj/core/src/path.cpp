#include "heunhk/path.hpp"

#include <algorithm>
#include <cmath>

namespace heunhk {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

// G7,K15 nodes and weights on [-1, 1].
constexpr int kn = 15;
constexpr double kx[kn] = {
    -0.9914553711208126, -0.9491079123427585, -0.8648644233597691, -0.7415311855993944,
    -0.5860872354676911, -0.4058451513773972, -0.2077849550078985, 0.0,
    0.2077849550078985,  0.4058451513773972,  0.5860872354676911,  0.7415311855993944,
    0.8648644233597691,  0.9491079123427585,  0.9914553711208126};
constexpr double kw[kn] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278,
    0.2044329400752989, 0.1903505780647854, 0.1690047266392679, 0.1406532597155259,
    0.1047900103222502, 0.0630920926299785, 0.0229353220105292};
// Gauss-7 shares the odd Kronrod nodes (indices 1,3,5,7,9,11,13).
constexpr double gw[7] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                          0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
                          0.1294849661688697};

struct EdgeQuad {
    const std::function<cplx(cplx)> &f;
    double rel_tol;
    int depth_cap = 30;

    cplx run(cplx a, cplx b, int depth) const
    {
        const cplx mid = 0.5 * (a + b), half = 0.5 * (b - a);
        cplx k15(0.0), g7(0.0);
        for (int i = 0; i < kn; ++i) {
            const cplx v = f(mid + kx[i] * half);
            k15 += kw[i] * v;
            if (i % 2 == 1) {
                g7 += gw[i / 2] * v;
            }
        }
        k15 *= half;
        g7 *= half;
        const double err = std::abs(k15 - g7);
        if (err <= rel_tol * (1.0 + std::abs(k15)) || std::abs(half) < 1e-15) {
            return k15;
        }
        if (depth >= depth_cap) {
            throw path_through_singularity("quadrature failed to converge along a path segment");
        }
        return run(a, mid, depth + 1) + run(mid, b, depth + 1);
    }
};

} // namespace

void Polyline::append(const Polyline &tail)
{
    for (std::size_t k = (tail.pts.front() == pts.back()) ? 1 : 0; k < tail.pts.size(); ++k) {
        pts.push_back(tail.pts[k]);
    }
}

Polyline build_path(cplx a, cplx b, const std::vector<cplx> &avoid, double rho)
{
    Polyline out;
    out.pts.push_back(a);
    const cplx d = b - a;
    const double len = std::abs(d);
    if (len < 1e-300) {
        out.pts.push_back(b);
        return out;
    }
    const cplx dir = d / len;

    struct Detour {
        double t_in, t_out;
        cplx p;
        double R;
    };
    std::vector<Detour> detours;
    for (cplx p : avoid) {
        const double t = ((p - a) / d).real(); // projection parameter
        const cplx foot = a + std::clamp(t, 0.0, 1.0) * d;
        const double dist = std::abs(p - foot);
        const double R = std::min({rho, 0.8 * std::abs(p - a), 0.8 * std::abs(p - b)});
        if (t <= 0.0 || t >= 1.0 || dist >= R) {
            continue;
        }
        const double dt = std::sqrt(std::max(R * R - dist * dist, 0.0)) / len;
        detours.push_back({t - dt, t + dt, p, R});
    }
    std::sort(detours.begin(), detours.end(),
              [](const Detour &x, const Detour &y) { return x.t_in < y.t_in; });

    double t_cur = 0.0;
    for (const auto &dt : detours) {
        const double t_in = std::max(dt.t_in, t_cur);
        if (t_in >= dt.t_out) {
            continue;
        }
        const cplx entry = a + t_in * d;
        const cplx exit = a + dt.t_out * d;
        out.pts.push_back(entry);
        // Arc from entry to exit around dt.p, passing to the left of travel.
        const cplx left = cplx(0.0, 1.0) * dir;
        double ph1 = std::arg(entry - dt.p);
        double ph2 = std::arg(exit - dt.p);
        double sweep_ccw = ph2 - ph1;
        while (sweep_ccw < 0.0) {
            sweep_ccw += 2.0 * pi;
        }
        const double sweep_cw = sweep_ccw - 2.0 * pi;
        // Pick the sweep whose midpoint lies on the left side.
        auto mid_of = [&](double sweep) {
            return dt.p + std::abs(entry - dt.p) * std::exp(cplx(0.0, ph1 + 0.5 * sweep));
        };
        const double sweep =
            (std::abs(mid_of(sweep_ccw) - (dt.p + dt.R * left)) <=
             std::abs(mid_of(sweep_cw) - (dt.p + dt.R * left)))
                ? sweep_ccw
                : sweep_cw;
        const int narc = 8;
        const double rin = std::abs(entry - dt.p), rout = std::abs(exit - dt.p);
        for (int k = 1; k < narc; ++k) {
            const double s = double(k) / narc;
            const double r = rin + s * (rout - rin);
            out.pts.push_back(dt.p + r * std::exp(cplx(0.0, ph1 + s * sweep)));
        }
        out.pts.push_back(exit);
        t_cur = dt.t_out;
    }
    out.pts.push_back(b);
    return out;
}

Polyline build_path_through(const std::vector<cplx> &waypoints, const std::vector<cplx> &avoid,
                            double rho)
{
    Polyline out;
    out.pts.push_back(waypoints.front());
    for (std::size_t k = 0; k + 1 < waypoints.size(); ++k) {
        out.append(build_path(waypoints[k], waypoints[k + 1], avoid, rho));
    }
    return out;
}

cplx integrate_path(const std::function<cplx(cplx)> &f, const Polyline &path, double rel_tol)
{
    EdgeQuad quad{f, rel_tol};
    cplx acc(0.0);
    for (std::size_t k = 0; k + 1 < path.pts.size(); ++k) {
        acc += quad.run(path.pts[k], path.pts[k + 1], 0);
    }
    return acc;
}

std::vector<cplx> sqrt_continue(const std::function<cplx(cplx)> &F, const Polyline &path,
                                std::optional<cplx> start_value)
{
    std::vector<cplx> out;
    out.reserve(path.pts.size());
    cplx w = start_value ? *start_value : std::sqrt(F(path.pts.front()));
    out.push_back(w);

    // Advance from `za` (value w) to `zb`; bisect whenever the branch choice
    // gets ambiguous (large relative rotation between consecutive values).
    std::function<cplx(cplx, cplx, cplx, int)> step = [&](cplx za, cplx zb, cplx wa,
                                                          int depth) -> cplx {
        const cplx sb = std::sqrt(F(zb));
        const cplx cand = (std::abs(sb - wa) <= std::abs(-sb - wa)) ? sb : -sb;
        const double na = std::abs(wa), nb = std::abs(cand);
        if (na > 0.0 && nb > 0.0) {
            const double align = (cand * std::conj(wa)).real() / (na * nb);
            if (align > 0.25) {
                return cand;
            }
        }
        if (depth >= 40) {
            throw branch_tracking_lost("sqrt continuation lost the branch along the path");
        }
        const cplx wm = step(za, 0.5 * (za + zb), wa, depth + 1);
        return step(0.5 * (za + zb), zb, wm, depth + 1);
    };

    for (std::size_t k = 0; k + 1 < path.pts.size(); ++k) {
        w = step(path.pts[k], path.pts[k + 1], w, 0);
        out.push_back(w);
    }
    return out;
}

} // namespace heunhk
