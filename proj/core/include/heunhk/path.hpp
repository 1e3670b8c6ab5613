#ifndef HEUNHK_PATH_HPP
#define HEUNHK_PATH_HPP

#include <functional>
#include <vector>

#include "heunhk/lattice.hpp"

namespace heunhk {

/// Piecewise-linear path in the complex plane.
struct Polyline {
    std::vector<cplx> pts;

    cplx start() const { return pts.front(); }
    cplx end() const { return pts.back(); }
    void append(const Polyline &tail); // tail.start() must equal end()
};

/// Straight path from a to b, rerouted around each point of `avoid` by a
/// semicircular detour of radius ~rho (always to the left of the direction of
/// travel, so reruns are reproducible).
Polyline build_path(cplx a, cplx b, const std::vector<cplx> &avoid, double rho);

/// Path through a sequence of waypoints, each leg rerouted as in build_path.
Polyline build_path_through(const std::vector<cplx> &waypoints, const std::vector<cplx> &avoid,
                            double rho);

/// Adaptive Gauss-Kronrod (G7,K15) integral of f along the polyline.
cplx integrate_path(const std::function<cplx(cplx)> &f, const Polyline &path,
                    double rel_tol = 1e-12);

/// Continuation of sqrt(F) along the polyline. Starts from the principal
/// square root at the first node (or from `start_value` when provided) and
/// keeps the branch by adaptive step refinement. Returns the value at every
/// node of the polyline.
std::vector<cplx> sqrt_continue(const std::function<cplx(cplx)> &F, const Polyline &path,
                                std::optional<cplx> start_value = std::nullopt);

} // namespace heunhk

#endif
