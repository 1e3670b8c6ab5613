#ifndef HEUNHK_HK_HPP
#define HEUNHK_HK_HPP

#include <optional>

#include "heunhk/path.hpp"
#include "heunhk/xi.hpp"

namespace heunhk {

/// Hermite-Krichever data of one spectral point. The sign of sqrt_mQ and the
/// phase of sqrt(Xi) at the basepoint fix every branch choice downstream;
/// flipping the sign of sqrt_mQ maps (m1, m3) to (-m1, -m3) mod 2.
struct HKData {
    cplx Q{};
    cplx sqrt_mQ{};       // principal sqrt(-Q) unless flipped explicitly
    cplx m1{}, m3{};      // multiplier exponents, exp(i pi m_j), mod 2
    cplx alpha{};         // -m1 omega3 + m3 omega1
    bool degenerate = false;
    cplx kappa{};         // kappa (generic) or kappa_bar (degenerate)
    int nullspace_dim = 1;
};

HKData flip_sqrt_sign(const HKData &hk);

/// Points a Lambda path must avoid: gauge-form singularities plus the zeros
/// of Xi (both branches), as representatives in the corner cell.
std::vector<cplx> lambda_bad_points(const XiFunction &xi);

/// Expand cell representatives by lattice translates covering [-1..2]^2 cells.
std::vector<cplx> with_translates(const std::vector<cplx> &reps, const Lattice &lat);

/// Deterministic generic basepoint away from singularities and Xi zeros.
cplx default_basepoint(const XiFunction &xi);

/// Values of Lambda and Lambda_g along a polyline from path.start(), where
/// Lambda(start) = principal sqrt(Xi(start)) and the branch is continued.
struct LambdaSamples {
    Polyline path;
    std::vector<cplx> lambda, lambda_g;
    std::vector<cplx> sqrt_xi, sqrt_G; // continued branches at the nodes
    std::vector<cplx> integral;        // cumulative int sqrt(-Q)/Xi
};
LambdaSamples lambda_along(const XiFunction &xi, cplx sqrt_mQ, const Polyline &path);

/// Lambda and Lambda_g at x, continued from the default basepoint.
std::pair<cplx, cplx> lambda_eval(const XiFunction &xi, cplx sqrt_mQ, cplx x);

/// d^2/dx^2 of Lambda at a node of existing samples via a Cauchy circle of
/// radius rho (independent re-differentiation of the integral formula).
cplx lambda_second_derivative(const XiFunction &xi, cplx sqrt_mQ, cplx x, cplx lambda_at_x,
                              cplx sqrt_xi_at_x, double rho);

struct Multipliers {
    cplx rho1, rho3; // Lambda_g(x + 2 omega_j) / Lambda_g(x)
    cplx m1, m3;     // principal logarithms over (i pi)
};

/// Period multipliers of Lambda_g measured by continuation along pole-avoiding
/// offset paths from epsilon to 2 omega_j + epsilon.
Multipliers monodromy_multipliers(const XiFunction &xi, cplx sqrt_mQ);

/// alpha, kappa (or kappa_bar) from the multiplier exponents.
HKData hk_from_multipliers(cplx m1, cplx m3, const Lattice &lat);

/// Full pipeline: Q, principal sqrt(-Q), measured multipliers, HK parameters.
HKData hk_analyze(const XiFunction &xi);

/// Factor of the period identity Lambda_g(x + 2 omega_j) = f_j Lambda_g(x)
/// predicted by the Hermite-Krichever parameters.
cplx hk_period_factor(const HKData &hk, const Lattice &lat, int j);

struct HKFit {
    std::vector<cplx> coef;
    double residual;
    std::vector<cplx> sample_x;
};

/// Least-squares fit of Lambda_g exp(-kappa x) onto the ansatz basis
/// (translate derivatives of Phi_i for the generic branch, the elliptic basis
/// for the degenerate one). Throws fit_residual_too_large above 1e-6.
HKFit hk_decompose(const XiFunction &xi, const HKData &hk);

struct BetheData {
    int l = 0;
    std::vector<cplx> t;     // roots in x, branch fixed by the sign condition
    std::vector<cplx> z;     // z_j = wp(t_j)
    cplx c{};                // exponent of the product form
    cplx C0{};               // normalisation matching lambda_eval
    std::vector<double> sign_residual; // per simple root
};

/// Bethe-form roots of Lambda: zeros of the numerator polynomial in z = wp(x),
/// lifted to x with the branch fixed by dXi/dz = 2 sqrt(-Q)/wp'(t_j).
BetheData bethe_roots(const XiFunction &xi, const HKData &hk);

/// Evaluate the Bethe product form at x (for cross-checks).
cplx bethe_eval(const BetheData &bd, const XiFunction &xi, cplx x);

} // namespace heunhk

#endif
