#ifndef HEUNHK_PAINLEVE6_HPP
#define HEUNHK_PAINLEVE6_HPP

#include <functional>

#include "heunhk/hk.hpp"

namespace heunhk {

/// Solution family selector for the degenerate (Q = 0) branches.
enum class RiccatiFamily { zero, e1, e2, e3 };

/// l-vector family with printed closed forms.
enum class P6Family { l0000, l1000 };

struct P6Kappas {
    double k0, k1, kt, kinf;
};

/// kappa_0 = l1 + 1/2, kappa_1 = l2 + 1/2, kappa_t = l3 + 1/2, kappa_inf = l0 + 1/2.
P6Kappas kappas_from_l(const std::array<int, 4> &l);

/// Lattice with omega1 = 1/2, omega3 = tau/2.
Lattice p6_lattice(cplx tau);

/// b1(tau) of the kappa = (1/2,1/2,1/2,1/2) two-parameter family.
cplx hitchin_b1(cplx C1, cplx C3, cplx tau);

/// b1(tau) of the degenerate one-parameter families for l = (0,0,0,0).
cplx riccati_b1(cplx D1, cplx D3, cplx tau, RiccatiFamily family);

/// b1(tau) of the kappa_inf = 3/2 two-parameter family (l = (1,0,0,0)).
cplx l01_b1(cplx C1, cplx C3, cplx tau);

/// b1(tau) of the degenerate families for l = (1,0,0,0).
cplx l01_degenerate_b1(cplx D1, cplx D3, cplx tau, RiccatiFamily family);

/// Closed-form Q of the two families (normalised as the printed Xi).
cplx q_closed(P6Family fam, cplx b1, cplx mu1, const Lattice &lat);

struct HKClosed {
    cplx wp_alpha, wp_prime_alpha, kappa;
};

/// Printed forward map (b1, mu1) -> (wp(alpha), wp'(alpha), kappa), taking the
/// principal sqrt(-Q).
HKClosed hk_forward(P6Family fam, cplx b1, cplx mu1, const Lattice &lat);

/// Printed inverse map; throws denominator_zero on the excluded locus.
std::pair<cplx, cplx> hk_inverse(P6Family fam, const HKClosed &v, const Lattice &lat);

/// FuchsianData of the M=1, r1=1 operator determined by (b1, mu1) with the
/// accessory parameter pinned by the apparency condition.
FuchsianData p6_fuchsian(const std::array<int, 4> &l, cplx b1, cplx mu1, const Lattice &lat);

struct P6Point {
    cplx lambda, t;
    double residual;
};

/// Finite-difference residual of the rational-form PVI equation for the
/// trajectory tau |-> b1(tau), at tau0, using five-point stencils of step h
/// (default 1e-4 |tau0|). Normalised by max(1, |d2 lambda/dt2|).
P6Point verify_p6(const std::function<cplx(cplx)> &b1_of_tau, const P6Kappas &kappas, cplx tau0,
                  double h = 0.0);

/// Finite-difference residual of the elliptic-form PVI equation, tracking the
/// delta1 branch by continuation across the stencil.
double p6_elliptic_residual(const std::function<cplx(cplx)> &b1_of_tau,
                            const std::array<int, 4> &l, cplx tau0, double h = 0.0);

struct IsomonodromyReport {
    std::vector<cplx> taus, m1s, m3s;
    double spread1 = 0.0, spread3 = 0.0;
};

/// Reconstructs (b1, mu1) from fixed (C1, C3) at every tau of the grid, runs
/// the monodromy pipeline, and reports the spread of the measured exponents
/// (mod 2). Constancy is the operational content of fixing the monodromy.
IsomonodromyReport isomonodromy_check(cplx C1, cplx C3, const std::vector<cplx> &tau_grid,
                                      P6Family fam);

} // namespace heunhk

#endif
