#ifndef HEUNHK_FUCHSIAN_HPP
#define HEUNHK_FUCHSIAN_HPP

#include <array>
#include <vector>

#include "heunhk/lattice.hpp"
#include "heunhk/polynomial.hpp"

namespace heunhk {

/// Parameter set of the Fuchsian operator, carried in both the algebraic
/// coordinates (l, r, b, s, o, p, E) and the elliptic ones (delta = wp^-1(b),
/// s_tilde, Cg). All derived fields are populated on construction.
struct FuchsianData {
    Lattice lat;
    std::array<int, 4> l{};       // exponent parameters at omega_0..omega_3
    std::vector<int> r;           // extra-singularity orders, size M
    std::vector<cplx> b;          // b_{i'} = wp(delta_{i'})
    std::vector<cplx> delta;      // representatives in the fundamental cell
    std::vector<cplx> s, s_tilde, o;
    cplx E{};                     // spectral parameter
    cplx p{};                     // accessory parameter of the algebraic form
    cplx Cg{};                    // gauge shift

    int M() const { return int(r.size()); }
    int N() const;                // sum of l_i plus sum of r_{i'}
    int r_total() const;

    /// Potential of the elliptic form and its derivative.
    cplx v(cplx x) const;
    cplx v_prime(cplx x) const;

    /// prod (z - b_{i'})^{r_{i'}}  —  the square of the gauge factor, in z.
    cplx psi_g_sq_z(cplx z) const;

    /// First-order coefficient of the gauge form: sum r wp'/(wp - b).
    cplx gauge_first_order(cplx x) const;
    /// Potential of the gauge form (without -E - Cg).
    cplx gauge_potential(cplx x) const;

    /// Representatives of every singular point of the gauge form in one cell:
    /// omega_0..omega_3 and +-delta_{i'}.
    std::vector<cplx> singular_points() const;
    /// Distance from x to the nearest singular point modulo the lattice.
    double singular_distance(cplx x) const;
};

/// Builds FuchsianData from the algebraic-side inputs, deriving o, p, s_tilde,
/// Cg and the delta representatives. Throws singular_collision when some b
/// collides with an e_i or with another b.
FuchsianData elliptic_from_algebraic(const Lattice &lat, const std::array<int, 4> &l,
                                     const std::vector<int> &r, const std::vector<cplx> &b,
                                     const std::vector<cplx> &s, cplx E);

/// Same, but with the o_{i'} given and s_{i'} derived.
FuchsianData elliptic_from_algebraic_o(const Lattice &lat, const std::array<int, 4> &l,
                                       const std::vector<int> &r, const std::vector<cplx> &b,
                                       const std::vector<cplx> &o, cplx E);

/// (s_tilde, Cg) of the gauge form.
std::pair<std::vector<cplx>, cplx> gauge_shift(const FuchsianData &d);

/// Laurent data of f'' + sum p_j (x-a)^{j-1} f' + sum q_j (x-a)^{j-2} f = 0
/// at a regular singular point with integer exponent gap n.
struct LocalExpansion {
    cplx a;
    int n = 0;
    std::vector<cplx> p, q; // index j = 0..jmax
    cplx alpha1() const { return 0.5 * (1.0 - p[0] - double(n)); }
    cplx indicial(cplx t) const { return t * t + (p[0] - 1.0) * t + q[0]; }
};

/// Expansion of the gauge form around +delta_{i'} (sign=+1) or -delta_{i'}
/// (sign=-1). Coefficients are recovered by sampling on a circle of radius
/// at most one third of the distance to the nearest other singularity.
LocalExpansion local_expansion(const FuchsianData &d, int iprime, int sign, int extra = 4);

struct ApparencyResult {
    bool apparent = false;
    cplx witness{};             // left-hand side of the gap-order condition
    double scale = 0.0;         // normalisation used by the tolerance
    std::vector<cplx> c;        // Frobenius coefficients c_0..c_{n-1}
};

/// Evaluates the Frobenius obstruction at exponent gap n; apparent iff the
/// witness vanishes to 1e-9 relative to the coefficient scale.
ApparencyResult frobenius_is_apparent(const LocalExpansion &le);

/// The accessory parameter that makes the M=1, r1=1 singularity apparent.
cplx apparency_p_of_mu(const std::array<int, 4> &l, cplx b1, cplx mu1, const Lattice &lat);

/// Monic cubic in s1 whose roots make the M=1, r1=2 singularity apparent:
/// returns {1, 12 b1^2 - g2, 4(4b1^3-g2 b1-g3) E + f1(b1), f0(b1)}.
std::array<cplx, 4> apparency_cubic_r2(const std::array<int, 4> &l, cplx b1, cplx E,
                                       const Lattice &lat);

/// The polynomials (f0, f1) of the r1=2 apparency cubic, expanded in b1.
std::pair<Poly, Poly> f0_f1_polys(const std::array<int, 4> &l, const Lattice &lat);

} // namespace heunhk

#endif
