#ifndef HEUNHK_LATTICE_HPP
#define HEUNHK_LATTICE_HPP

#include <array>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "heunhk/errors.hpp"

namespace heunhk {

using cplx = std::complex<double>;

/// Weierstrass function family on the period lattice spanned by (2*omega1, 2*omega3).
///
/// Construction fixes the convention of the whole library: omega0 = 0,
/// omega2 = -omega1 - omega3, e_i = wp(omega_i), eta_i = zeta(omega_i).
/// The roots e_i are *not* sorted; the labels follow the half-periods, which is
/// what every downstream coefficient formula assumes.
///
/// Evaluation runs on Jacobi theta series in the nome q = exp(i*pi*tau),
/// tau = omega3/omega1, after reducing the argument into the cell centred at
/// the origin. All functions accept any finite complex argument; the ones with
/// poles throw pole_proximity inside the guard radius.
class Lattice {
public:
    Lattice(cplx omega1, cplx omega3);

    cplx omega(int i) const { return omegas_[i]; }            // i = 0..3, omega(0) = 0
    cplx e(int i) const { return es_[i - 1]; }                 // i = 1..3
    cplx eta(int i) const { return etas_[i - 1]; }             // i = 1..3
    cplx g2() const { return g2_; }
    cplx g3() const { return g3_; }
    cplx tau() const { return tau_; }
    cplx nome() const { return q_; }
    double legendre_residual() const;

    /// Distance below which pole-bearing evaluators refuse to work.
    double pole_guard() const { return pole_guard_; }

    cplx wp(cplx z) const;
    cplx wp_prime(cplx z) const;
    cplx wp_second(cplx z) const;
    /// out[k] = (d/dz)^k wp(z) for k = 0..out.size()-1.
    void wp_derivs(cplx z, std::vector<cplx> &out) const;

    cplx zeta(cplx z) const;
    cplx sigma(cplx z) const;

    cplx co_sigma(int i, cplx z) const;   // sigma_i, i = 1..3
    cplx co_wp(int i, cplx z) const;      // wp_i = sigma_i / sigma, wp_i^2 = wp - e_i

    /// Baker-Akhiezer kernel Phi_i(z, alpha) = sigma(z+omega_i-alpha)/sigma(z+omega_i) * exp(zeta(alpha) z).
    cplx phi(int i, cplx alpha, cplx z) const;
    /// out[k] = (d/dz)^k Phi_i(z, alpha).
    void phi_derivs(int i, cplx alpha, cplx z, std::vector<cplx> &out) const;

    /// Inverse of wp. Returns the preimage in the fundamental cell
    /// { 2a*omega1 + 2b*omega3 : a, b in [0,1) }. Without a hint the branch
    /// with Im(result/omega1) >= 0 nearest the cell centre wins, ties broken
    /// lexicographically by (Re, Im); with a hint the branch whose wp' is
    /// closest to the hint wins.
    cplx wp_inverse(cplx w, std::optional<cplx> sign_hint = std::nullopt) const;

    /// Lattice coordinates (a, b) with z = 2a*omega1 + 2b*omega3.
    std::pair<double, double> lattice_coords(cplx z) const;
    /// Representative of z in the cell centred at the origin (coords in [-1/2, 1/2)).
    cplx reduce(cplx z) const;
    /// Representative of z in the cell with corner at the origin (coords in [0, 1)).
    cplx reduce_corner(cplx z) const;
    /// Distance from z to the nearest period-lattice point.
    double lattice_distance(cplx z) const;
    /// Distance from z to the nearest point of p + lattice.
    double distance_mod_lattice(cplx z, cplx p) const;
    /// True when z is a lattice point up to tol (absolute).
    bool on_lattice(cplx z, double tol) const;

private:
    struct Theta12 {
        cplx t1, t1p, t2, t2p; // theta_1, d theta_1/du, theta_2, d theta_2/du
    };
    Theta12 theta12(cplx u) const;

    struct Reduced {
        cplx z;      // representative in the centred cell
        long m, n;   // z_original = z + 2m*omega1 + 2n*omega3
    };
    Reduced reduce_full(cplx z) const;

    cplx wp_reduced(cplx zr) const;
    cplx wp_prime_reduced(cplx zr) const;
    void require_off_lattice(cplx zr, const char *what) const;

    cplx omega1_, omega3_;
    std::array<cplx, 4> omegas_; // omega0..omega3
    std::array<cplx, 3> es_;
    std::array<cplx, 3> etas_;
    cplx g2_, g3_, tau_, q_;
    cplx theta20_, theta30_, theta40_, theta1p0_; // null values
    cplx wp_fac_;        // (pi*theta3(0)*theta4(0)/(2*omega1))^2
    cplx sigma_fac_;     // 2*omega1/pi / theta1'(0)
    double pole_guard_;
};

} // namespace heunhk

#endif
