#ifndef HEUNHK_XI_HPP
#define HEUNHK_XI_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "heunhk/fuchsian.hpp"
#include "heunhk/polynomial.hpp"

namespace heunhk {

struct XiOptions {
    std::uint64_t seed = 1234567;
    int oversample = 4;          // collocation rows per unknown
    double svd_rel_tol = 1e-10;  // nullspace threshold on sigma/sigma_max
    double guard_frac = 0.05;    // min distance of points to singularities, in |omega1|
    double heldout_tol = 1e-8;
};

/// One basis term of the even doubly-periodic expansion.
struct XiTerm {
    enum Kind { constant, wp_power, pole_power } kind;
    int i; // half-period index (wp_power) or extra-singularity index (pole_power)
    int m; // wp(x+omega_i)^m  or  (wp(x) - b_{i'})^{-m}
};

/// Even doubly-periodic solution of the symmetric-product equation
/// Xi''' - 4(v - E) Xi' - 2 v' Xi = 0, held as coefficients over the term basis.
class XiFunction {
public:
    XiFunction(FuchsianData d, std::vector<XiTerm> terms, std::vector<std::vector<cplx>> nullspace,
               double heldout_residual);

    const FuchsianData &data() const { return d_; }
    const Lattice &lattice() const { return d_.lat; }
    const std::vector<XiTerm> &terms() const { return terms_; }
    const std::vector<cplx> &coef() const { return coef_; }
    int nullspace_dim() const { return int(nullspace_.size()); }
    const std::vector<std::vector<cplx>> &nullspace() const { return nullspace_; }
    double heldout_residual() const { return heldout_residual_; }

    /// out[k] = (d/dx)^k Xi(x), k = 0..3.
    void evals(cplx x, std::array<cplx, 4> &out) const;
    cplx eval(cplx x, int deriv = 0) const;

    /// Xi as a rational function of z = wp(x), and its z-derivative.
    cplx eval_z(cplx z) const;
    cplx dz(cplx z) const;

    /// Xi(0); finite only when l0 = 0.
    cplx at_zero() const;

    /// Numerator polynomial of Xi(x) Psi_g(x)^2 prod_i (wp - e_i)^{l_i} in z.
    /// Its roots are the z_j = wp(t_j) with multiplicity.
    Poly numerator() const;

    /// Same function with every coefficient multiplied by `factor`.
    XiFunction rescaled(cplx factor) const;
    /// Same function with coefficients replaced by another nullspace vector.
    XiFunction with_coef(std::vector<cplx> coef) const;

private:
    FuchsianData d_;
    std::vector<XiTerm> terms_;
    std::vector<cplx> coef_;
    std::vector<std::vector<cplx>> nullspace_;
    double heldout_residual_ = 0.0;
};

/// Basis terms of the expansion for the given data.
std::vector<XiTerm> xi_terms(const FuchsianData &d);

/// Collocation + SVD construction of Xi. Requires every extra singularity to
/// be apparent (not_apparent otherwise); throws empty_nullspace when the
/// collocation matrix has no nullspace at the configured threshold or the
/// held-out residual check fails.
XiFunction build_xi(const FuchsianData &d, const XiOptions &opts = {});

struct QValue {
    cplx mean;
    double spread_rel;
    std::vector<cplx> samples;
};

/// Q = Xi^2 (E - v) + Xi Xi''/2 - (Xi')^2/4 sampled at seeded points.
QValue q_value_detail(const XiFunction &xi, std::uint64_t seed = 77001);

/// Mean Q; throws non_constant_q when the relative spread exceeds 1e-8.
cplx q_value(const XiFunction &xi);

} // namespace heunhk

#endif
