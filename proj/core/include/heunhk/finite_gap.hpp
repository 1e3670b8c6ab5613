#ifndef HEUNHK_FINITE_GAP_HPP
#define HEUNHK_FINITE_GAP_HPP

#include "heunhk/hk.hpp"

namespace heunhk {

struct SpectralOptions {
    std::uint64_t seed = 99991;
    int g_max = 10;
    double fit_tol = 1e-8;
};

struct SpectralData {
    int g = 0;
    Poly Q_poly;                  // monic, degree 2g+1 in E
    std::vector<cplx> band_edges; // the 2g+1 roots of Q_poly
    double fit_residual = 0.0;
};

/// Spectral polynomial of the M = 0 operator, with the gap number detected by
/// rational least-squares fitting of the per-E normalised Q.
SpectralData spectral_poly_m0(const std::array<int, 4> &l, const Lattice &lat,
                              const SpectralOptions &opts = {});

/// Roots of f0(b1): the b1 for which s1 = 0 makes the M=1, r1=2 singularity
/// apparent, independently of E. Each root is validated by the Frobenius
/// recursion at +-delta1 for several E.
std::vector<cplx> treibich_b1_roots(const std::array<int, 4> &l, const Lattice &lat);

/// Spectral polynomial of the M=1, r1=2, s1=0 operator at a root of f0.
SpectralData spectral_poly_m1r2(const std::array<int, 4> &l, cplx b1_root, const Lattice &lat,
                                const SpectralOptions &opts = {});

} // namespace heunhk

#endif
