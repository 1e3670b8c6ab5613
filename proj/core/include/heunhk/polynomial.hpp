#ifndef HEUNHK_POLYNOMIAL_HPP
#define HEUNHK_POLYNOMIAL_HPP

#include <vector>

#include "heunhk/lattice.hpp"

namespace heunhk {

/// Dense polynomial, coefficient c[k] multiplying z^k. Trailing (near-)zero
/// coefficients are kept unless trimmed explicitly.
struct Poly {
    std::vector<cplx> c;

    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs) : c(std::move(coeffs)) {}
    static Poly constant(cplx a) { return Poly({a}); }
    /// z - root
    static Poly linear(cplx root) { return Poly({-root, cplx(1.0)}); }

    int degree() const { return int(c.size()) - 1; }
    cplx eval(cplx z) const;
    Poly derivative() const;
    Poly &operator+=(const Poly &o);
    Poly &operator*=(cplx a);
    void trim(double tol = 0.0);
};

Poly operator*(const Poly &a, const Poly &b);
Poly operator+(Poly a, const Poly &b);
Poly operator*(Poly a, cplx s);
Poly poly_pow(const Poly &a, int n);

/// All complex roots via the companion-matrix eigenvalues of the monic form.
/// Throws root_conditioning when the leading coefficient is negligible.
std::vector<cplx> poly_roots(const Poly &p);

} // namespace heunhk

#endif
