#include "heunhk/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace heunhk {

cplx Poly::eval(cplx z) const
{
    cplx acc(0.0);
    for (std::size_t k = c.size(); k-- > 0;) {
        acc = acc * z + c[k];
    }
    return acc;
}

Poly Poly::derivative() const
{
    if (c.size() <= 1) {
        return Poly({cplx(0.0)});
    }
    std::vector<cplx> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) {
        d[k - 1] = double(k) * c[k];
    }
    return Poly(std::move(d));
}

Poly &Poly::operator+=(const Poly &o)
{
    if (o.c.size() > c.size()) {
        c.resize(o.c.size(), cplx(0.0));
    }
    for (std::size_t k = 0; k < o.c.size(); ++k) {
        c[k] += o.c[k];
    }
    return *this;
}

Poly &Poly::operator*=(cplx a)
{
    for (auto &x : c) {
        x *= a;
    }
    return *this;
}

void Poly::trim(double tol)
{
    double scale = 0.0;
    for (const auto &x : c) {
        scale = std::max(scale, std::abs(x));
    }
    while (c.size() > 1 && std::abs(c.back()) <= tol * scale) {
        c.pop_back();
    }
}

Poly operator*(const Poly &a, const Poly &b)
{
    if (a.c.empty() || b.c.empty()) {
        return Poly({cplx(0.0)});
    }
    std::vector<cplx> out(a.c.size() + b.c.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        for (std::size_t j = 0; j < b.c.size(); ++j) {
            out[i + j] += a.c[i] * b.c[j];
        }
    }
    return Poly(std::move(out));
}

Poly operator+(Poly a, const Poly &b)
{
    a += b;
    return a;
}

Poly operator*(Poly a, cplx s)
{
    a *= s;
    return a;
}

Poly poly_pow(const Poly &a, int n)
{
    Poly out = Poly::constant(cplx(1.0));
    for (int k = 0; k < n; ++k) {
        out = out * a;
    }
    return out;
}

std::vector<cplx> poly_roots(const Poly &p)
{
    Poly q = p;
    q.trim(1e-13);
    const int n = q.degree();
    if (n <= 0) {
        return {};
    }
    double scale = 0.0;
    for (const auto &x : q.c) {
        scale = std::max(scale, std::abs(x));
    }
    if (std::abs(q.c.back()) < 1e-13 * scale) {
        throw root_conditioning("poly_roots: negligible leading coefficient");
    }
    if (n == 1) {
        return {-q.c[0] / q.c[1]};
    }
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        comp(i, i - 1) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        comp(i, n - 1) = -q.c[i] / q.c[n];
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) {
        throw root_conditioning("poly_roots: eigen solver failed");
    }
    std::vector<cplx> roots(n);
    for (int i = 0; i < n; ++i) {
        roots[i] = es.eigenvalues()(i);
    }
    // Deterministic order.
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) {
            return a.real() < b.real();
        }
        return a.imag() < b.imag();
    });
    // One Newton polish per root sharpens the companion eigenvalues.
    const Poly dq = q.derivative();
    for (auto &r : roots) {
        for (int it = 0; it < 2; ++it) {
            const cplx f = q.eval(r), fp = dq.eval(r);
            if (std::abs(fp) < 1e-300) {
                break;
            }
            const cplx step = f / fp;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                break;
            }
            r -= step;
        }
    }
    return roots;
}

} // namespace heunhk
