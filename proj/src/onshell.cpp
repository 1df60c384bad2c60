#include "sb/onshell.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

namespace sb {

namespace {

StructureFn kind_for(int parity) { return parity == 0 ? StructureFn::f0 : StructureFn::f1; }

}  // namespace

std::vector<Scalar> bethe_residuals(const Family& fam, const BetheData& d) {
    const Scalar& c = fam.c();
    const Grading& gr = fam.grading();
    StructureFn f1 = kind_for(gr.parity(1));
    StructureFn f2 = kind_for(gr.parity(2));
    StructureFn f3 = kind_for(gr.parity(3));
    std::vector<Scalar> out;
    for (std::size_t j = 0; j < d.a(); ++j) {
        const Scalar& uj = d.u[j];
        ParamSet urest = d.u.without(j);
        Scalar lhs = fam.weight(2, uj) / fam.weight(1, uj);
        Scalar rhs = product_over(f1, urest, uj, c) /
                     (product_over(f2, uj, urest, c) * product_over(f2, d.v, uj, c));
        out.push_back(lhs - rhs);
    }
    for (std::size_t j = 0; j < d.b(); ++j) {
        const Scalar& vj = d.v[j];
        ParamSet vrest = d.v.without(j);
        Scalar lhs = fam.weight(3, vj) / fam.weight(2, vj);
        Scalar rhs = product_over(f2, vj, d.u, c) * product_over(f2, vrest, vj, c) /
                     product_over(f3, vj, vrest, c);
        out.push_back(lhs - rhs);
    }
    return out;
}

Scalar tau_eigenvalue(const Family& fam, const Scalar& z, const BetheData& d) {
    const Scalar& c = fam.c();
    const Grading& gr = fam.grading();
    StructureFn f1 = kind_for(gr.parity(1));
    StructureFn f2 = kind_for(gr.parity(2));
    StructureFn f3 = kind_for(gr.parity(3));
    Scalar t1 = fam.weight(1, z) * product_over(f1, d.u, z, c);
    Scalar t2 = fam.weight(2, z) * product_over(f2, z, d.u, c) *
                product_over(f2, d.v, z, c);
    Scalar t3 = fam.weight(3, z) * product_over(f3, z, d.v, c);
    return apply_sign(t1, parity_sign(gr.parity(1))) +
           apply_sign(t2, parity_sign(gr.parity(2))) +
           apply_sign(t3, parity_sign(gr.parity(3)));
}

namespace {

using Cx = std::complex<double>;

double norm2(const std::vector<Cx>& v) {
    double s = 0;
    for (const Cx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

BetheData pack(const std::vector<Cx>& x, std::size_t a) {
    std::vector<Scalar> u, v;
    for (std::size_t i = 0; i < x.size(); ++i)
        (i < a ? u : v).push_back(Scalar(x[i]));
    return {ParamSet(u), ParamSet(v)};
}

std::vector<Cx> residual_at(const ChainFamily& fam, const std::vector<Cx>& x,
                            std::size_t a) {
    std::vector<Scalar> r = bethe_residuals(fam, pack(x, a));
    std::vector<Cx> out;
    for (const Scalar& s : r) out.push_back(s.cplx());
    return out;
}

/// Gaussian elimination with partial pivoting; returns false when the
/// Jacobian is numerically singular.
bool solve_linear(std::vector<std::vector<Cx>> m, std::vector<Cx>& rhs) {
    std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-300) return false;
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            Cx fac = m[r][col] / m[col][col];
            for (std::size_t k = col; k < n; ++k) m[r][k] -= fac * m[col][k];
            rhs[r] -= fac * rhs[col];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        for (std::size_t k = col + 1; k < n; ++k) rhs[col] -= m[col][k] * rhs[k];
        rhs[col] /= m[col][col];
    }
    return true;
}

bool finite(const std::vector<Cx>& v) {
    for (const Cx& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

}  // namespace

std::vector<BetheSolution> solve_bethe(const ChainFamily& fam, std::size_t a,
                                       std::size_t b, int attempts, double tol,
                                       unsigned seed) {
    if (fam.backend() != Backend::Float)
        throw ConfigError("solve_bethe needs a float-backend model");
    std::size_t n = a + b;
    std::vector<BetheSolution> found;
    if (n == 0) {
        if (attempts > 0) found.push_back({BetheData{}, 0.0, true, 0});
        return found;
    }

    double radius = 5.0;
    for (const Scalar& z : fam.model().z.elements())
        radius = std::max(radius, z.abs() + 5.0);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    const double step = 1e-6;
    const int max_iter = 200;
    const double sep = 1e-8;

    for (int att = 0; att < attempts; ++att) {
        std::vector<Cx> x(n);
        for (Cx& xi : x) xi = radius * Cx(unit(rng), unit(rng));
        bool converged = false;
        int iters = 0;
        double rnorm = 0;
        try {
            for (; iters < max_iter; ++iters) {
                std::vector<Cx> r = residual_at(fam, x, a);
                if (!finite(r)) break;
                rnorm = norm2(r);
                if (rnorm <= tol) {
                    converged = true;
                    break;
                }
                std::vector<std::vector<Cx>> jac(n, std::vector<Cx>(n));
                for (std::size_t k = 0; k < n; ++k) {
                    std::vector<Cx> xp = x, xm = x;
                    xp[k] += step;
                    xm[k] -= step;
                    std::vector<Cx> rp = residual_at(fam, xp, a);
                    std::vector<Cx> rm = residual_at(fam, xm, a);
                    for (std::size_t j = 0; j < n; ++j)
                        jac[j][k] = (rp[j] - rm[j]) / (2 * step);
                }
                std::vector<Cx> delta = r;
                if (!solve_linear(jac, delta)) break;
                for (std::size_t k = 0; k < n; ++k) x[k] -= delta[k];
                if (!finite(x)) break;
            }
        } catch (const std::domain_error&) {
            continue;  // stepped onto a pole; abandon this attempt
        }
        if (!converged) continue;

        // reject collapsed roots (coincident parameters inside one set)
        bool collapsed = false;
        for (std::size_t i = 0; i < n && !collapsed; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if ((i < a) == (j < a) && std::abs(x[i] - x[j]) < sep)
                    collapsed = true;
        if (collapsed) continue;

        // dedup up to reordering inside each set
        auto key = [&](const std::vector<Cx>& y) {
            std::vector<Cx> k(y);
            auto less = [](const Cx& p, const Cx& q) {
                return p.real() != q.real() ? p.real() < q.real() : p.imag() < q.imag();
            };
            std::sort(k.begin(), k.begin() + static_cast<long>(a), less);
            std::sort(k.begin() + static_cast<long>(a), k.end(), less);
            return k;
        };
        std::vector<Cx> kx = key(x);
        bool dup = false;
        for (const BetheSolution& s : found) {
            std::vector<Cx> ks;
            for (const Scalar& e : s.data.u.elements()) ks.push_back(e.cplx());
            for (const Scalar& e : s.data.v.elements()) ks.push_back(e.cplx());
            ks = key(ks);
            double dist = 0;
            for (std::size_t k = 0; k < n; ++k)
                dist = std::max(dist, std::abs(ks[k] - kx[k]));
            if (dist < sep) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        found.push_back({pack(x, a), rnorm, true, iters});
    }
    return found;
}

OnshellReport verify_onshell(const ChainFamily& fam, const BetheSolution& sol,
                             const std::vector<Scalar>& z_samples, double tol) {
    GradedVector phi = bv_supertrace(fam, sol.data);
    OnshellReport rep;
    double pn = phi.norm();
    if (pn == 0.0) {
        rep.ratio = std::numeric_limits<double>::infinity();
        return rep;
    }
    for (const Scalar& z : z_samples) {
        GradedVector lhs = fam.transfer(z).apply(phi);
        lhs -= tau_eigenvalue(fam, z, sol.data) * phi;
        rep.ratio = std::max(rep.ratio, lhs.norm() / pn);
    }
    rep.pass = rep.ratio <= tol;
    return rep;
}

}  // namespace sb
