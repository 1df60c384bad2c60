#include "sb/kernels.hpp"

#include <stdexcept>

namespace sb {

ParamSet::ParamSet(std::vector<Scalar> elems) : elems_(std::move(elems)) {
    for (std::size_t i = 1; i < elems_.size(); ++i)
        if (elems_[i].backend() != elems_[0].backend())
            throw BackendMismatch("ParamSet with mixed backends");
}

Backend ParamSet::backend() const {
    return elems_.empty() ? Backend::Exact : elems_[0].backend();
}

void ParamSet::push_back(const Scalar& s) {
    if (!elems_.empty() && s.backend() != elems_[0].backend())
        throw BackendMismatch("ParamSet::push_back");
    elems_.push_back(s);
}

ParamSet ParamSet::without(std::size_t i) const {
    if (i >= elems_.size()) throw std::out_of_range("ParamSet::without");
    std::vector<Scalar> out;
    out.reserve(elems_.size() - 1);
    for (std::size_t j = 0; j < elems_.size(); ++j)
        if (j != i) out.push_back(elems_[j]);
    return ParamSet(std::move(out));
}

ParamSet ParamSet::conjugated() const {
    return ParamSet(std::vector<Scalar>(elems_.rbegin(), elems_.rend()));
}

ParamSet ParamSet::transposed(std::size_t j) const {
    if (j + 1 >= elems_.size()) throw std::out_of_range("ParamSet::transposed");
    std::vector<Scalar> out = elems_;
    std::swap(out[j], out[j + 1]);
    return ParamSet(std::move(out));
}

ParamSet ParamSet::concat(const ParamSet& other) const {
    std::vector<Scalar> out = elems_;
    out.insert(out.end(), other.elems_.begin(), other.elems_.end());
    return ParamSet(std::move(out));
}

Scalar eval_structure(StructureFn kind, const Scalar& u, const Scalar& v, const Scalar& c) {
    if (kind == StructureFn::f1) return eval_structure(StructureFn::f, v, u, c);
    Scalar d = u - v;
    switch (kind) {
        case StructureFn::g:
            if (d.is_zero()) throw PoleError("g(u,v) at u = v");
            return c / d;
        case StructureFn::f:
        case StructureFn::f0:
            if (d.is_zero()) throw PoleError("f(u,v) at u = v");
            return (d + c) / d;
        case StructureFn::h:
            if (d.is_zero() && c.is_zero()) throw PoleError("h(u,v) with c = 0");
            return (d + c) / c;
        default:
            throw std::logic_error("unreachable");
    }
}

Scalar product_over(StructureFn kind, const ParamSet& left, const ParamSet& right,
                    const Scalar& c) {
    Backend b = left.empty() ? right.backend() : left.backend();
    Scalar acc = Scalar::one(b);
    for (std::size_t i = 0; i < left.size(); ++i)
        for (std::size_t j = 0; j < right.size(); ++j)
            acc *= eval_structure(kind, left[i], right[j], c);
    return acc;
}

Scalar product_over(StructureFn kind, const ParamSet& left, const Scalar& right,
                    const Scalar& c) {
    return product_over(kind, left, ParamSet({right}), c);
}

Scalar product_over(StructureFn kind, const Scalar& left, const ParamSet& right,
                    const Scalar& c) {
    return product_over(kind, ParamSet({left}), right, c);
}

Scalar H_norm(const ParamSet& v, const Scalar& c, bool conjugated) {
    Scalar acc = Scalar::one(v.empty() ? c.backend() : v.backend());
    for (std::size_t k = 0; k < v.size(); ++k)
        for (std::size_t j = k + 1; j < v.size(); ++j)
            acc *= conjugated ? eval_structure(StructureFn::h, v[k], v[j], c)
                              : eval_structure(StructureFn::h, v[j], v[k], c);
    return acc;
}

namespace {

// Cofactor determinant; fine for the small orders used here.
Scalar det(const std::vector<std::vector<Scalar>>& m, Backend b) {
    std::size_t n = m.size();
    if (n == 0) return Scalar::one(b);
    if (n == 1) return m[0][0];
    Scalar acc = Scalar::zero(b);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Scalar>> minor;
        minor.reserve(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Scalar> row;
            row.reserve(n - 1);
            for (std::size_t col = 0; col < n; ++col)
                if (col != j) row.push_back(m[r][col]);
            minor.push_back(std::move(row));
        }
        acc += apply_sign(m[0][j] * det(minor, b), parity_sign(static_cast<long>(j)));
    }
    return acc;
}

}  // namespace

Scalar izergin_kernel(const ParamSet& v, const ParamSet& u, const Scalar& c) {
    if (v.size() != u.size())
        throw std::invalid_argument("izergin_kernel: |v| != |u|");
    std::size_t l = v.size();
    Backend bk = c.backend();
    if (l == 0) return Scalar::one(bk);

    for (std::size_t j = 0; j < l; ++j)
        for (std::size_t k = 0; k < l; ++k)
            if ((v[j] - u[k]).is_zero()) throw PoleError("izergin_kernel at v_j = u_k");

    // Row-scale the g/h entries by prod_k h(v_j,u_k) so no division by a
    // vanishing h occurs: K = Delta Delta' det[ g(v_j,u_k) prod_{k'!=k} h(v_j,u_k') ].
    std::vector<std::vector<Scalar>> m(l, std::vector<Scalar>(l, Scalar::zero(bk)));
    for (std::size_t j = 0; j < l; ++j) {
        for (std::size_t k = 0; k < l; ++k) {
            Scalar e = eval_structure(StructureFn::g, v[j], u[k], c);
            for (std::size_t k2 = 0; k2 < l; ++k2)
                if (k2 != k) e *= eval_structure(StructureFn::h, v[j], u[k2], c);
            m[j][k] = e;
        }
    }

    Scalar delta_v = Scalar::one(bk);
    Scalar delta_u = Scalar::one(bk);
    for (std::size_t j = 0; j < l; ++j)
        for (std::size_t k = 0; k < j; ++k) {
            delta_v *= eval_structure(StructureFn::g, v[j], v[k], c);
            delta_u *= eval_structure(StructureFn::g, u[k], u[j], c);
        }

    return delta_v * delta_u * det(m, bk);
}

Scalar verify_scalar_identity(ScalarIdentity which, const ScalarIdentitySample& s,
                              const Scalar& c) {
    switch (which) {
        case ScalarIdentity::KernelRecursion: {
            // K_l(v|u) expanded over the residues at v_b = u_i, v_b the last
            // element of v.
            const ParamSet& v = s.setA;
            const ParamSet& u = s.setB;
            if (v.size() != u.size() || v.empty())
                throw std::invalid_argument("kernel-recursion sample sizes");
            std::size_t l = v.size();
            const Scalar& vb = v[l - 1];
            ParamSet v_rest = v.without(l - 1);
            Scalar lhs = izergin_kernel(v, u, c);
            Scalar rhs = Scalar::zero(c.backend());
            for (std::size_t i = 0; i < l; ++i) {
                ParamSet u_rest = u.without(i);
                rhs += eval_structure(StructureFn::g, vb, u[i], c) *
                       product_over(StructureFn::f, v_rest, u[i], c) *
                       product_over(StructureFn::f, u[i], u_rest, c) *
                       izergin_kernel(v_rest, u_rest, c);
            }
            return lhs - rhs;
        }
        case ScalarIdentity::PoleExpansion: {
            // g(v_I, u_a) / g(u_a, u_ii) as a sum over the poles at u_a = v_i.
            const ParamSet& vI = s.setA;
            const ParamSet& uii = s.setB;
            const Scalar& ua = s.x;
            Scalar lhs = product_over(StructureFn::g, vI, ua, c) /
                         product_over(StructureFn::g, ua, uii, c);
            Scalar rhs = Scalar::zero(c.backend());
            for (std::size_t i = 0; i < vI.size(); ++i) {
                ParamSet v_rest = vI.without(i);
                rhs += eval_structure(StructureFn::g, vI[i], ua, c) *
                       product_over(StructureFn::g, v_rest, vI[i], c) /
                       product_over(StructureFn::g, vI[i], uii, c);
            }
            return lhs - rhs;
        }
        case ScalarIdentity::ContourUi: {
            // J = g(v_i,u_a) { f(u_a, u-bar_a) - f(v_i, u-bar_a) }, with
            // J = sum_i f(u_i, u-bar_a \ u_i) g(u_a,u_i) g(v_i,u_i).
            // Sum of residues of c/((u_a-z)(v_i-z)) prod (z-u_k+c)/(z-u_k).
            const ParamSet& ubar = s.setA;  // u-bar_a
            const Scalar& ua = s.x;
            const Scalar& vi = s.y;
            Scalar j_sum = Scalar::zero(c.backend());
            for (std::size_t i = 0; i < ubar.size(); ++i) {
                ParamSet u0 = ubar.without(i);
                j_sum += product_over(StructureFn::f, ubar[i], u0, c) *
                         eval_structure(StructureFn::g, ua, ubar[i], c) *
                         eval_structure(StructureFn::g, vi, ubar[i], c);
            }
            Scalar gva = eval_structure(StructureFn::g, vi, ua, c);
            return j_sum - gva * (product_over(StructureFn::f, ua, ubar, c) -
                                  product_over(StructureFn::f, vi, ubar, c));
        }
        case ScalarIdentity::ContourV0: {
            // sum_{v_i in v_II'} g(v_i,u_i) g(v_b,v_i) f(v_II, v_i)
            //   = g(v_b,u_i) { f(v_II',u_i) - f(v_II',v_b) }
            const ParamSet& vII = s.setA;  // v_II'
            const Scalar& ui = s.x;
            const Scalar& vb = s.y;
            Scalar lhs = Scalar::zero(c.backend());
            for (std::size_t i = 0; i < vII.size(); ++i) {
                ParamSet rest = vII.without(i);
                lhs += eval_structure(StructureFn::g, vII[i], ui, c) *
                       eval_structure(StructureFn::g, vb, vII[i], c) *
                       product_over(StructureFn::f, rest, vII[i], c);
            }
            Scalar rhs = eval_structure(StructureFn::g, vb, ui, c) *
                         (product_over(StructureFn::f, vII, ui, c) -
                          product_over(StructureFn::f, vII, vb, c));
            return lhs - rhs;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace sb
