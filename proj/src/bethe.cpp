#include "sb/bethe.hpp"

#include <algorithm>

namespace sb {

namespace {

// (2|1) -> false, (1|2) -> true; anything else is not a Bethe-vector home.
bool tilde_grading(const Grading& g) {
    if (g.m() == 2 && g.n() == 1) return false;
    if (g.m() == 1 && g.n() == 2) return true;
    throw TagMismatch("Bethe vector construction needs a (2|1) or (1|2) family");
}

Scalar inv_nz(const Scalar& s, const char* what) {
    if (s.is_zero()) throw PoleError(what);
    return s.inv();
}

constexpr std::size_t kDenseGuard = 2187;  // 3^7

GradedSpace guarded_big_space(const Family& fam, std::size_t aux_copies) {
    std::size_t dim = fam.space().dim();
    for (std::size_t p = 0; p < aux_copies; ++p) {
        dim *= static_cast<std::size_t>(fam.grading().dim());
        if (dim > kDenseGuard)
            throw SizeGuard("auxiliary tensor space exceeds the dense-work guard");
    }
    return GradedSpace(fam.grading(), aux_copies).concat(fam.space());
}

void combinations(std::size_t n, std::size_t k, std::size_t start,
                  std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i + (k - cur.size()) <= n; ++i) {
        cur.push_back(i);
        combinations(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

// prod-> T_ij(s_1)...T_ij(s_k) applied to Omega (column) or Omega-dagger (row).
GradedVector product_state(const Family& fam, int i, int j, const ParamSet& s,
                           VectorSide side) {
    if (side == VectorSide::Column) {
        GradedVector v = fam.omega();
        for (std::size_t p = s.size(); p >= 1; --p)
            v = fam.entry(i, j, s[p - 1]).apply(v);
        return v;
    }
    GradedVector v = fam.omega_dual();
    for (std::size_t p = 0; p < s.size(); ++p)
        v = fam.entry(i, j, s[p]).apply_left(v);
    return v;
}

GradedMatrix mat_word(const Family& fam, const std::vector<GenSymbol>& word) {
    GradedMatrix m = GradedMatrix::identity(fam.space(), fam.backend());
    for (const GenSymbol& s : word) m = m * fam.entry(s.i, s.j, s.param);
    return m;
}

void push_letters(std::vector<GenSymbol>& w, int i, int j, const ParamSet& s) {
    for (std::size_t p = 0; p < s.size(); ++p) w.push_back({i, j, s[p]});
}

void push_lambdas(std::vector<std::pair<int, Scalar>>& l, const ParamSet& s) {
    for (std::size_t p = 0; p < s.size(); ++p) l.emplace_back(2, s[p]);
}

// Recursion bases: pure product states over one sector.
GradedVector base_v_only(const Family& fam, const ParamSet& v) {
    GradedVector res = product_state(fam, 2, 3, v, VectorSide::Column);
    if (tilde_grading(fam.grading()))
        return apply_sign(Scalar::one(fam.backend()), parity_sign(v.size())) * res;
    return inv_nz(H_norm(v, fam.c()), "product normalization H(v) vanishes") * res;
}

GradedVector base_u_only(const Family& fam, const ParamSet& u) {
    GradedVector res = product_state(fam, 1, 2, u, VectorSide::Column);
    if (tilde_grading(fam.grading()))
        return inv_nz(H_norm(u, fam.c()), "product normalization H(u) vanishes") * res;
    return res;
}

GradedVector rec_peel_u(const Family& fam, const ParamSet& u, const ParamSet& v) {
    if (u.empty()) return base_v_only(fam, v);
    const Scalar& c = fam.c();
    Scalar u1 = u[0];
    ParamSet urest = u.without(0);
    GradedVector acc = fam.entry(1, 2, u1).apply(rec_peel_u(fam, urest, v));
    if (!tilde_grading(fam.grading())) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            Scalar coeff = fam.weight(2, v[j]) *
                           eval_structure(StructureFn::g, v[j], u1, c) *
                           product_over(StructureFn::f, v[j], urest, c) *
                           product_over(StructureFn::g, v.without(j), v[j], c);
            acc += coeff * fam.entry(1, 3, u1).apply(rec_peel_u(fam, urest, v.without(j)));
        }
        return acc;
    }
    for (std::size_t j = 0; j < v.size(); ++j) {
        Scalar coeff = fam.weight(2, v[j]) *
                       eval_structure(StructureFn::g, u1, v[j], c) *
                       product_over(StructureFn::f, urest, v[j], c) *
                       product_over(StructureFn::f, v[j], v.without(j), c);
        acc -= coeff * fam.entry(1, 3, u1).apply(rec_peel_u(fam, urest, v.without(j)));
    }
    return inv_nz(product_over(StructureFn::h, urest, u1, c),
                  "recursion prefactor h(u-rest, u_1) vanishes") *
           acc;
}

GradedVector rec_peel_v(const Family& fam, const ParamSet& u, const ParamSet& v) {
    if (v.empty()) return base_u_only(fam, u);
    const Scalar& c = fam.c();
    Scalar v1 = v[0];
    ParamSet vrest = v.without(0);
    if (!tilde_grading(fam.grading())) {
        GradedVector acc = fam.entry(2, 3, v1).apply(rec_peel_v(fam, u, vrest));
        for (std::size_t j = 0; j < u.size(); ++j) {
            Scalar coeff = fam.weight(2, u[j]) *
                           eval_structure(StructureFn::g, v1, u[j], c) *
                           product_over(StructureFn::f, vrest, u[j], c) *
                           product_over(StructureFn::f, u[j], u.without(j), c);
            acc += coeff * fam.entry(1, 3, v1).apply(rec_peel_v(fam, u.without(j), vrest));
        }
        return inv_nz(product_over(StructureFn::h, vrest, v1, c),
                      "recursion prefactor h(v-rest, v_1) vanishes") *
               acc;
    }
    Scalar minus = -Scalar::one(fam.backend());
    GradedVector acc = minus * fam.entry(2, 3, v1).apply(rec_peel_v(fam, u, vrest));
    for (std::size_t j = 0; j < u.size(); ++j) {
        Scalar coeff = fam.weight(2, u[j]) *
                       eval_structure(StructureFn::g, u[j], v1, c) *
                       product_over(StructureFn::f, u[j], vrest, c) *
                       product_over(StructureFn::g, u.without(j), u[j], c);
        acc -= coeff * fam.entry(1, 3, v1).apply(rec_peel_v(fam, u.without(j), vrest));
    }
    return acc;
}

GradedVector dual_rec_21(const Family& fam, const ParamSet& u, const ParamSet& v);
GradedVector dual_rec_32(const Family& fam, const ParamSet& u, const ParamSet& v);

// Closed forms of the one-sector dual products (the 21-rule cannot peel
// an empty u set, and vice versa).
GradedVector dual_base_v_only(const Family& fam, const ParamSet& v) {
    GradedVector res = product_state(fam, 3, 2, v, VectorSide::Row);
    if (tilde_grading(fam.grading()))
        return apply_sign(Scalar::one(fam.backend()), parity_sign(v.size())) * res;
    Scalar coeff = inv_nz(H_norm(v, fam.c(), true), "dual normalization H(v*) vanishes");
    long n = static_cast<long>(v.size());
    return apply_sign(coeff, parity_sign(n * (n - 1) / 2)) * res;
}

GradedVector dual_base_u_only(const Family& fam, const ParamSet& u) {
    GradedVector res = product_state(fam, 2, 1, u, VectorSide::Row);
    if (!tilde_grading(fam.grading())) return res;
    Scalar coeff = inv_nz(H_norm(u, fam.c(), true), "dual normalization H(u*) vanishes");
    long n = static_cast<long>(u.size());
    return apply_sign(coeff, parity_sign(n * (n - 1) / 2)) * res;
}

GradedVector dual_rec_21(const Family& fam, const ParamSet& u, const ParamSet& v) {
    if (u.empty()) return dual_base_v_only(fam, v);
    const Scalar& c = fam.c();
    std::size_t a = u.size(), b = v.size();
    Scalar ua = u[a - 1];
    ParamSet urest = u.without(a - 1);
    if (!tilde_grading(fam.grading())) {
        GradedVector acc = fam.entry(2, 1, ua).apply_left(dual_rec_21(fam, urest, v));
        for (std::size_t j = 0; j < b; ++j) {
            Scalar coeff = fam.weight(2, v[j]) *
                           eval_structure(StructureFn::g, v[j], ua, c) *
                           product_over(StructureFn::f, v[j], urest, c) *
                           product_over(StructureFn::g, v.without(j), v[j], c);
            coeff = apply_sign(coeff, parity_sign(static_cast<long>(b) - 1));
            acc += coeff *
                   fam.entry(3, 1, ua).apply_left(dual_rec_21(fam, urest, v.without(j)));
        }
        return acc;
    }
    GradedVector acc = fam.entry(2, 1, ua).apply_left(dual_rec_21(fam, urest, v));
    for (std::size_t j = 0; j < b; ++j) {
        Scalar coeff = fam.weight(2, v[j]) *
                       eval_structure(StructureFn::g, ua, v[j], c) *
                       product_over(StructureFn::f, urest, v[j], c) *
                       product_over(StructureFn::f, v[j], v.without(j), c);
        acc -= coeff *
               fam.entry(3, 1, ua).apply_left(dual_rec_21(fam, urest, v.without(j)));
    }
    Scalar pref = inv_nz(product_over(StructureFn::h, urest, ua, c),
                         "dual recursion prefactor h(u-rest, u_a) vanishes");
    pref = apply_sign(pref, parity_sign(static_cast<long>(a) - 1));
    return pref * acc;
}

GradedVector dual_rec_32(const Family& fam, const ParamSet& u, const ParamSet& v) {
    if (v.empty()) return dual_base_u_only(fam, u);
    const Scalar& c = fam.c();
    std::size_t a = u.size(), b = v.size();
    Scalar vb = v[b - 1];
    ParamSet vrest = v.without(b - 1);
    if (!tilde_grading(fam.grading())) {
        GradedVector acc = fam.entry(3, 2, vb).apply_left(dual_rec_32(fam, u, vrest));
        for (std::size_t j = 0; j < a; ++j) {
            Scalar coeff = fam.weight(2, u[j]) *
                           eval_structure(StructureFn::g, vb, u[j], c) *
                           product_over(StructureFn::f, vrest, u[j], c) *
                           product_over(StructureFn::f, u[j], u.without(j), c);
            acc += coeff *
                   fam.entry(3, 1, vb).apply_left(dual_rec_32(fam, u.without(j), vrest));
        }
        Scalar pref = inv_nz(product_over(StructureFn::h, vrest, vb, c),
                             "dual recursion prefactor h(v-rest, v_b) vanishes");
        pref = apply_sign(pref, parity_sign(static_cast<long>(b) - 1));
        return pref * acc;
    }
    Scalar minus = -Scalar::one(fam.backend());
    GradedVector acc = minus * fam.entry(3, 2, vb).apply_left(dual_rec_32(fam, u, vrest));
    for (std::size_t j = 0; j < a; ++j) {
        Scalar coeff = fam.weight(2, u[j]) *
                       eval_structure(StructureFn::g, u[j], vb, c) *
                       product_over(StructureFn::f, u[j], vrest, c) *
                       product_over(StructureFn::g, u.without(j), u[j], c);
        coeff = apply_sign(coeff, parity_sign(static_cast<long>(a) - 1));
        acc -= coeff *
               fam.entry(3, 1, vb).apply_left(dual_rec_32(fam, u.without(j), vrest));
    }
    return acc;
}

}  // namespace

std::vector<std::vector<ParamSet>> enumerate_partitions(
    const ParamSet& set, const std::vector<std::size_t>& block_sizes) {
    std::size_t total = 0;
    for (std::size_t s : block_sizes) total += s;
    if (total != set.size())
        throw SizeMismatch("block sizes do not sum to the set size");

    std::vector<std::vector<ParamSet>> out;
    std::vector<ParamSet> blocks(block_sizes.size());
    std::vector<std::size_t> remaining(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) remaining[i] = i;

    // recursive lexicographic choice of index subsets, block 0 outermost
    auto rec = [&](auto&& self, std::size_t blk,
                   const std::vector<std::size_t>& rest) -> void {
        if (blk == block_sizes.size()) {
            out.push_back(blocks);
            return;
        }
        std::vector<std::vector<std::size_t>> choices;
        std::vector<std::size_t> cur;
        combinations(rest.size(), block_sizes[blk], 0, cur, choices);
        for (const auto& pick : choices) {
            std::vector<bool> used(rest.size(), false);
            ParamSet block;
            for (std::size_t pos : pick) {
                used[pos] = true;
                block.push_back(set[rest[pos]]);
            }
            std::vector<std::size_t> next;
            for (std::size_t p = 0; p < rest.size(); ++p)
                if (!used[p]) next.push_back(rest[p]);
            blocks[blk] = std::move(block);
            self(self, blk + 1, next);
        }
    };
    rec(rec, 0, remaining);
    return out;
}

GradedVector bv_supertrace(const Family& fam, const BetheData& d, TraceOrder order) {
    bool tilde = tilde_grading(fam.grading());
    std::size_t a = d.a(), b = d.b(), N = a + b;
    if (N == 0) return fam.omega();
    GradedSpace big = guarded_big_space(fam, N);
    const GradedSpace& phys = fam.space();

    std::vector<int> digits(big.factor_count(), 1);
    for (std::size_t p = a; p < N; ++p) digits[p] = 2;
    GradedVector vec = basis_vector(big, digits, fam.backend());

    // lowering word, rightmost letter applied first
    if (order == TraceOrder::Natural) {
        for (std::size_t p = N; p > a; --p) vec = apply_elementary(big, p - 1, 3, 2, vec);
        for (std::size_t p = a; p >= 1; --p) vec = apply_elementary(big, p - 1, 2, 1, vec);
    } else {
        for (std::size_t p = 1; p <= a; ++p) vec = apply_elementary(big, p - 1, 2, 1, vec);
        for (std::size_t p = a + 1; p <= N; ++p)
            vec = apply_elementary(big, p - 1, 3, 2, vec);
    }

    // R-product coupling the v-spaces to the u-spaces
    for (std::size_t j = b; j >= 1; --j)
        for (std::size_t k = 1; k <= a; ++k)
            vec = apply_R(big, a + j - 1, k - 1, d.v[j - 1], d.u[k - 1], fam.c(), vec);

    for (std::size_t p = N; p >= 1; --p) {
        const Scalar& w = p <= a ? d.u[p - 1] : d.v[p - a - 1];
        vec = fam.apply_T(big, p - 1, N, w, vec);
    }

    long p_aux = 0;
    for (std::size_t p = 0; p < N; ++p) p_aux += fam.grading().parity(digits[p]);
    Scalar scale = tilde
                       ? inv_nz(H_norm(d.u, fam.c()), "trace normalization H(u) vanishes")
                       : inv_nz(H_norm(d.v, fam.c()), "trace normalization H(v) vanishes");
    long pref = tilde ? (order == TraceOrder::Natural
                             ? static_cast<long>(a)
                             : static_cast<long>(a) * (static_cast<long>(a) + 1) / 2)
                      : (order == TraceOrder::Natural
                             ? static_cast<long>(b)
                             : static_cast<long>(b) * (static_cast<long>(b) + 1) / 2);
    scale = apply_sign(scale, parity_sign(pref));

    GradedVector out(phys, VectorSide::Column, fam.backend());
    for (std::size_t q = 0; q < phys.dim(); ++q) {
        std::vector<int> full = digits;
        std::vector<int> dq = phys.digits(q);
        for (std::size_t i = 0; i < dq.size(); ++i) full[N + i] = dq[i];
        const Scalar& e = vec[big.index(full)];
        if (e.is_zero()) continue;
        out[q] = apply_sign(e * scale, parity_sign(p_aux * (1 + phys.parity(q))));
    }
    return out;
}

GradedVector bv_tv(const Family& fam, const BetheData& d) {
    tilde_grading(fam.grading());
    std::size_t a = d.a(), b = d.b(), N = a + b;
    if (N == 0) return fam.omega();
    GradedSpace big = guarded_big_space(fam, N);
    const GradedSpace& phys = fam.space();

    std::vector<Scalar> w;
    for (std::size_t k = 0; k < a; ++k) w.push_back(d.u[k]);
    for (std::size_t k = 0; k < b; ++k) w.push_back(d.v[k]);

    std::vector<int> digits(big.factor_count(), 1);
    for (std::size_t p = a; p < N; ++p) digits[p] = 2;
    GradedVector vec = basis_vector(big, digits, fam.backend());

    for (std::size_t p = N; p > a; --p) vec = apply_elementary(big, p - 1, 3, 2, vec);
    for (std::size_t p = a; p >= 1; --p) vec = apply_elementary(big, p - 1, 2, 1, vec);

    // full ordered pair product, rightmost factor first
    for (std::size_t j = 2; j <= N; ++j)
        for (std::size_t i = 1; i < j; ++i)
            vec = apply_R(big, j - 1, i - 1, w[j - 1], w[i - 1], fam.c(), vec);

    for (std::size_t p = N; p >= 1; --p) vec = fam.apply_T(big, p - 1, N, w[p - 1], vec);

    long p_aux = 0;
    for (std::size_t p = 0; p < N; ++p) p_aux += fam.grading().parity(digits[p]);
    GradedVector out(phys, VectorSide::Column, fam.backend());
    for (std::size_t q = 0; q < phys.dim(); ++q) {
        std::vector<int> full = digits;
        std::vector<int> dq = phys.digits(q);
        for (std::size_t i = 0; i < dq.size(); ++i) full[N + i] = dq[i];
        const Scalar& e = vec[big.index(full)];
        if (e.is_zero()) continue;
        out[q] = apply_sign(e, parity_sign(p_aux * (1 + phys.parity(q))));
    }
    return out;
}

GradedVector bv_recursive(const Family& fam, const BetheData& d, RecRule rule) {
    tilde_grading(fam.grading());
    return rule == RecRule::PeelU ? rec_peel_u(fam, d.u, d.v)
                                  : rec_peel_v(fam, d.u, d.v);
}

Expr bv_explicit_expr(AlgebraTag tag, const BetheData& d, const Scalar& c,
                      ExplForm form) {
    Expr e(tag, Terminal::OmegaRight);
    std::size_t a = d.a(), b = d.b();
    for (std::size_t l = 0; l <= std::min(a, b); ++l)
        for (const auto& up : enumerate_partitions(d.u, {l, a - l}))
            for (const auto& vp : enumerate_partitions(d.v, {l, b - l})) {
                const ParamSet &uI = up[0], &uII = up[1], &vI = vp[0], &vII = vp[1];
                Monomial m;
                if (tag == AlgebraTag::Y21) {
                    if (form == ExplForm::X) {
                        m.coeff = product_over(StructureFn::g, vI, uI, c) *
                                  product_over(StructureFn::f, uI, uII, c) *
                                  product_over(StructureFn::g, vII, vI, c) *
                                  product_over(StructureFn::h, uI, uI, c) *
                                  inv_nz(H_norm(uI, c), "H(u_I) vanishes") *
                                  inv_nz(H_norm(vII, c), "H(v_II) vanishes");
                        push_letters(m.word, 1, 3, uI);
                        push_letters(m.word, 1, 2, uII);
                        push_letters(m.word, 2, 3, vII);
                        push_lambdas(m.lambdas, vI);
                    } else {
                        m.coeff = izergin_kernel(vI, uI, c) *
                                  product_over(StructureFn::f, uI, uII, c) *
                                  product_over(StructureFn::g, vII, vI, c) *
                                  inv_nz(H_norm(vI, c), "H(v_I) vanishes") *
                                  inv_nz(H_norm(vII, c), "H(v_II) vanishes");
                        push_letters(m.word, 1, 3, vI);
                        push_letters(m.word, 2, 3, vII);
                        push_letters(m.word, 1, 2, uII);
                        push_lambdas(m.lambdas, uI);
                    }
                } else {
                    if (form == ExplForm::X) {
                        m.coeff = product_over(StructureFn::g, uI, vI, c) *
                                  product_over(StructureFn::f, vI, vII, c) *
                                  product_over(StructureFn::g, uII, uI, c) *
                                  product_over(StructureFn::h, vI, vI, c) *
                                  inv_nz(H_norm(vI, c), "H(v_I) vanishes") *
                                  inv_nz(H_norm(uII, c), "H(u_II) vanishes");
                        push_letters(m.word, 1, 3, vI);
                        push_letters(m.word, 2, 3, vII);
                        push_letters(m.word, 1, 2, uII);
                        push_lambdas(m.lambdas, uI);
                    } else {
                        m.coeff = izergin_kernel(uI, vI, c) *
                                  product_over(StructureFn::f, vI, vII, c) *
                                  product_over(StructureFn::g, uII, uI, c) *
                                  inv_nz(H_norm(uI, c), "H(u_I) vanishes") *
                                  inv_nz(H_norm(uII, c), "H(u_II) vanishes");
                        push_letters(m.word, 1, 3, uI);
                        push_letters(m.word, 1, 2, uII);
                        push_letters(m.word, 2, 3, vII);
                        push_lambdas(m.lambdas, vI);
                    }
                    m.coeff = apply_sign(m.coeff, parity_sign(static_cast<long>(b)));
                }
                e.add(std::move(m));
            }
    return e;
}

std::pair<Expr, GradedVector> bv_explicit(const Family& fam, const BetheData& d,
                                          ExplForm form) {
    AlgebraTag tag = tilde_grading(fam.grading()) ? AlgebraTag::Y12 : AlgebraTag::Y21;
    Expr e = bv_explicit_expr(tag, d, fam.c(), form);
    GradedVector v = evaluate(e, fam);
    return {std::move(e), std::move(v)};
}

GradedVector dual_supertrace(const Family& fam, const BetheData& d) {
    bool tilde = tilde_grading(fam.grading());
    std::size_t a = d.a(), b = d.b(), N = a + b;
    if (N == 0) return fam.omega_dual();
    GradedSpace big = guarded_big_space(fam, N);
    const GradedSpace& phys = fam.space();

    std::vector<int> digits(big.factor_count(), 1);
    for (std::size_t p = 0; p < a; ++p) digits[p] = 2;
    for (std::size_t p = a; p < N; ++p) digits[p] = 3;
    GradedVector vec = basis_vector(big, digits, fam.backend(), VectorSide::Row);

    // row vector: leftmost operator acts first
    for (std::size_t p = 1; p <= N; ++p) {
        const Scalar& w = p <= a ? d.u[p - 1] : d.v[p - a - 1];
        vec = fam.apply_T(big, p - 1, N, w, vec);
    }
    for (std::size_t j = 1; j <= b; ++j)
        for (std::size_t k = a; k >= 1; --k)
            vec = apply_R(big, a + j - 1, k - 1, d.v[j - 1], d.u[k - 1], fam.c(), vec);
    for (std::size_t p = 1; p <= a; ++p) vec = apply_elementary(big, p - 1, 1, 2, vec);
    for (std::size_t p = a + 1; p <= N; ++p)
        vec = apply_elementary(big, p - 1, 2, 3, vec);

    long p_aux = 0;
    for (std::size_t p = 0; p < N; ++p) p_aux += fam.grading().parity(digits[p]);
    Scalar scale =
        tilde ? inv_nz(H_norm(d.u, fam.c(), true), "dual normalization H(u*) vanishes")
              : inv_nz(H_norm(d.v, fam.c(), true), "dual normalization H(v*) vanishes");
    long n = tilde ? static_cast<long>(a) : static_cast<long>(b);
    scale = apply_sign(scale, parity_sign(n * (n - 1) / 2));

    GradedVector out(phys, VectorSide::Row, fam.backend());
    for (std::size_t q = 0; q < phys.dim(); ++q) {
        std::vector<int> full = digits;
        std::vector<int> dq = phys.digits(q);
        for (std::size_t i = 0; i < dq.size(); ++i) full[N + i] = dq[i];
        const Scalar& e = vec[big.index(full)];
        if (e.is_zero()) continue;
        out[q] = apply_sign(e * scale, parity_sign(p_aux * (1 + phys.parity(q))));
    }
    return out;
}

GradedVector dual_recursive(const Family& fam, const BetheData& d, DualRecRule rule) {
    tilde_grading(fam.grading());
    return rule == DualRecRule::PeelU21 ? dual_rec_21(fam, d.u, d.v)
                                        : dual_rec_32(fam, d.u, d.v);
}

Expr dual_explicit_expr(AlgebraTag tag, const BetheData& d, const Scalar& c,
                        ExplForm form) {
    Expr e(tag, Terminal::OmegaDaggerLeft);
    std::size_t a = d.a(), b = d.b();
    long la = static_cast<long>(a), lb = static_cast<long>(b);
    for (std::size_t l = 0; l <= std::min(a, b); ++l)
        for (const auto& up : enumerate_partitions(d.u, {l, a - l}))
            for (const auto& vp : enumerate_partitions(d.v, {l, b - l})) {
                const ParamSet &uI = up[0], &uII = up[1], &vI = vp[0], &vII = vp[1];
                Monomial m;
                if (tag == AlgebraTag::Y21) {
                    if (form == ExplForm::X) {
                        m.coeff = product_over(StructureFn::g, vI, uI, c) *
                                  product_over(StructureFn::f, uI, uII, c) *
                                  product_over(StructureFn::g, vII, vI, c) *
                                  product_over(StructureFn::h, uI, uI, c) *
                                  inv_nz(H_norm(vII, c, true), "H(v_II*) vanishes") *
                                  inv_nz(H_norm(uI, c, true), "H(u_I*) vanishes");
                        push_letters(m.word, 3, 2, vII);
                        push_letters(m.word, 2, 1, uII);
                        push_letters(m.word, 3, 1, uI);
                        push_lambdas(m.lambdas, vI);
                    } else {
                        m.coeff = izergin_kernel(vI, uI, c) *
                                  product_over(StructureFn::f, uI, uII, c) *
                                  product_over(StructureFn::g, vII, vI, c) *
                                  inv_nz(H_norm(vII, c, true), "H(v_II*) vanishes") *
                                  inv_nz(H_norm(vI, c, true), "H(v_I*) vanishes");
                        push_letters(m.word, 2, 1, uII);
                        push_letters(m.word, 3, 2, vII);
                        push_letters(m.word, 3, 1, vI);
                        push_lambdas(m.lambdas, uI);
                    }
                    m.coeff = apply_sign(m.coeff, parity_sign((lb - 1) * lb / 2));
                } else {
                    if (form == ExplForm::X) {
                        m.coeff = product_over(StructureFn::g, uI, vI, c) *
                                  product_over(StructureFn::f, vI, vII, c) *
                                  product_over(StructureFn::g, uII, uI, c) *
                                  product_over(StructureFn::h, vI, vI, c) *
                                  inv_nz(H_norm(uII, c, true), "H(u_II*) vanishes") *
                                  inv_nz(H_norm(vI, c, true), "H(v_I*) vanishes");
                        push_letters(m.word, 2, 1, uII);
                        push_letters(m.word, 3, 2, vII);
                        push_letters(m.word, 3, 1, vI);
                        push_lambdas(m.lambdas, uI);
                    } else {
                        m.coeff = izergin_kernel(uI, vI, c) *
                                  product_over(StructureFn::f, vI, vII, c) *
                                  product_over(StructureFn::g, uII, uI, c) *
                                  inv_nz(H_norm(uII, c, true), "H(u_II*) vanishes") *
                                  inv_nz(H_norm(uI, c, true), "H(u_I*) vanishes");
                        push_letters(m.word, 3, 2, vII);
                        push_letters(m.word, 2, 1, uII);
                        push_letters(m.word, 3, 1, uI);
                        push_lambdas(m.lambdas, vI);
                    }
                    m.coeff =
                        apply_sign(m.coeff, parity_sign(lb + (la - 1) * la / 2));
                }
                e.add(std::move(m));
            }
    return e;
}

std::pair<Expr, GradedVector> dual_explicit(const Family& fam, const BetheData& d,
                                            ExplForm form) {
    AlgebraTag tag = tilde_grading(fam.grading()) ? AlgebraTag::Y12 : AlgebraTag::Y21;
    Expr e = dual_explicit_expr(tag, d, fam.c(), form);
    GradedVector v = evaluate(e, fam);
    return {std::move(e), std::move(v)};
}

GradedMatrix operator_XY(const Family& fam, const BetheData& d, ExplForm form) {
    if (tilde_grading(fam.grading()))
        throw TagMismatch("the operator partition sums live in the (2|1) algebra");
    const Scalar& c = fam.c();
    std::size_t a = d.a(), b = d.b();
    GradedMatrix sum(fam.space(), fam.backend());
    for (std::size_t l = 0; l <= std::min(a, b); ++l)
        for (const auto& up : enumerate_partitions(d.u, {l, a - l}))
            for (const auto& vp : enumerate_partitions(d.v, {l, b - l})) {
                const ParamSet &uI = up[0], &uII = up[1], &vI = vp[0], &vII = vp[1];
                Scalar coeff;
                std::vector<GenSymbol> word;
                if (form == ExplForm::X) {
                    coeff = product_over(StructureFn::g, vI, uI, c) *
                            product_over(StructureFn::f, uI, uII, c) *
                            product_over(StructureFn::g, vII, vI, c) *
                            product_over(StructureFn::h, uI, uI, c) *
                            inv_nz(H_norm(uI, c), "H(u_I) vanishes") *
                            inv_nz(H_norm(vII, c), "H(v_II) vanishes");
                    push_letters(word, 1, 3, uI);
                    push_letters(word, 1, 2, uII);
                    push_letters(word, 2, 3, vII);
                    push_letters(word, 2, 2, vI);
                } else {
                    coeff = izergin_kernel(vI, uI, c) *
                            product_over(StructureFn::f, uI, uII, c) *
                            product_over(StructureFn::g, vII, vI, c) *
                            inv_nz(H_norm(vI, c), "H(v_I) vanishes") *
                            inv_nz(H_norm(vII, c), "H(v_II) vanishes");
                    push_letters(word, 1, 3, vI);
                    push_letters(word, 2, 3, vII);
                    push_letters(word, 1, 2, uII);
                    push_letters(word, 2, 2, uI);
                }
                sum += coeff * mat_word(fam, word);
            }
    return sum;
}

GradedMatrix commutation_residual(const Family& fam, const Scalar& v,
                                  const ParamSet& u, CommRule which) {
    if (tilde_grading(fam.grading()))
        throw TagMismatch("the commutation identities are stated in the (2|1) algebra");
    const Scalar& c = fam.c();
    auto TT13 = [&](const ParamSet& s) {
        std::vector<GenSymbol> word;
        push_letters(word, 1, 3, s);
        return inv_nz(H_norm(s, c), "H of the 13-string vanishes") * mat_word(fam, word);
    };
    std::size_t l = u.size();
    if (which == CommRule::T12ThroughT13) {
        GradedMatrix lhs = fam.entry(1, 2, v) * TT13(u);
        GradedMatrix rhs =
            product_over(StructureFn::f, u, v, c) * (TT13(u) * fam.entry(1, 2, v));
        for (std::size_t k = 0; k < l; ++k) {
            Scalar coeff = eval_structure(StructureFn::g, v, u[k], c) *
                           product_over(StructureFn::g, u.without(k), u[k], c);
            rhs += coeff * (fam.entry(1, 3, v) * TT13(u.without(k)) *
                            fam.entry(1, 2, u[k]));
        }
        return lhs - rhs;
    }
    GradedMatrix lhs = fam.entry(2, 3, v) * TT13(u);
    Scalar direct = apply_sign(product_over(StructureFn::f, u, v, c),
                               parity_sign(static_cast<long>(l)));
    GradedMatrix rhs = direct * (TT13(u) * fam.entry(2, 3, v));
    for (std::size_t k = 0; k < l; ++k) {
        Scalar coeff = eval_structure(StructureFn::g, u[k], v, c) *
                       product_over(StructureFn::g, u[k], u.without(k), c);
        rhs += coeff *
               (fam.entry(1, 3, v) * TT13(u.without(k)) * fam.entry(2, 3, u[k]));
    }
    return lhs - rhs;
}

}  // namespace sb
