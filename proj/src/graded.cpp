#include "sb/graded.hpp"

#include <cmath>

namespace sb {

Grading::Grading(int m, int n, GradingFlavor flavor) : m_(m), n_(n), flavor_(flavor) {
    if (m < 0 || n < 0 || m + n == 0)
        throw std::invalid_argument("Grading: need m,n >= 0 and m+n > 0");
    parity_.resize(m + n);
    switch (flavor) {
        case GradingFlavor::Distinguished:
            for (int i = 0; i < m + n; ++i) parity_[i] = (i < m) ? 0 : 1;
            break;
        case GradingFlavor::Fermionic:
            for (int i = 0; i < m + n; ++i) parity_[i] = (i < n) ? 1 : 0;
            break;
        case GradingFlavor::Alternating: {
            // even/odd interleaved as far as the counts allow
            int even_left = m, odd_left = n, want = 0;
            for (int i = 0; i < m + n; ++i) {
                int p = want;
                if (p == 0 && even_left == 0) p = 1;
                if (p == 1 && odd_left == 0) p = 0;
                parity_[i] = p;
                (p == 0 ? even_left : odd_left)--;
                want = 1 - p;
            }
            break;
        }
        case GradingFlavor::Custom:
            throw std::invalid_argument("Grading: Custom flavor needs explicit parities");
    }
}

Grading::Grading(int m, int n, std::vector<int> parities)
    : m_(m), n_(n), flavor_(GradingFlavor::Custom), parity_(std::move(parities)) {
    if (static_cast<int>(parity_.size()) != m + n)
        throw DimensionMismatch("Grading: parity list length != m+n");
    int odd = 0;
    for (int p : parity_) {
        if (p != 0 && p != 1) throw std::invalid_argument("Grading: parities must be 0/1");
        odd += p;
    }
    if (odd != n) throw std::invalid_argument("Grading: odd count != n");
}

int Grading::parity(int i) const {
    if (i < 1 || i > dim()) throw IndexOutOfRange("Grading::parity index");
    return parity_[i - 1];
}

GradedSpace::GradedSpace(std::vector<Grading> factors) : factors_(std::move(factors)) {
    stride_.resize(factors_.size());
    for (std::size_t p = factors_.size(); p-- > 0;) {
        stride_[p] = dim_;
        dim_ *= factors_[p].dim();
    }
}

GradedSpace::GradedSpace(const Grading& g, std::size_t copies)
    : GradedSpace(std::vector<Grading>(copies, g)) {}

std::vector<int> GradedSpace::digits(std::size_t index) const {
    if (index >= dim_) throw IndexOutOfRange("GradedSpace::digits");
    std::vector<int> out(factors_.size());
    for (std::size_t p = 0; p < factors_.size(); ++p)
        out[p] = static_cast<int>(index / stride_[p] % factors_[p].dim()) + 1;
    return out;
}

std::size_t GradedSpace::index(const std::vector<int>& digits) const {
    if (digits.size() != factors_.size()) throw DimensionMismatch("GradedSpace::index");
    std::size_t idx = 0;
    for (std::size_t p = 0; p < factors_.size(); ++p) {
        if (digits[p] < 1 || digits[p] > factors_[p].dim())
            throw IndexOutOfRange("GradedSpace::index digit");
        idx += static_cast<std::size_t>(digits[p] - 1) * stride_[p];
    }
    return idx;
}

int GradedSpace::parity(std::size_t index) const {
    int acc = 0;
    for (std::size_t p = 0; p < factors_.size(); ++p) acc += digit_parity(index, p);
    return acc % 2;
}

int GradedSpace::digit_parity(std::size_t index, std::size_t p) const {
    if (index >= dim_ || p >= factors_.size())
        throw IndexOutOfRange("GradedSpace::digit_parity");
    return factors_[p].parity(static_cast<int>(index / stride_[p] % factors_[p].dim()) + 1);
}

GradedSpace GradedSpace::concat(const GradedSpace& other) const {
    std::vector<Grading> f = factors_;
    f.insert(f.end(), other.factors_.begin(), other.factors_.end());
    return GradedSpace(std::move(f));
}

bool GradedSpace::operator==(const GradedSpace& o) const {
    return factors_ == o.factors_;
}

GradedVector::GradedVector(GradedSpace space, VectorSide side, Backend backend)
    : space_(std::move(space)), side_(side), backend_(backend),
      entries_(space_.dim(), Scalar::zero(backend)) {}

GradedVector::GradedVector(GradedSpace space, VectorSide side, std::vector<Scalar> entries)
    : space_(std::move(space)), side_(side), entries_(std::move(entries)) {
    if (entries_.size() != space_.dim())
        throw DimensionMismatch("GradedVector: entry count != space dim");
    backend_ = entries_.empty() ? Backend::Exact : entries_[0].backend();
    for (const Scalar& e : entries_)
        if (e.backend() != backend_) throw BackendMismatch("GradedVector entries");
}

GradedVector& GradedVector::operator+=(const GradedVector& o) {
    if (!(space_ == o.space_) || side_ != o.side_)
        throw DimensionMismatch("GradedVector +");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
}

GradedVector& GradedVector::operator-=(const GradedVector& o) {
    if (!(space_ == o.space_) || side_ != o.side_)
        throw DimensionMismatch("GradedVector -");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
}

GradedVector& GradedVector::operator*=(const Scalar& s) {
    for (Scalar& e : entries_) e *= s;
    return *this;
}

bool GradedVector::is_zero() const {
    for (const Scalar& e : entries_)
        if (!e.is_zero()) return false;
    return true;
}

double GradedVector::norm() const {
    double acc = 0.0;
    for (const Scalar& e : entries_) acc += e.abs() * e.abs();
    return std::sqrt(acc);
}

bool GradedVector::operator==(const GradedVector& o) const {
    return space_ == o.space_ && side_ == o.side_ && entries_ == o.entries_;
}

GradedVector basis_vector(const GradedSpace& space, const std::vector<int>& digits,
                          Backend backend, VectorSide side) {
    GradedVector v(space, side, backend);
    v[space.index(digits)] = Scalar::one(backend);
    return v;
}

GradedMatrix::GradedMatrix(GradedSpace space, Backend backend)
    : space_(std::move(space)), dim_(space_.dim()), backend_(backend),
      entries_(dim_ * dim_, Scalar::zero(backend)) {}

GradedMatrix GradedMatrix::identity(const GradedSpace& space, Backend backend) {
    GradedMatrix m(space, backend);
    for (std::size_t i = 0; i < m.dim_; ++i) m.at(i, i) = Scalar::one(backend);
    return m;
}

GradedMatrix& GradedMatrix::operator+=(const GradedMatrix& o) {
    if (!(space_ == o.space_)) throw DimensionMismatch("GradedMatrix +");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
}

GradedMatrix& GradedMatrix::operator-=(const GradedMatrix& o) {
    if (!(space_ == o.space_)) throw DimensionMismatch("GradedMatrix -");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
}

GradedMatrix& GradedMatrix::operator*=(const Scalar& s) {
    for (Scalar& e : entries_) e *= s;
    return *this;
}

GradedMatrix GradedMatrix::operator*(const GradedMatrix& o) const {
    if (!(space_ == o.space_)) throw DimensionMismatch("GradedMatrix *");
    GradedMatrix out(space_, backend_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t k = 0; k < dim_; ++k) {
            const Scalar& a = at(r, k);
            if (a.is_zero()) continue;
            for (std::size_t c = 0; c < dim_; ++c) {
                const Scalar& b = o.at(k, c);
                if (!b.is_zero()) out.at(r, c) += a * b;
            }
        }
    return out;
}

GradedVector GradedMatrix::apply(const GradedVector& v) const {
    if (!(v.space() == space_) || v.side() != VectorSide::Column)
        throw DimensionMismatch("GradedMatrix::apply");
    GradedVector out(space_, VectorSide::Column, backend_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) {
            const Scalar& a = at(r, c);
            if (!a.is_zero() && !v[c].is_zero()) out[r] += a * v[c];
        }
    return out;
}

GradedVector GradedMatrix::apply_left(const GradedVector& r) const {
    if (!(r.space() == space_) || r.side() != VectorSide::Row)
        throw DimensionMismatch("GradedMatrix::apply_left");
    GradedVector out(space_, VectorSide::Row, backend_);
    for (std::size_t row = 0; row < dim_; ++row) {
        if (r[row].is_zero()) continue;
        for (std::size_t c = 0; c < dim_; ++c) {
            const Scalar& a = at(row, c);
            if (!a.is_zero()) out[c] += r[row] * a;
        }
    }
    return out;
}

bool GradedMatrix::is_zero() const {
    for (const Scalar& e : entries_)
        if (!e.is_zero()) return false;
    return true;
}

double GradedMatrix::max_abs() const {
    double m = 0.0;
    for (const Scalar& e : entries_) m = std::max(m, e.abs());
    return m;
}

bool GradedMatrix::operator==(const GradedMatrix& o) const {
    return space_ == o.space_ && entries_ == o.entries_;
}

GradedMatrix elementary(const GradedSpace& space, std::size_t p, int i, int j,
                        Backend backend) {
    if (p >= space.factor_count()) throw IndexOutOfRange("elementary factor");
    const Grading& g = space.factor(p);
    if (i < 1 || i > g.dim() || j < 1 || j > g.dim())
        throw IndexOutOfRange("elementary indices");
    GradedMatrix out(space, backend);
    int op_par = g.parity(i) + g.parity(j);
    for (std::size_t col = 0; col < space.dim(); ++col) {
        std::vector<int> d = space.digits(col);
        if (d[p] != j) continue;
        // Koszul sign: (-1)^{([i]+[j]) * sum of parities left of p}
        long crossed = 0;
        for (std::size_t q = 0; q < p; ++q)
            crossed += space.factor(q).parity(d[q]);
        d[p] = i;
        std::size_t row = space.index(d);
        out.at(row, col) = apply_sign(Scalar::one(backend),
                                      parity_sign(static_cast<long>(op_par) * crossed));
    }
    return out;
}

GradedMatrix graded_kron(const GradedMatrix& a, const GradedMatrix& b) {
    if (a.backend() != b.backend()) throw BackendMismatch("graded_kron");
    GradedSpace sp = a.space().concat(b.space());
    GradedMatrix out(sp, a.backend());
    std::size_t db = b.dim();
    for (std::size_t ar = 0; ar < a.dim(); ++ar)
        for (std::size_t ac = 0; ac < a.dim(); ++ac) {
            const Scalar& ae = a.at(ar, ac);
            if (ae.is_zero()) continue;
            int col_par_a = a.space().parity(ac);
            for (std::size_t br = 0; br < b.dim(); ++br)
                for (std::size_t bc = 0; bc < b.dim(); ++bc) {
                    const Scalar& be = b.at(br, bc);
                    if (be.is_zero()) continue;
                    // entrywise decomposition of b into homogeneous pieces:
                    // the (br,bc) piece has parity [br]+[bc]
                    int sgn = parity_sign(
                        static_cast<long>(b.space().parity(br) + b.space().parity(bc)) *
                        col_par_a);
                    out.at(ar * db + br, ac * db + bc) = apply_sign(ae * be, sgn);
                }
        }
    return out;
}

GradedMatrix supertrace(const GradedMatrix& a, const std::vector<std::size_t>& over) {
    const GradedSpace& sp = a.space();
    std::vector<bool> traced(sp.factor_count(), false);
    for (std::size_t p : over) {
        if (p >= sp.factor_count()) throw IndexOutOfRange("supertrace factor");
        if (traced[p]) throw std::invalid_argument("supertrace: repeated factor");
        traced[p] = true;
    }
    std::vector<std::size_t> kept;
    std::vector<Grading> kept_factors;
    for (std::size_t p = 0; p < sp.factor_count(); ++p)
        if (!traced[p]) {
            kept.push_back(p);
            kept_factors.push_back(sp.factor(p));
        }
    GradedSpace out_sp(kept_factors);
    GradedMatrix out(out_sp, a.backend());

    // enumerate full-space column indices; group by (traced digits, kept digits)
    for (std::size_t col = 0; col < sp.dim(); ++col) {
        std::vector<int> cd = sp.digits(col);
        std::vector<int> kept_c(kept.size());
        for (std::size_t q = 0; q < kept.size(); ++q) kept_c[q] = cd[kept[q]];
        std::size_t oc = out_sp.index(kept_c);
        for (std::size_t or_ = 0; or_ < out_sp.dim(); ++or_) {
            std::vector<int> kept_r = out_sp.digits(or_);
            std::vector<int> rd = cd;
            for (std::size_t q = 0; q < kept.size(); ++q) rd[kept[q]] = kept_r[q];
            std::size_t row = sp.index(rd);
            const Scalar& e = a.at(row, col);
            if (e.is_zero()) continue;
            // str sign (-1)^{[k_p]} per traced factor, plus the compensator
            // (-1)^{[k_p] * sum over kept q>p of ([r_q]+[c_q])} that undoes the
            // Koszul signs picked up by moving the traced legs past the kept ones.
            long expo = 0;
            for (std::size_t p = 0; p < sp.factor_count(); ++p) {
                if (!traced[p]) continue;
                int kp = sp.factor(p).parity(cd[p]);
                long tau = 0;
                for (std::size_t q = p + 1; q < sp.factor_count(); ++q)
                    if (!traced[q])
                        tau += sp.factor(q).parity(rd[q]) + sp.factor(q).parity(cd[q]);
                expo += kp + kp * tau;
            }
            out.at(or_, oc) += apply_sign(e, parity_sign(expo));
        }
    }
    return out;
}

Scalar supertrace_full(const GradedMatrix& a) {
    Scalar acc = Scalar::zero(a.backend());
    for (std::size_t i = 0; i < a.dim(); ++i)
        acc += apply_sign(a.at(i, i), parity_sign(a.space().parity(i)));
    return acc;
}

GradedMatrix supertranspose(const GradedMatrix& a, int power) {
    GradedMatrix cur = a;
    int k = ((power % 4) + 4) % 4;
    for (int step = 0; step < k; ++step) {
        GradedMatrix next(cur.space(), cur.backend());
        for (std::size_t r = 0; r < cur.dim(); ++r) {
            int pr = cur.space().parity(r);
            for (std::size_t c = 0; c < cur.dim(); ++c) {
                const Scalar& e = cur.at(r, c);
                if (e.is_zero()) continue;
                int pc = cur.space().parity(c);
                // E_rc^t = (-1)^{[c][r]+[c]} E_cr
                next.at(c, r) = apply_sign(e, parity_sign(static_cast<long>(pr) * pc + pc));
            }
        }
        cur = std::move(next);
    }
    return cur;
}

GradedMatrix supertranspose_factor(const GradedMatrix& a, std::size_t p) {
    const GradedSpace& sp = a.space();
    if (p >= sp.factor_count()) throw IndexOutOfRange("supertranspose_factor");
    GradedMatrix out(sp, a.backend());
    for (std::size_t r = 0; r < a.dim(); ++r) {
        std::vector<int> rd = sp.digits(r);
        for (std::size_t c = 0; c < a.dim(); ++c) {
            const Scalar& e = a.at(r, c);
            if (e.is_zero()) continue;
            std::vector<int> cd = sp.digits(c);
            int rp = sp.factor(p).parity(rd[p]);
            int cp = sp.factor(p).parity(cd[p]);
            long sigma = 0;  // parity of the untouched factors to the right of p
            for (std::size_t q = p + 1; q < sp.factor_count(); ++q)
                sigma += sp.factor(q).parity(rd[q]) + sp.factor(q).parity(cd[q]);
            std::vector<int> nr = rd, nc = cd;
            std::swap(nr[p], nc[p]);
            long expo = sigma * (rp + cp) + static_cast<long>(cp) * rp + cp;
            out.at(sp.index(nr), sp.index(nc)) = apply_sign(e, parity_sign(expo));
        }
    }
    return out;
}

GradedMatrix perm_P(const Grading& g, Backend backend) {
    GradedSpace sp(g, 2);
    GradedMatrix out(sp, backend);
    int d = g.dim();
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) {
            std::size_t col = sp.index({i, j});
            std::size_t row = sp.index({j, i});
            out.at(row, col) = apply_sign(
                Scalar::one(backend),
                parity_sign(static_cast<long>(g.parity(i)) * g.parity(j)));
        }
    return out;
}

GradedVector apply_elementary(const GradedSpace& space, std::size_t p, int i, int j,
                              const GradedVector& v) {
    if (p >= space.factor_count()) throw IndexOutOfRange("apply_elementary factor");
    const Grading& g = space.factor(p);
    if (i < 1 || i > g.dim() || j < 1 || j > g.dim())
        throw IndexOutOfRange("apply_elementary indices");
    GradedVector out(space, v.side(), v.backend());
    int op_par = g.parity(i) + g.parity(j);
    bool column = v.side() == VectorSide::Column;
    for (std::size_t idx = 0; idx < space.dim(); ++idx) {
        if (v[idx].is_zero()) continue;
        std::vector<int> d = space.digits(idx);
        // column: E_ij |..j..> -> |..i..>; row: <..i..| E_ij -> <..j..|,
        // with the same crossing sign either way.
        int need = column ? j : i;
        int put = column ? i : j;
        if (d[p] != need) continue;
        long crossed = 0;
        for (std::size_t q = 0; q < p; ++q)
            crossed += space.factor(q).parity(d[q]);
        d[p] = put;
        out[space.index(d)] +=
            apply_sign(v[idx], parity_sign(static_cast<long>(op_par) * crossed));
    }
    return out;
}

GradedVector apply_perm(const GradedSpace& space, std::size_t p, std::size_t q,
                        const GradedVector& v) {
    if (p > q) std::swap(p, q);
    if (q >= space.factor_count() || p == q) throw IndexOutOfRange("apply_perm factors");
    GradedVector out(space, v.side(), v.backend());
    for (std::size_t idx = 0; idx < space.dim(); ++idx) {
        if (v[idx].is_zero()) continue;
        std::vector<int> d = space.digits(idx);
        int alpha = d[p], beta = d[q];
        int pa = space.factor(p).parity(alpha);
        int pb = space.factor(q).parity(beta);
        long sp_sum = 0, sq_sum = 0;
        for (std::size_t r = 0; r < p; ++r) sp_sum += space.factor(r).parity(d[r]);
        for (std::size_t r = 0; r < q; ++r) sq_sum += space.factor(r).parity(d[r]);
        // P = sum_{ij} (-1)^{[j]} E_ij^{(p)} E_ji^{(q)} acting on |..a..b..>
        long expo = pa + static_cast<long>(pa + pb) * (sp_sum + sq_sum);
        std::swap(d[p], d[q]);
        out[space.index(d)] += apply_sign(v[idx], parity_sign(expo));
    }
    return out;
}

GradedVector apply_R(const GradedSpace& space, std::size_t p, std::size_t q,
                     const Scalar& u, const Scalar& v, const Scalar& c,
                     const GradedVector& vec) {
    Scalar d = u - v;
    if (d.is_zero()) throw PoleError("R(u,v) at u = v");
    GradedVector out = apply_perm(space, p, q, vec);
    out *= c / d;
    out += vec;
    return out;
}

GradedVector apply_diagonal(const GradedSpace& space, std::size_t p,
                            const std::vector<Scalar>& d, const GradedVector& v) {
    if (p >= space.factor_count()) throw IndexOutOfRange("apply_diagonal factor");
    if (static_cast<int>(d.size()) != space.factor(p).dim())
        throw DimensionMismatch("apply_diagonal entries");
    GradedVector out(space, v.side(), v.backend());
    for (std::size_t idx = 0; idx < space.dim(); ++idx) {
        if (v[idx].is_zero()) continue;
        int digit = space.digits(idx)[p];
        out[idx] = v[idx] * d[digit - 1];
    }
    return out;
}

}  // namespace sb
