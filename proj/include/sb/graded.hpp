#ifndef SB_GRADED_HPP
#define SB_GRADED_HPP

#include <cstddef>
#include <vector>

#include "sb/scalar.hpp"

namespace sb {

struct IndexOutOfRange : std::out_of_range {
    explicit IndexOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

enum class GradingFlavor { Distinguished, Fermionic, Alternating, Custom };

/// Z2-grading of C^{m|n}: a parity assignment on the basis indices
/// 1..m+n with exactly m even and n odd entries.
class Grading {
public:
    Grading(int m, int n, GradingFlavor flavor = GradingFlavor::Distinguished);
    Grading(int m, int n, std::vector<int> parities);  // Custom

    int m() const { return m_; }
    int n() const { return n_; }
    int dim() const { return m_ + n_; }
    GradingFlavor flavor() const { return flavor_; }
    /// Parity of basis index i (1-based).
    int parity(int i) const;

    bool operator==(const Grading& o) const {
        return m_ == o.m_ && n_ == o.n_ && parity_ == o.parity_;
    }

private:
    int m_, n_;
    GradingFlavor flavor_;
    std::vector<int> parity_;  // 0-based storage
};

/// Ordered tensor product of graded factors. Basis indices are
/// mixed-radix with factor 0 most significant.
class GradedSpace {
public:
    GradedSpace() = default;
    explicit GradedSpace(std::vector<Grading> factors);
    /// n copies of one grading.
    GradedSpace(const Grading& g, std::size_t copies);

    std::size_t factor_count() const { return factors_.size(); }
    const Grading& factor(std::size_t p) const { return factors_[p]; }
    std::size_t dim() const { return dim_; }

    /// Digits of a basis index, one 1-based entry per factor.
    std::vector<int> digits(std::size_t index) const;
    std::size_t index(const std::vector<int>& digits) const;
    /// Total parity of a basis index.
    int parity(std::size_t index) const;
    /// Parity of the digit at factor p.
    int digit_parity(std::size_t index, std::size_t p) const;

    GradedSpace concat(const GradedSpace& other) const;
    bool operator==(const GradedSpace& o) const;

private:
    std::vector<Grading> factors_;
    std::size_t dim_ = 1;
    std::vector<std::size_t> stride_;
};

enum class VectorSide { Column, Row };

/// Dense vector (or covector) over a graded space.
class GradedVector {
public:
    GradedVector() = default;
    GradedVector(GradedSpace space, VectorSide side, Backend backend);
    GradedVector(GradedSpace space, VectorSide side, std::vector<Scalar> entries);

    const GradedSpace& space() const { return space_; }
    VectorSide side() const { return side_; }
    std::size_t dim() const { return entries_.size(); }
    Backend backend() const { return backend_; }
    Scalar& operator[](std::size_t i) { return entries_[i]; }
    const Scalar& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<Scalar>& entries() const { return entries_; }

    GradedVector& operator+=(const GradedVector& o);
    GradedVector& operator-=(const GradedVector& o);
    GradedVector& operator*=(const Scalar& s);
    friend GradedVector operator+(GradedVector a, const GradedVector& b) { return a += b; }
    friend GradedVector operator-(GradedVector a, const GradedVector& b) { return a -= b; }
    friend GradedVector operator*(const Scalar& s, GradedVector v) { return v *= s; }

    bool is_zero() const;
    double norm() const;  // Euclidean, via double
    bool operator==(const GradedVector& o) const;

private:
    GradedSpace space_;
    VectorSide side_ = VectorSide::Column;
    Backend backend_ = Backend::Exact;
    std::vector<Scalar> entries_;
};

/// Basis vector e_{digits} (all-ones digits give the highest weight slot).
GradedVector basis_vector(const GradedSpace& space, const std::vector<int>& digits,
                          Backend backend, VectorSide side = VectorSide::Column);

/// Dense square matrix over a graded space. Plain multiplication: all
/// Koszul signs are applied at embedding/kron time, never here.
class GradedMatrix {
public:
    GradedMatrix() = default;
    GradedMatrix(GradedSpace space, Backend backend);  // zero matrix

    static GradedMatrix identity(const GradedSpace& space, Backend backend);

    const GradedSpace& space() const { return space_; }
    std::size_t dim() const { return dim_; }
    Backend backend() const { return backend_; }

    Scalar& at(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
    const Scalar& at(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }

    GradedMatrix& operator+=(const GradedMatrix& o);
    GradedMatrix& operator-=(const GradedMatrix& o);
    GradedMatrix& operator*=(const Scalar& s);
    friend GradedMatrix operator+(GradedMatrix a, const GradedMatrix& b) { return a += b; }
    friend GradedMatrix operator-(GradedMatrix a, const GradedMatrix& b) { return a -= b; }
    friend GradedMatrix operator*(const Scalar& s, GradedMatrix m) { return m *= s; }
    GradedMatrix operator*(const GradedMatrix& o) const;

    GradedVector apply(const GradedVector& v) const;       // column action
    GradedVector apply_left(const GradedVector& r) const;  // row action r * M

    bool is_zero() const;
    double max_abs() const;
    bool operator==(const GradedMatrix& o) const;

private:
    GradedSpace space_;
    std::size_t dim_ = 0;
    Backend backend_ = Backend::Exact;
    std::vector<Scalar> entries_;
};

/// E_ij acting on factor p (0-based) with the Koszul sign of the graded
/// tensor product built in, so that for p < q
///   elementary(p,i,j) * elementary(q,k,l) = graded embedding of E_ij (x) E_kl.
GradedMatrix elementary(const GradedSpace& space, std::size_t p, int i, int j,
                        Backend backend);

/// Graded Kronecker product on the concatenated space.
GradedMatrix graded_kron(const GradedMatrix& a, const GradedMatrix& b);

/// Partial supertrace over the given factors; tracing all factors gives
/// a 1x1 result (use supertrace_full for the Scalar).
GradedMatrix supertrace(const GradedMatrix& a, const std::vector<std::size_t>& over);
Scalar supertrace_full(const GradedMatrix& a);

/// k-fold supertransposition of the whole space (composite index rule
/// E_IJ^t = (-1)^{[J][I]+[J]} E_JI); order 4.
GradedMatrix supertranspose(const GradedMatrix& a, int power = 1);
/// Supertransposition of a single factor.
GradedMatrix supertranspose_factor(const GradedMatrix& a, std::size_t p);

/// Graded permutation P = sum (-1)^{[j]} E_ij (x) E_ji on a two-factor space.
GradedMatrix perm_P(const Grading& g, Backend backend);

// ---- Sparse state-level applications (O(dim) per call) -------------------

/// out = E_ij^{(p)} v  (column side) or v E_ij^{(p)} (row side).
GradedVector apply_elementary(const GradedSpace& space, std::size_t p, int i, int j,
                              const GradedVector& v);
/// out = P_{pq} v or v P_{pq}; P is symmetric in (p,q).
GradedVector apply_perm(const GradedSpace& space, std::size_t p, std::size_t q,
                        const GradedVector& v);
/// out = (I + g(u,v) P_{pq}) v, either side.
GradedVector apply_R(const GradedSpace& space, std::size_t p, std::size_t q,
                     const Scalar& u, const Scalar& v, const Scalar& c,
                     const GradedVector& vec);
/// Diagonal one-factor operator diag(d_1..d_{m+n}) on factor p.
GradedVector apply_diagonal(const GradedSpace& space, std::size_t p,
                            const std::vector<Scalar>& d, const GradedVector& v);

}  // namespace sb

#endif
