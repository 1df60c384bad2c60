#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sb/graded.hpp"

using namespace sb;

namespace {

const Backend EX = Backend::Exact;

Scalar Q(long n, long d = 1) { return Scalar::rational(n, d); }

Grading g21() { return Grading(2, 1); }
Grading g12() { return Grading(1, 2); }

// random matrix with entries in {-2..2}
GradedMatrix random_matrix(const GradedSpace& sp, std::mt19937& gen) {
    std::uniform_int_distribution<long> d(-2, 2);
    GradedMatrix m(sp, EX);
    for (std::size_t r = 0; r < sp.dim(); ++r)
        for (std::size_t c = 0; c < sp.dim(); ++c) m.at(r, c) = Scalar(d(gen));
    return m;
}

// random matrix of definite parity
GradedMatrix random_homogeneous(const GradedSpace& sp, int par, std::mt19937& gen) {
    std::uniform_int_distribution<long> d(-2, 2);
    GradedMatrix m(sp, EX);
    for (std::size_t r = 0; r < sp.dim(); ++r)
        for (std::size_t c = 0; c < sp.dim(); ++c)
            if ((sp.parity(r) + sp.parity(c)) % 2 == par) m.at(r, c) = Scalar(d(gen));
    return m;
}

}  // namespace

TEST_CASE("grading flavors") {
    Grading d = g21();
    CHECK(d.parity(1) == 0);
    CHECK(d.parity(2) == 0);
    CHECK(d.parity(3) == 1);
    Grading f(2, 1, GradingFlavor::Fermionic);
    CHECK(f.parity(1) == 1);
    CHECK(f.parity(2) == 0);
    Grading c(2, 1, std::vector<int>{0, 1, 0});
    CHECK(c.parity(2) == 1);
    CHECK_THROWS_AS(Grading(2, 1, std::vector<int>{1, 1, 0}), std::invalid_argument);
    CHECK(g12().parity(1) == 0);
    CHECK(g12().parity(2) == 1);
}

TEST_CASE("space indexing round-trips") {
    GradedSpace sp(g21(), 3);
    CHECK(sp.dim() == 27);
    for (std::size_t i = 0; i < sp.dim(); ++i) CHECK(sp.index(sp.digits(i)) == i);
    CHECK(sp.index({1, 1, 1}) == 0);
    CHECK(sp.digits(26) == std::vector<int>{3, 3, 3});
    CHECK(sp.parity(sp.index({3, 1, 3})) == 0);
    CHECK(sp.parity(sp.index({3, 1, 1})) == 1);
}

TEST_CASE("elementary action and product rule") {
    GradedSpace one(g21(), 1);
    // single factor: E_23 e_3 = e_2
    GradedVector e3 = basis_vector(one, {3}, EX);
    GradedVector r = elementary(one, 0, 2, 3, EX).apply(e3);
    CHECK(r == basis_vector(one, {2}, EX));

    GradedSpace two(g21(), 2);
    // (I (x) E_ij)(E_kl (x) I) = (-1)^{([i]+[j])([k]+[l])} E_kl (x) E_ij
    GradedMatrix lhs = elementary(two, 1, 3, 1, EX) * elementary(two, 0, 3, 2, EX);
    GradedMatrix rhs = elementary(two, 0, 3, 2, EX) * elementary(two, 1, 3, 1, EX);
    CHECK(lhs == apply_sign(Scalar::one(EX), -1) * rhs);

    // even factors commute with no sign
    CHECK(elementary(two, 0, 1, 1, EX) * elementary(two, 1, 2, 2, EX) ==
          elementary(two, 1, 2, 2, EX) * elementary(two, 0, 1, 1, EX));

    // same-factor composition: E_ij E_kl = delta_jk E_il, exhaustively
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            for (int k = 1; k <= 3; ++k)
                for (int l = 1; l <= 3; ++l) {
                    GradedMatrix p = elementary(two, 1, i, j, EX) *
                                     elementary(two, 1, k, l, EX);
                    if (j == k)
                        CHECK(p == elementary(two, 1, i, l, EX));
                    else
                        CHECK(p.is_zero());
                }
}

TEST_CASE("graded_kron matches elementary route") {
    GradedSpace one(g21(), 1);
    GradedSpace two(g21(), 2);
    std::mt19937 gen(7);

    // E_32 (x) E_31 via kron == elementary(0,3,2) * elementary(1,3,1)
    GradedMatrix a = elementary(one, 0, 3, 2, EX);
    GradedMatrix b = elementary(one, 0, 3, 1, EX);
    CHECK(graded_kron(a, b) == elementary(two, 0, 3, 2, EX) * elementary(two, 1, 3, 1, EX));

    // I (x) B is a plain block embedding
    GradedMatrix bb = random_matrix(one, gen);
    GradedMatrix emb = graded_kron(GradedMatrix::identity(one, EX), bb);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) CHECK(emb.at(r, c) == bb.at(r, c));

    // (A (x) I)(I (x) B) = (-1)^{[A][B]} (I (x) B)(A (x) I) for odd A, B
    GradedMatrix ao = random_homogeneous(one, 1, gen);
    GradedMatrix bo = random_homogeneous(one, 1, gen);
    GradedMatrix a1 = graded_kron(ao, GradedMatrix::identity(one, EX));
    GradedMatrix b1 = graded_kron(GradedMatrix::identity(one, EX), bo);
    CHECK(a1 * b1 == apply_sign(Scalar::one(EX), -1) * (b1 * a1));

    // odd-odd exchange sign inside a product of krons:
    // (E_32 (x) E_32)(E_23 (x) E_23) = -(E_33 (x) E_33)
    GradedMatrix e23 = elementary(one, 0, 2, 3, EX);
    CHECK(graded_kron(a, a) * graded_kron(e23, e23) ==
          Q(-1) * graded_kron(elementary(one, 0, 3, 3, EX), elementary(one, 0, 3, 3, EX)));
}

TEST_CASE("supertrace basics") {
    GradedSpace one(g21(), 1);
    CHECK(supertrace_full(elementary(one, 0, 1, 1, EX)) == Q(1));
    CHECK(supertrace_full(elementary(one, 0, 3, 3, EX)) == Q(-1));
    CHECK(supertrace_full(GradedMatrix::identity(one, EX)) == Q(1));  // m - n
    GradedSpace one12(g12(), 1);
    CHECK(supertrace_full(GradedMatrix::identity(one12, EX)) == Q(-1));
}

TEST_CASE("supertrace graded cyclicity") {
    GradedSpace one(g21(), 1);
    std::mt19937 gen(11);
    for (int pa = 0; pa <= 1; ++pa)
        for (int pb = 0; pb <= 1; ++pb) {
            GradedMatrix a = random_homogeneous(one, pa, gen);
            GradedMatrix b = random_homogeneous(one, pb, gen);
            CHECK(supertrace_full(a * b) ==
                  apply_sign(supertrace_full(b * a), parity_sign(pa * pb)));
        }
}

TEST_CASE("partial supertrace consistency") {
    // tracing factor by factor agrees with the full supertrace
    GradedSpace two(g21(), 2);
    std::mt19937 gen(13);
    GradedMatrix m = random_matrix(two, gen);
    GradedMatrix t0 = supertrace(m, {0});
    CHECK(t0.space().factor_count() == 1);
    CHECK(supertrace_full(t0) == supertrace_full(m));
    GradedMatrix t1 = supertrace(m, {1});
    CHECK(supertrace_full(t1) == supertrace_full(m));
    CHECK(supertrace_full(supertrace(m, {0, 1})) == supertrace_full(m));

    // partial trace of a kron factorizes: str_1(A (x) B) = A str(B)
    GradedSpace one(g21(), 1);
    GradedMatrix a = random_matrix(one, gen);
    GradedMatrix b = random_matrix(one, gen);
    GradedMatrix k = graded_kron(a, b);
    CHECK(supertrace(k, {1}) == supertrace_full(b) * a);
    CHECK(supertrace(k, {0}) == supertrace_full(a) * b);
}

TEST_CASE("supertransposition") {
    GradedSpace one(g21(), 1);
    GradedMatrix e32 = elementary(one, 0, 3, 2, EX);
    GradedMatrix e23 = elementary(one, 0, 2, 3, EX);
    GradedMatrix e21 = elementary(one, 0, 2, 1, EX);
    GradedMatrix e12 = elementary(one, 0, 1, 2, EX);
    Scalar minus = Q(-1);

    CHECK(supertranspose(e32) == e23);
    CHECK(supertranspose(e32, 2) == minus * e32);
    CHECK(supertranspose(e32, 3) == minus * e23);
    CHECK(supertranspose(e32, 4) == e32);
    CHECK(supertranspose(e21) == e12);  // even sector: plain transpose
    GradedMatrix e21t3 = supertranspose(e21, 3);
    CHECK(e21t3 == e12);

    // order 4 and trace preservation on non-homogeneous matrices
    std::mt19937 gen(17);
    GradedSpace two(g21(), 2);
    GradedMatrix m = random_matrix(two, gen);
    CHECK(supertranspose(m, 4) == m);
    CHECK(supertrace_full(supertranspose(m)) == supertrace_full(m));
    GradedMatrix n = random_matrix(two, gen);
    CHECK(supertrace_full(supertranspose(m) * supertranspose(n)) ==
          supertrace_full(m * n));
}

TEST_CASE("graded permutation") {
    Grading g = g21();
    GradedMatrix p = perm_P(g, EX);
    GradedSpace two(g, 2);
    CHECK(p * p == GradedMatrix::identity(two, EX));
    CHECK(p.apply(basis_vector(two, {3, 3}, EX)) ==
          Q(-1) * basis_vector(two, {3, 3}, EX));
    CHECK(p.apply(basis_vector(two, {1, 2}, EX)) == basis_vector(two, {2, 1}, EX));
    // P = sum (-1)^{[j]} E_ij (x) E_ji
    GradedMatrix built(two, EX);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            built += apply_sign(Scalar::one(EX), parity_sign(g.parity(j))) *
                     (elementary(two, 0, i, j, EX) * elementary(two, 1, j, i, EX));
    CHECK(built == p);
    // invariance under two-factor supertransposition
    CHECK(supertranspose_factor(supertranspose_factor(p, 0), 1) == p);
}

TEST_CASE("gr as conjugation by the sign matrix") {
    GradedSpace one(g21(), 1);
    GradedMatrix omega(one, EX);
    for (int k = 1; k <= 3; ++k)
        omega += apply_sign(Scalar::one(EX), parity_sign(g21().parity(k))) *
                 elementary(one, 0, k, k, EX);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            GradedMatrix e = elementary(one, 0, i, j, EX);
            int s = parity_sign(g21().parity(i) + g21().parity(j));
            CHECK(omega * e * omega == apply_sign(Scalar::one(EX), s) * e);
        }
}

TEST_CASE("sparse applications match dense operators") {
    GradedSpace sp(g21(), 3);
    std::mt19937 gen(23);
    std::uniform_int_distribution<long> d(-3, 3);
    GradedVector v(sp, VectorSide::Column, EX);
    GradedVector w(sp, VectorSide::Row, EX);
    for (std::size_t i = 0; i < sp.dim(); ++i) {
        v[i] = Scalar(d(gen));
        w[i] = Scalar(d(gen));
    }

    for (std::size_t p = 0; p < 3; ++p)
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j) {
                GradedMatrix e = elementary(sp, p, i, j, EX);
                CHECK(apply_elementary(sp, p, i, j, v) == e.apply(v));
                CHECK(apply_elementary(sp, p, i, j, w) == e.apply_left(w));
            }

    // P_{pq} via the elementary sum, against the sparse swap
    for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t q = p + 1; q < 3; ++q) {
            GradedMatrix pm(sp, EX);
            for (int i = 1; i <= 3; ++i)
                for (int j = 1; j <= 3; ++j)
                    pm += apply_sign(Scalar::one(EX), parity_sign(g21().parity(j))) *
                          (elementary(sp, p, i, j, EX) * elementary(sp, q, j, i, EX));
            CHECK(apply_perm(sp, p, q, v) == pm.apply(v));
            CHECK(apply_perm(sp, q, p, v) == pm.apply(v));
            CHECK(apply_perm(sp, p, q, w) == pm.apply_left(w));

            GradedMatrix r = GradedMatrix::identity(sp, EX) + Q(1, 3) * pm;
            CHECK(apply_R(sp, p, q, Q(5), Q(2), Q(1), v) == r.apply(v));
            CHECK(apply_R(sp, p, q, Q(5), Q(2), Q(1), w) == r.apply_left(w));
        }

    std::vector<Scalar> diag{Q(2), Q(3), Q(5)};
    GradedMatrix dm(sp, EX);
    for (int k = 1; k <= 3; ++k) dm += diag[k - 1] * elementary(sp, 1, k, k, EX);
    CHECK(apply_diagonal(sp, 1, diag, v) == dm.apply(v));
}
