#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sb/scalar.hpp"

using namespace sb;

TEST_CASE("rational construction stays canonical") {
    Scalar a = Scalar::rational(2, 4);
    CHECK(a == Scalar::rational(1, 2));
    CHECK(a.rat().get_den() == 2);
    Scalar b = Scalar::rational(3, -6);
    CHECK(b == Scalar::rational(-1, 2));
    CHECK(b.rat().get_den() == 2);  // positive denominator
    CHECK(b.str() == "-1/2");
}

TEST_CASE("parse_rational") {
    CHECK(Scalar::parse_rational("7") == Scalar(7L));
    CHECK(Scalar::parse_rational("-3/9") == Scalar::rational(-1, 3));
    CHECK_THROWS_AS(Scalar::parse_rational("abc"), std::invalid_argument);
    CHECK_THROWS_AS(Scalar::parse_rational("1/0"), DivisionByZero);
}

TEST_CASE("exact arithmetic") {
    Scalar a = Scalar::rational(1, 3), b = Scalar::rational(1, 6);
    CHECK(a + b == Scalar::rational(1, 2));
    CHECK(a - b == Scalar::rational(1, 6));
    CHECK(a * b == Scalar::rational(1, 18));
    CHECK(a / b == Scalar(2L));
    CHECK(-a == Scalar::rational(-1, 3));
    CHECK(a.inv() == Scalar(3L));
    CHECK_THROWS_AS(a / Scalar::zero(Backend::Exact), DivisionByZero);
    CHECK_THROWS_AS(Scalar::zero(Backend::Exact).inv(), DivisionByZero);
}

TEST_CASE("no silent promotion between backends") {
    Scalar q = Scalar::rational(1, 2);
    Scalar z = Scalar::complex(0.5, 0.0);
    CHECK_THROWS_AS(q + z, BackendMismatch);
    CHECK_THROWS_AS(q * z, BackendMismatch);
    CHECK(q != z);  // different backends compare unequal, never throw
    CHECK_THROWS_AS(q.cplx(), BackendMismatch);
    CHECK_THROWS_AS(z.rat(), BackendMismatch);
}

TEST_CASE("float backend") {
    Scalar z = Scalar::complex(3.0, 4.0);
    CHECK(z.abs() == doctest::Approx(5.0));
    CHECK(z.backend() == Backend::Float);
    Scalar w = z / Scalar::complex(2.0, 0.0);
    CHECK(w.cplx() == std::complex<double>(1.5, 2.0));
    CHECK(Scalar::one(Backend::Float).is_zero() == false);
    CHECK(Scalar::zero(Backend::Float).is_zero());
}

TEST_CASE("parity sign helper") {
    CHECK(parity_sign(0) == 1);
    CHECK(parity_sign(1) == -1);
    CHECK(parity_sign(2) == 1);
    CHECK(parity_sign(-1) == -1);
    CHECK(apply_sign(Scalar(5L), -1) == Scalar(-5L));
    CHECK(apply_sign(Scalar::complex(1.0, 2.0), -1) == Scalar::complex(-1.0, -2.0));
}
