#include "sb/scalar.hpp"

#include <cmath>
#include <sstream>

namespace sb {

Scalar Scalar::rational(long num, long den) {
    if (den == 0) throw DivisionByZero("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return Scalar(q);
}

Scalar Scalar::parse_rational(const std::string& text) {
    Rational q;
    if (q.set_str(text, 10) != 0)
        throw std::invalid_argument("cannot parse rational: '" + text + "'");
    if (q.get_den() == 0) throw DivisionByZero("parsed rational with zero denominator");
    q.canonicalize();
    return Scalar(q);
}

Scalar Scalar::zero(Backend b) {
    return b == Backend::Exact ? Scalar(0L) : Scalar(Complex(0.0, 0.0));
}

Scalar Scalar::one(Backend b) {
    return b == Backend::Exact ? Scalar(1L) : Scalar(Complex(1.0, 0.0));
}

const Scalar::Rational& Scalar::rat() const {
    if (!is_exact()) throw BackendMismatch("rat() on float scalar");
    return std::get<Rational>(value_);
}

const Scalar::Complex& Scalar::cplx() const {
    if (is_exact()) throw BackendMismatch("cplx() on exact scalar");
    return std::get<Complex>(value_);
}

bool Scalar::is_zero() const {
    if (is_exact()) return std::get<Rational>(value_) == 0;
    return std::get<Complex>(value_) == Complex(0.0, 0.0);
}

double Scalar::abs() const {
    if (is_exact()) return std::fabs(std::get<Rational>(value_).get_d());
    return std::abs(std::get<Complex>(value_));
}

void Scalar::canon() {
    if (is_exact()) std::get<Rational>(value_).canonicalize();
}

void Scalar::check_same(const Scalar& o, const char* op) const {
    if (backend() != o.backend()) throw BackendMismatch(op);
}

Scalar Scalar::operator-() const {
    if (is_exact()) return Scalar(Rational(-std::get<Rational>(value_)));
    return Scalar(-std::get<Complex>(value_));
}

Scalar& Scalar::operator+=(const Scalar& o) {
    check_same(o, "+");
    if (is_exact())
        std::get<Rational>(value_) += std::get<Rational>(o.value_);
    else
        std::get<Complex>(value_) += std::get<Complex>(o.value_);
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    check_same(o, "-");
    if (is_exact())
        std::get<Rational>(value_) -= std::get<Rational>(o.value_);
    else
        std::get<Complex>(value_) -= std::get<Complex>(o.value_);
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    check_same(o, "*");
    if (is_exact())
        std::get<Rational>(value_) *= std::get<Rational>(o.value_);
    else
        std::get<Complex>(value_) *= std::get<Complex>(o.value_);
    return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
    check_same(o, "/");
    if (is_exact()) {
        if (o.is_zero()) throw DivisionByZero("exact division by zero");
        std::get<Rational>(value_) /= std::get<Rational>(o.value_);
    } else {
        std::get<Complex>(value_) /= std::get<Complex>(o.value_);
    }
    return *this;
}

bool Scalar::operator==(const Scalar& o) const {
    if (backend() != o.backend()) return false;
    if (is_exact()) return std::get<Rational>(value_) == std::get<Rational>(o.value_);
    return std::get<Complex>(value_) == std::get<Complex>(o.value_);
}

Scalar Scalar::inv() const {
    return Scalar::one(backend()) / *this;
}

std::string Scalar::str() const {
    if (is_exact()) return std::get<Rational>(value_).get_str();
    std::ostringstream os;
    const Complex& z = std::get<Complex>(value_);
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

}  // namespace sb
