#include <stdexcept>
#include <string>

#include "fibss/exactfield.hpp"
#include "field_ops.hpp"

namespace fibss {

bool is_prime_number(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

FieldSpec FieldSpec::prime(std::uint64_t p) {
    if (p >= (std::uint64_t{1} << 32)) throw std::invalid_argument("prime does not fit in 32 bits: " + std::to_string(p));
    if (!is_prime_number(p)) throw std::invalid_argument("not a prime: " + std::to_string(p));
    return FieldSpec(Kind::Prime, p);
}

FieldSpec FieldSpec::parse(std::string_view name) {
    if (name == "Q") return rationals();
    if (name.size() >= 2 && name[0] == 'F') {
        std::uint64_t p = 0;
        for (char c : name.substr(1)) {
            if (c < '0' || c > '9' || p > (std::uint64_t{1} << 40))
                throw std::invalid_argument("bad field name: " + std::string(name));
            p = p * 10 + static_cast<std::uint64_t>(c - '0');
        }
        return prime(p);
    }
    throw std::invalid_argument("bad field name: " + std::string(name));
}

std::string FieldSpec::name() const {
    return is_prime() ? "F" + std::to_string(p_) : std::string("Q");
}

Scalar::Scalar(FieldSpec field) : field_(field) {
    if (field.is_prime())
        value_ = std::uint64_t{0};
    else
        value_ = mpq_class(0);
}

Scalar Scalar::from_int(FieldSpec field, long long value) {
    Scalar s(field);
    if (field.is_prime())
        s.value_ = detail::PrimeOps{field.characteristic()}.from_int(value);
    else
        s.value_ = mpq_class(static_cast<long>(value));
    return s;
}

Scalar Scalar::from_fraction(FieldSpec field, const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    Scalar s(field);
    if (field.is_prime()) {
        mpz_class p(static_cast<unsigned long>(field.characteristic()));
        mpz_class n = num % p, d = den % p;
        if (n < 0) n += p;
        if (d < 0) d += p;
        if (d == 0) throw std::invalid_argument("denominator divisible by the characteristic");
        detail::PrimeOps ops{field.characteristic()};
        s.value_ = ops.mul(n.get_ui(), ops.inv(d.get_ui()));
    } else {
        mpq_class q(num, den);
        q.canonicalize();
        s.value_ = q;
    }
    return s;
}

namespace {

mpz_class parse_integer(std::string_view text) {
    std::string_view digits = text;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
    if (digits.empty()) throw std::invalid_argument("empty integer");
    for (char c : digits)
        if (c < '0' || c > '9') throw std::invalid_argument("bad scalar: " + std::string(text));
    std::string s(text);
    if (s.front() == '+') s.erase(0, 1);
    return mpz_class(s, 10);
}

} // namespace

Scalar Scalar::parse(FieldSpec field, std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return from_fraction(field, parse_integer(text), mpz_class(1));
    return from_fraction(field, parse_integer(text.substr(0, slash)), parse_integer(text.substr(slash + 1)));
}

bool Scalar::is_zero() const {
    if (field_.is_prime()) return residue() == 0;
    return sgn(rational()) == 0;
}

bool Scalar::is_one() const {
    if (field_.is_prime()) return residue() == 1;
    return rational() == 1;
}

namespace {

void require_same_field(const Scalar& a, const Scalar& b) {
    if (!(a.field() == b.field())) throw DimensionError("scalar field mismatch: " + a.field().name() + " vs " + b.field().name());
}

} // namespace

Scalar Scalar::operator+(const Scalar& rhs) const {
    require_same_field(*this, rhs);
    Scalar out(field_);
    if (field_.is_prime())
        out.value_ = detail::PrimeOps{field_.characteristic()}.add(residue(), rhs.residue());
    else
        out.value_ = mpq_class(rational() + rhs.rational());
    return out;
}

Scalar Scalar::operator-(const Scalar& rhs) const { return *this + (-rhs); }

Scalar Scalar::operator*(const Scalar& rhs) const {
    require_same_field(*this, rhs);
    Scalar out(field_);
    if (field_.is_prime())
        out.value_ = detail::PrimeOps{field_.characteristic()}.mul(residue(), rhs.residue());
    else
        out.value_ = mpq_class(rational() * rhs.rational());
    return out;
}

Scalar Scalar::operator/(const Scalar& rhs) const { return *this * rhs.inverse(); }

Scalar Scalar::operator-() const {
    Scalar out(field_);
    if (field_.is_prime())
        out.value_ = detail::PrimeOps{field_.characteristic()}.neg(residue());
    else
        out.value_ = mpq_class(-rational());
    return out;
}

Scalar Scalar::inverse() const {
    Scalar out(field_);
    if (field_.is_prime())
        out.value_ = detail::PrimeOps{field_.characteristic()}.inv(residue());
    else
        out.value_ = detail::RationalOps{}.inv(rational());
    return out;
}

bool Scalar::operator==(const Scalar& rhs) const {
    if (!(field_ == rhs.field_)) return false;
    if (field_.is_prime()) return residue() == rhs.residue();
    return rational() == rhs.rational();
}

std::string Scalar::to_string() const {
    if (field_.is_prime()) return std::to_string(residue());
    return rational().get_str();
}

} // namespace fibss
