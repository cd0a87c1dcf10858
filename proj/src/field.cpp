#include "equisplit/field.hpp"

#include <charconv>

#include "equisplit/errors.hpp"

namespace equisplit {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

FieldSpec FieldSpec::prime(std::uint32_t ell) {
    if (ell >= (1u << 31) || !is_prime(ell))
        throw Error("field characteristic must be a prime below 2^31, got " +
                    std::to_string(ell));
    return FieldSpec(ell);
}

FieldSpec FieldSpec::parse(std::string_view tag) {
    if (tag == "Q") return rationals();
    if (tag.size() >= 2 && tag[0] == 'F') {
        std::uint32_t ell = 0;
        auto [ptr, ec] = std::from_chars(tag.data() + 1, tag.data() + tag.size(), ell);
        if (ec == std::errc() && ptr == tag.data() + tag.size()) return prime(ell);
    }
    throw ParseError("unknown field tag '" + std::string(tag) + "'");
}

std::string FieldSpec::tag() const {
    return is_rational() ? std::string("Q") : "F" + std::to_string(ell_);
}

namespace {

std::uint32_t reduce(long v, std::uint32_t p) {
    long r = v % static_cast<long>(p);
    if (r < 0) r += p;
    return static_cast<std::uint32_t>(r);
}

std::uint32_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint32_t p) {
    std::uint64_t r = 1;
    b %= p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return static_cast<std::uint32_t>(r);
}

}  // namespace

Scalar::Scalar(FieldSpec field) : field_(field), q_(0) {}

Scalar::Scalar(FieldSpec field, long num, long den) : field_(field) {
    if (den == 0) throw Error("zero denominator");
    if (field_.is_rational()) {
        q_ = mpq_class(num, 1) / mpq_class(den, 1);
        q_.canonicalize();
    } else {
        std::uint32_t p = field_.characteristic();
        std::uint32_t d = reduce(den, p);
        if (d == 0) throw Error("denominator vanishes in " + field_.tag());
        r_ = static_cast<std::uint32_t>(
            static_cast<std::uint64_t>(reduce(num, p)) * mod_pow(d, p - 2, p) % p);
    }
}

Scalar::Scalar(FieldSpec field, const mpq_class& value) : field_(field) {
    if (field_.is_rational()) {
        q_ = value;
        q_.canonicalize();
    } else {
        std::uint32_t p = field_.characteristic();
        mpz_class n = value.get_num() % p;
        mpz_class d = value.get_den() % p;
        if (n < 0) n += p;
        if (d == 0) throw Error("denominator vanishes in " + field_.tag());
        r_ = static_cast<std::uint32_t>(n.get_ui() *
                                        static_cast<std::uint64_t>(mod_pow(d.get_ui(), p - 2, p)) % p);
    }
}

Scalar Scalar::parse(FieldSpec field, std::string_view text) {
    mpq_class q;
    if (text.empty() || q.set_str(std::string(text), 10) != 0)
        throw ParseError("malformed scalar '" + std::string(text) + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    if (field.is_rational()) {
        mpq_class c = q;
        c.canonicalize();
        // Bit-exact round trip: only lowest-terms input is accepted.
        if (c.get_num() != q.get_num() || c.get_den() != q.get_den())
            throw ParseError("rational '" + std::string(text) + "' is not in lowest terms");
        return Scalar(field, c);
    }
    if (q.get_den() != 1 || q.get_num() < 0 || q.get_num() >= field.characteristic())
        throw ParseError("residue '" + std::string(text) + "' out of range for " + field.tag());
    Scalar s(field);
    s.r_ = static_cast<std::uint32_t>(q.get_num().get_ui());
    return s;
}

bool Scalar::is_zero() const { return field_.is_rational() ? q_ == 0 : r_ == 0; }
bool Scalar::is_one() const { return field_.is_rational() ? q_ == 1 : r_ == 1; }

std::string Scalar::to_string() const {
    return field_.is_rational() ? q_.get_str() : std::to_string(r_);
}

void Scalar::check_same(const Scalar& o) const {
    if (!(field_ == o.field_))
        throw FieldMismatch("scalars over " + field_.tag() + " and " + o.field_.tag());
}

Scalar Scalar::operator+(const Scalar& o) const {
    check_same(o);
    Scalar s(field_);
    if (field_.is_rational()) s.q_ = q_ + o.q_;
    else s.r_ = static_cast<std::uint32_t>((static_cast<std::uint64_t>(r_) + o.r_) % field_.characteristic());
    return s;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
    check_same(o);
    Scalar s(field_);
    if (field_.is_rational()) s.q_ = q_ * o.q_;
    else s.r_ = static_cast<std::uint32_t>(static_cast<std::uint64_t>(r_) * o.r_ % field_.characteristic());
    return s;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::operator-() const {
    Scalar s(field_);
    if (field_.is_rational()) s.q_ = -q_;
    else s.r_ = r_ == 0 ? 0 : field_.characteristic() - r_;
    return s;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw Error("division by zero");
    Scalar s(field_);
    if (field_.is_rational()) s.q_ = 1 / q_;
    else s.r_ = mod_pow(r_, field_.characteristic() - 2, field_.characteristic());
    return s;
}

bool operator==(const Scalar& a, const Scalar& b) {
    if (!(a.field_ == b.field_)) return false;
    return a.field_.is_rational() ? a.q_ == b.q_ : a.r_ == b.r_;
}

}  // namespace equisplit
