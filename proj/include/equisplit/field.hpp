#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace equisplit {

/// Coefficient field: the rationals or a prime field F_l.
class FieldSpec {
public:
    FieldSpec() = default;

    static FieldSpec rationals() { return FieldSpec(); }
    /// Throws Error when `ell` is not prime or does not fit in 31 bits.
    static FieldSpec prime(std::uint32_t ell);
    /// Accepts "Q" or "F<prime>", e.g. "F7".
    static FieldSpec parse(std::string_view tag);

    bool is_rational() const { return ell_ == 0; }
    /// 0 for the rationals.
    std::uint32_t characteristic() const { return ell_; }
    std::string tag() const;

    /// True when the integer n is zero in this field.
    bool kills(std::size_t n) const { return ell_ != 0 && n % ell_ == 0; }

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

private:
    explicit FieldSpec(std::uint32_t ell) : ell_(ell) {}
    std::uint32_t ell_ = 0;
};

bool is_prime(std::uint64_t n);

/// A single exact field element. Used at API boundaries; the matrix kernels
/// work on raw storage.
class Scalar {
public:
    explicit Scalar(FieldSpec field = {});
    Scalar(FieldSpec field, long num, long den = 1);
    Scalar(FieldSpec field, const mpq_class& value);

    static Scalar parse(FieldSpec field, std::string_view text);

    const FieldSpec& field() const { return field_; }
    bool is_zero() const;
    bool is_one() const;

    /// Only meaningful over the rationals.
    const mpq_class& rational() const { return q_; }
    /// Only meaningful over a prime field.
    std::uint32_t residue() const { return r_; }

    /// "p/q" or "p" over Q, the residue in [0, l) over F_l.
    std::string to_string() const;

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;
    Scalar operator-() const;
    Scalar inverse() const;

    friend bool operator==(const Scalar& a, const Scalar& b);

private:
    void check_same(const Scalar& o) const;

    FieldSpec field_;
    mpq_class q_;
    std::uint32_t r_ = 0;
};

}  // namespace equisplit
