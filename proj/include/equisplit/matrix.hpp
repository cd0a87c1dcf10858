#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "equisplit/field.hpp"

namespace equisplit {

/// Dense row-major matrix over an exact field. Rational entries are kept in
/// lowest terms with positive denominator; prime-field entries are residues.
class Matrix {
public:
    Matrix() = default;
    Matrix(FieldSpec field, std::size_t rows, std::size_t cols);

    static Matrix identity(FieldSpec field, std::size_t n);
    /// Row-major integer entries, reduced into the field.
    static Matrix from_ints(FieldSpec field, std::size_t rows, std::size_t cols,
                            std::initializer_list<long> entries);
    static Matrix from_ints(FieldSpec field, std::size_t rows, std::size_t cols,
                            std::span<const long> entries);
    static Matrix diagonal(FieldSpec field, std::initializer_list<long> entries);
    static Matrix permutation(FieldSpec field, std::span<const std::size_t> image);

    const FieldSpec& field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Scalar at(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, const Scalar& value);
    void set(std::size_t r, std::size_t c, long num, long den = 1);
    bool is_zero_at(std::size_t r, std::size_t c) const;

    bool is_zero() const;
    bool is_identity() const;

    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix operator*(const Matrix& o) const;
    Matrix operator-() const;
    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix scaled(const Scalar& s) const;

    Matrix transpose() const;
    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const Matrix& m);
    /// this[r0.., c0..] += sign * m
    void add_block(std::size_t r0, std::size_t c0, const Matrix& m, int sign = 1);
    Matrix select_rows(std::span<const std::size_t> idx) const;
    Matrix select_cols(std::span<const std::size_t> idx) const;
    Matrix column(std::size_t c) const { return block(0, c, rows_, 1); }
    Matrix row(std::size_t r) const { return block(r, 0, 1, cols_); }

    static Matrix hstack(std::span<const Matrix> parts);
    static Matrix vstack(std::span<const Matrix> parts);

    std::size_t rank() const;
    /// Throws NotSquare or Singular.
    Matrix inverse() const;

    friend bool operator==(const Matrix& a, const Matrix& b);
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    // Raw storage; exactly one of the two is populated.
    const std::vector<mpq_class>& rational_entries() const { return q_; }
    const std::vector<std::uint32_t>& residue_entries() const { return r_; }
    std::vector<mpq_class>& rational_entries() { return q_; }
    std::vector<std::uint32_t>& residue_entries() { return r_; }

private:
    void check_compatible(const Matrix& o, const char* what) const;

    FieldSpec field_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<mpq_class> q_;
    std::vector<std::uint32_t> r_;
};

struct EchelonForm {
    Matrix reduced;
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Reduced row-echelon form together with its pivot columns. Zero rows are
/// kept at the bottom so the shape matches the input.
EchelonForm echelon(const Matrix& m);
Matrix rref(const Matrix& m);

/// Throws NotSquare.
bool is_idempotent(const Matrix& m);

}  // namespace equisplit
