#include "equisplit/matrix.hpp"

#include <algorithm>
#include <utility>

#include "equisplit/errors.hpp"

namespace equisplit {

namespace {

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
    std::uint64_t r = 1, b = a, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return static_cast<std::uint32_t>(r);
}

// Gauss-Jordan over Q in place. Returns pivot columns.
std::vector<std::size_t> rref_rational(std::vector<mpq_class>& a, std::size_t rows,
                                       std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    mpq_class factor, tmp;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (sgn(a[i * cols + c]) != 0) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        if (piv != r)
            for (std::size_t j = c; j < cols; ++j) swap(a[piv * cols + j], a[r * cols + j]);
        if (a[r * cols + c] != 1) {
            factor = 1 / a[r * cols + c];
            for (std::size_t j = c; j < cols; ++j)
                if (sgn(a[r * cols + j]) != 0) a[r * cols + j] *= factor;
        }
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || sgn(a[i * cols + c]) == 0) continue;
            factor = a[i * cols + c];
            for (std::size_t j = c; j < cols; ++j) {
                const mpq_class& src = a[r * cols + j];
                if (sgn(src) == 0) continue;
                mpq_mul(tmp.get_mpq_t(), factor.get_mpq_t(), src.get_mpq_t());
                mpq_sub(a[i * cols + j].get_mpq_t(), a[i * cols + j].get_mpq_t(), tmp.get_mpq_t());
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

std::vector<std::size_t> rref_modular(std::vector<std::uint32_t>& a, std::size_t rows,
                                      std::size_t cols, std::uint32_t p) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (a[i * cols + c] != 0) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        if (piv != r)
            for (std::size_t j = c; j < cols; ++j) std::swap(a[piv * cols + j], a[r * cols + j]);
        std::uint64_t inv = inv_mod(a[r * cols + c], p);
        for (std::size_t j = c; j < cols; ++j)
            a[r * cols + j] = static_cast<std::uint32_t>(a[r * cols + j] * inv % p);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i * cols + c] == 0) continue;
            std::uint64_t f = p - a[i * cols + c];
            for (std::size_t j = c; j < cols; ++j) {
                std::uint32_t src = a[r * cols + j];
                if (src == 0) continue;
                a[i * cols + j] = static_cast<std::uint32_t>((a[i * cols + j] + f * src) % p);
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

Matrix::Matrix(FieldSpec field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols) {
    if (field_.is_rational()) q_.resize(rows * cols);
    else r_.assign(rows * cols, 0);
}

Matrix Matrix::identity(FieldSpec field, std::size_t n) {
    Matrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

Matrix Matrix::from_ints(FieldSpec field, std::size_t rows, std::size_t cols,
                         std::initializer_list<long> entries) {
    return from_ints(field, rows, cols, std::span<const long>(entries.begin(), entries.size()));
}

Matrix Matrix::from_ints(FieldSpec field, std::size_t rows, std::size_t cols,
                         std::span<const long> entries) {
    if (entries.size() != rows * cols)
        throw DimensionMismatch("entry count does not match shape");
    Matrix m(field, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m.set(i, j, entries[i * cols + j]);
    return m;
}

Matrix Matrix::diagonal(FieldSpec field, std::initializer_list<long> entries) {
    Matrix m(field, entries.size(), entries.size());
    std::size_t i = 0;
    for (long v : entries) {
        m.set(i, i, v);
        ++i;
    }
    return m;
}

Matrix Matrix::permutation(FieldSpec field, std::span<const std::size_t> image) {
    Matrix m(field, image.size(), image.size());
    for (std::size_t j = 0; j < image.size(); ++j) m.set(image[j], j, 1);
    return m;
}

Scalar Matrix::at(std::size_t r, std::size_t c) const {
    if (field_.is_rational()) return Scalar(field_, q_[r * cols_ + c]);
    return Scalar(field_, static_cast<long>(r_[r * cols_ + c]));
}

void Matrix::set(std::size_t r, std::size_t c, const Scalar& value) {
    if (!(value.field() == field_)) throw FieldMismatch("scalar field differs from matrix field");
    if (field_.is_rational()) q_[r * cols_ + c] = value.rational();
    else r_[r * cols_ + c] = value.residue();
}

void Matrix::set(std::size_t r, std::size_t c, long num, long den) {
    set(r, c, Scalar(field_, num, den));
}

bool Matrix::is_zero_at(std::size_t r, std::size_t c) const {
    return field_.is_rational() ? sgn(q_[r * cols_ + c]) == 0 : r_[r * cols_ + c] == 0;
}

bool Matrix::is_zero() const {
    if (field_.is_rational())
        return std::all_of(q_.begin(), q_.end(), [](const mpq_class& x) { return sgn(x) == 0; });
    return std::all_of(r_.begin(), r_.end(), [](std::uint32_t x) { return x == 0; });
}

bool Matrix::is_identity() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            if (i == j) {
                if (field_.is_rational() ? q_[i * cols_ + j] != 1 : r_[i * cols_ + j] != 1)
                    return false;
            } else if (!is_zero_at(i, j)) {
                return false;
            }
        }
    return true;
}

void Matrix::check_compatible(const Matrix& o, const char* what) const {
    if (!(field_ == o.field_))
        throw FieldMismatch(std::string(what) + ": fields " + field_.tag() + " and " + o.field_.tag());
}

Matrix& Matrix::operator+=(const Matrix& o) {
    check_compatible(o, "add");
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("add: shapes differ");
    if (field_.is_rational()) {
        for (std::size_t i = 0; i < q_.size(); ++i)
            if (sgn(o.q_[i]) != 0) q_[i] += o.q_[i];
    } else {
        std::uint32_t p = field_.characteristic();
        for (std::size_t i = 0; i < r_.size(); ++i)
            r_[i] = static_cast<std::uint32_t>((static_cast<std::uint64_t>(r_[i]) + o.r_[i]) % p);
    }
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    check_compatible(o, "subtract");
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("subtract: shapes differ");
    if (field_.is_rational()) {
        for (std::size_t i = 0; i < q_.size(); ++i)
            if (sgn(o.q_[i]) != 0) q_[i] -= o.q_[i];
    } else {
        std::uint32_t p = field_.characteristic();
        for (std::size_t i = 0; i < r_.size(); ++i)
            r_[i] = static_cast<std::uint32_t>((static_cast<std::uint64_t>(r_[i]) + p - o.r_[i]) % p);
    }
    return *this;
}

Matrix Matrix::operator+(const Matrix& o) const {
    Matrix m = *this;
    m += o;
    return m;
}

Matrix Matrix::operator-(const Matrix& o) const {
    Matrix m = *this;
    m -= o;
    return m;
}

Matrix Matrix::operator-() const {
    Matrix m(field_, rows_, cols_);
    return m - *this;
}

Matrix Matrix::operator*(const Matrix& o) const {
    check_compatible(o, "multiply");
    if (cols_ != o.rows_) throw DimensionMismatch("multiply: inner dimensions differ");
    Matrix m(field_, rows_, o.cols_);
    const std::size_t n = o.cols_;
    if (field_.is_rational()) {
        mpq_class tmp;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const mpq_class& a = q_[i * cols_ + k];
                if (sgn(a) == 0) continue;
                const bool unit = a == 1;
                for (std::size_t j = 0; j < n; ++j) {
                    const mpq_class& b = o.q_[k * n + j];
                    if (sgn(b) == 0) continue;
                    mpq_ptr dst = m.q_[i * n + j].get_mpq_t();
                    if (unit) {
                        mpq_add(dst, dst, b.get_mpq_t());
                    } else {
                        mpq_mul(tmp.get_mpq_t(), a.get_mpq_t(), b.get_mpq_t());
                        mpq_add(dst, dst, tmp.get_mpq_t());
                    }
                }
            }
    } else {
        const std::uint64_t p = field_.characteristic();
        std::vector<std::uint64_t> acc(n);
        for (std::size_t i = 0; i < rows_; ++i) {
            std::fill(acc.begin(), acc.end(), 0);
            for (std::size_t k = 0; k < cols_; ++k) {
                std::uint64_t a = r_[i * cols_ + k];
                if (a == 0) continue;
                const std::uint32_t* brow = o.r_.data() + k * n;
                for (std::size_t j = 0; j < n; ++j) acc[j] = (acc[j] + a * brow[j]) % p;
            }
            for (std::size_t j = 0; j < n; ++j) m.r_[i * n + j] = static_cast<std::uint32_t>(acc[j]);
        }
    }
    return m;
}

Matrix Matrix::scaled(const Scalar& s) const {
    if (!(s.field() == field_)) throw FieldMismatch("scale: scalar field differs");
    Matrix m = *this;
    if (field_.is_rational()) {
        for (auto& x : m.q_)
            if (sgn(x) != 0) x *= s.rational();
    } else {
        std::uint64_t p = field_.characteristic();
        for (auto& x : m.r_) x = static_cast<std::uint32_t>(x * static_cast<std::uint64_t>(s.residue()) % p);
    }
    return m;
}

Matrix Matrix::transpose() const {
    Matrix m(field_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            if (field_.is_rational()) m.q_[j * rows_ + i] = q_[i * cols_ + j];
            else m.r_[j * rows_ + i] = r_[i * cols_ + j];
        }
    return m;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block out of range");
    Matrix m(field_, nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) {
            if (field_.is_rational()) m.q_[i * nc + j] = q_[(r0 + i) * cols_ + c0 + j];
            else m.r_[i * nc + j] = r_[(r0 + i) * cols_ + c0 + j];
        }
    return m;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
    check_compatible(m, "set_block");
    if (r0 + m.rows_ > rows_ || c0 + m.cols_ > cols_) throw DimensionMismatch("set_block out of range");
    for (std::size_t i = 0; i < m.rows_; ++i)
        for (std::size_t j = 0; j < m.cols_; ++j) {
            if (field_.is_rational()) q_[(r0 + i) * cols_ + c0 + j] = m.q_[i * m.cols_ + j];
            else r_[(r0 + i) * cols_ + c0 + j] = m.r_[i * m.cols_ + j];
        }
}

void Matrix::add_block(std::size_t r0, std::size_t c0, const Matrix& m, int sign) {
    check_compatible(m, "add_block");
    if (r0 + m.rows_ > rows_ || c0 + m.cols_ > cols_) throw DimensionMismatch("add_block out of range");
    const std::uint64_t p = field_.characteristic();
    for (std::size_t i = 0; i < m.rows_; ++i)
        for (std::size_t j = 0; j < m.cols_; ++j) {
            std::size_t dst = (r0 + i) * cols_ + c0 + j, src = i * m.cols_ + j;
            if (field_.is_rational()) {
                if (sgn(m.q_[src]) == 0) continue;
                if (sign >= 0) q_[dst] += m.q_[src];
                else q_[dst] -= m.q_[src];
            } else {
                std::uint64_t v = sign >= 0 ? m.r_[src] : (p - m.r_[src]) % p;
                r_[dst] = static_cast<std::uint32_t>((r_[dst] + v) % p);
            }
        }
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
    Matrix m(field_, idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) m.set_block(i, 0, row(idx[i]));
    return m;
}

Matrix Matrix::select_cols(std::span<const std::size_t> idx) const {
    Matrix m(field_, rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (field_.is_rational()) m.q_[i * idx.size() + j] = q_[i * cols_ + idx[j]];
            else m.r_[i * idx.size() + j] = r_[i * cols_ + idx[j]];
        }
    return m;
}

Matrix Matrix::hstack(std::span<const Matrix> parts) {
    if (parts.empty()) return {};
    std::size_t cols = 0;
    for (const auto& p : parts) {
        if (p.rows_ != parts[0].rows_) throw DimensionMismatch("hstack: row counts differ");
        parts[0].check_compatible(p, "hstack");
        cols += p.cols_;
    }
    Matrix m(parts[0].field_, parts[0].rows_, cols);
    std::size_t c = 0;
    for (const auto& p : parts) {
        m.set_block(0, c, p);
        c += p.cols_;
    }
    return m;
}

Matrix Matrix::vstack(std::span<const Matrix> parts) {
    if (parts.empty()) return {};
    std::size_t rows = 0;
    for (const auto& p : parts) {
        if (p.cols_ != parts[0].cols_) throw DimensionMismatch("vstack: column counts differ");
        parts[0].check_compatible(p, "vstack");
        rows += p.rows_;
    }
    Matrix m(parts[0].field_, rows, parts[0].cols_);
    std::size_t r = 0;
    for (const auto& p : parts) {
        m.set_block(r, 0, p);
        r += p.rows_;
    }
    return m;
}

std::size_t Matrix::rank() const { return echelon(*this).pivots.size(); }

Matrix Matrix::inverse() const {
    if (!is_square()) throw NotSquare(rows_, cols_);
    const Matrix parts[] = {*this, identity(field_, rows_)};
    EchelonForm e = echelon(hstack(parts));
    if (e.pivots.size() < rows_ || (rows_ > 0 && e.pivots[rows_ - 1] >= rows_)) throw Singular();
    return e.reduced.block(0, rows_, rows_, rows_);
}

bool operator==(const Matrix& a, const Matrix& b) {
    return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.q_ == b.q_ &&
           a.r_ == b.r_;
}

EchelonForm echelon(const Matrix& m) {
    EchelonForm e{m, {}};
    if (m.field().is_rational())
        e.pivots = rref_rational(e.reduced.rational_entries(), m.rows(), m.cols());
    else
        e.pivots = rref_modular(e.reduced.residue_entries(), m.rows(), m.cols(),
                                m.field().characteristic());
    return e;
}

Matrix rref(const Matrix& m) { return echelon(m).reduced; }

bool is_idempotent(const Matrix& m) {
    if (!m.is_square()) throw NotSquare(m.rows(), m.cols());
    return m * m == m;
}

}  // namespace equisplit
