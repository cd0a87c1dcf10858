#include "equisplit/subspace.hpp"

#include <utility>

#include "equisplit/errors.hpp"

namespace equisplit {

Subspace::Subspace(FieldSpec field, std::size_t ambient_dim)
    : ambient_(ambient_dim), basis_(field, 0, ambient_dim) {}

Subspace::Subspace(Matrix basis, std::vector<std::size_t> pivots, std::size_t ambient)
    : ambient_(ambient), basis_(std::move(basis)), pivots_(std::move(pivots)) {}

Subspace Subspace::whole(FieldSpec field, std::size_t ambient_dim) {
    std::vector<std::size_t> piv(ambient_dim);
    for (std::size_t i = 0; i < ambient_dim; ++i) piv[i] = i;
    return Subspace(Matrix::identity(field, ambient_dim), std::move(piv), ambient_dim);
}

Subspace Subspace::row_space(const Matrix& m) {
    EchelonForm e = echelon(m);
    const std::size_t k = e.pivots.size();
    return Subspace(e.reduced.block(0, 0, k, m.cols()), std::move(e.pivots), m.cols());
}

Subspace Subspace::column_space(const Matrix& m) { return row_space(m.transpose()); }

Matrix Subspace::coordinates(const Matrix& columns) const {
    return columns.select_rows(pivots_);
}

bool Subspace::contains_vector(const Matrix& column) const {
    if (column.rows() != ambient_) throw AmbientMismatch(ambient_, column.rows());
    // v lies in the span iff v equals the combination of basis rows given by
    // its pivot entries.
    return basis_columns() * coordinates(column) == column;
}

bool Subspace::contains(const Subspace& other) const {
    if (other.ambient_ != ambient_) throw AmbientMismatch(ambient_, other.ambient_);
    const Matrix cols = other.basis_columns();
    return basis_columns() * coordinates(cols) == cols;
}

Subspace image(const Matrix& m) { return Subspace::column_space(m); }

Matrix nullspace_columns(const Matrix& m) {
    EchelonForm e = echelon(m);
    const std::size_t n = m.cols();
    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : e.pivots) is_pivot[c] = true;
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) free.push_back(c);
    Matrix basis(m.field(), n, free.size());
    const Scalar one(m.field(), 1);
    for (std::size_t k = 0; k < free.size(); ++k) {
        basis.set(free[k], k, one);
        for (std::size_t r = 0; r < e.pivots.size(); ++r)
            if (!e.reduced.is_zero_at(r, free[k]))
                basis.set(e.pivots[r], k, -e.reduced.at(r, free[k]));
    }
    return basis;
}

Subspace kernel(const Matrix& m) {
    return Subspace::column_space(nullspace_columns(m));
}

Subspace sum(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim() != b.ambient_dim()) throw AmbientMismatch(a.ambient_dim(), b.ambient_dim());
    const Matrix parts[] = {a.basis(), b.basis()};
    return Subspace::row_space(Matrix::vstack(parts));
}

Subspace intersect(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim() != b.ambient_dim()) throw AmbientMismatch(a.ambient_dim(), b.ambient_dim());
    if (a.is_zero() || b.is_zero()) return Subspace(a.field(), a.ambient_dim());
    // (x, y) with x A + y B = 0 gives x A in the intersection.
    const Matrix parts[] = {a.basis(), b.basis()};
    const Matrix relations = nullspace_columns(Matrix::vstack(parts).transpose());
    const Matrix x = relations.block(0, 0, a.dim(), relations.cols()).transpose();
    return Subspace::row_space(x * a.basis());
}

}  // namespace equisplit
