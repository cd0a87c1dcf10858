#pragma once

#include <cstddef>
#include <vector>

#include "equisplit/matrix.hpp"

namespace equisplit {

/// A subspace of F^n stored by its reduced row-echelon basis. The stored
/// basis is canonical: equal subspaces have identical bases.
class Subspace {
public:
    /// The zero subspace of F^n.
    Subspace(FieldSpec field, std::size_t ambient_dim);

    static Subspace whole(FieldSpec field, std::size_t ambient_dim);
    /// Row space of `m` (any spanning set, dependent rows allowed).
    static Subspace row_space(const Matrix& m);
    /// Column space of `m`.
    static Subspace column_space(const Matrix& m);

    const FieldSpec& field() const { return basis_.field(); }
    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return basis_.rows(); }
    bool is_zero() const { return dim() == 0; }

    /// Basis vectors as rows, in RREF.
    const Matrix& basis() const { return basis_; }
    /// Basis vectors as columns (the transpose of basis()).
    Matrix basis_columns() const { return basis_.transpose(); }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    /// Coordinates of a column vector lying in the subspace with respect to
    /// basis(): read off at the pivot positions. Result is dim() x k for a
    /// block of k column vectors. The caller guarantees membership.
    Matrix coordinates(const Matrix& columns) const;

    bool contains_vector(const Matrix& column) const;
    bool contains(const Subspace& other) const;

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }
    friend bool operator!=(const Subspace& a, const Subspace& b) { return !(a == b); }

private:
    Subspace(Matrix basis, std::vector<std::size_t> pivots, std::size_t ambient);

    std::size_t ambient_;
    Matrix basis_;
    std::vector<std::size_t> pivots_;
};

/// Column space of m.
Subspace image(const Matrix& m);
/// Null space {v : m v = 0} inside F^{cols(m)}.
Subspace kernel(const Matrix& m);
/// Throws AmbientMismatch.
Subspace sum(const Subspace& a, const Subspace& b);
/// Throws AmbientMismatch.
Subspace intersect(const Subspace& a, const Subspace& b);

/// Null space basis as columns (cols(m) x nullity), the standard
/// free-variable basis read off the RREF.
Matrix nullspace_columns(const Matrix& m);

}  // namespace equisplit
