#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "equisplit/group.hpp"
#include "equisplit/matrix.hpp"
#include "equisplit/subspace.hpp"

namespace equisplit {

/// A matrix representation g -> rho(g) of a finite group. All element
/// images are materialised at construction and the homomorphism law is
/// checked exactly along every edge of the Cayley graph.
class LinearRep {
public:
    /// Cap on |G| * dim^2 stored entries.
    static constexpr std::size_t default_max_entries = 1u << 21;

    /// Extends generator images to all elements by word evaluation. Throws
    /// InvalidRepresentation when the images do not define a homomorphism
    /// or are not invertible.
    static LinearRep from_generator_images(GroupPtr group, FieldSpec field, std::size_t dim,
                                           const std::vector<Matrix>& generator_images,
                                           std::size_t max_entries = default_max_entries);

    static LinearRep trivial(GroupPtr group, FieldSpec field);
    /// Left regular representation on the group algebra, basis = elements.
    static LinearRep regular(GroupPtr group, FieldSpec field, std::size_t max_entries = default_max_entries);
    /// Permutation representation on a list of cells (basis = that list).
    static LinearRep permutation(const class CellAction& action, FieldSpec field,
                                 const std::vector<std::size_t>& cells);
    /// Sign of the vertex permutation. Needs a permutation group.
    static LinearRep sign(GroupPtr group, FieldSpec field);
    static LinearRep direct_sum(const LinearRep& a, const LinearRep& b);
    static LinearRep tensor(const LinearRep& a, const LinearRep& b);
    /// rho'(g) = c rho(g) c^-1.
    static LinearRep conjugated(const LinearRep& rep, const Matrix& c);

    const FiniteGroup& group() const { return *group_; }
    const GroupPtr& group_ptr() const { return group_; }
    const FieldSpec& field() const { return field_; }
    std::size_t dim() const { return dim_; }
    const Matrix& rho(std::size_t g) const { return images_.at(g); }

    /// Generator images (used for serialisation and replay).
    std::vector<Matrix> generator_images() const;

private:
    LinearRep(GroupPtr group, FieldSpec field, std::size_t dim, std::vector<Matrix> images);
    static LinearRep checked(GroupPtr group, FieldSpec field, std::size_t dim, std::vector<Matrix> images);

    GroupPtr group_;
    FieldSpec field_;
    std::size_t dim_;
    std::vector<Matrix> images_;
};

using RepPtr = std::shared_ptr<const LinearRep>;

/// |U|^-1 sum_{u in U} rho(u). Throws BadCharacteristic when |U| vanishes in
/// the field.
Matrix averaging_idempotent(const Subgroup& u, const LinearRep& rep);

/// Fixed vectors of U, computed independently of averaging as the kernel of
/// the stacked matrices rho(s) - I over the elements of U.
Subspace fixed_subspace(const Subgroup& u, const LinearRep& rep);

/// Random invertible integer matrix with integer inverse: a product of
/// elementary row operations with multipliers in [-1, 1].
Matrix random_unimodular(FieldSpec field, std::size_t n, std::mt19937_64& rng, std::size_t steps = 0);

}  // namespace equisplit
