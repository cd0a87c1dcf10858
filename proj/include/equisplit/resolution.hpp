#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include <json.hpp>

#include "equisplit/group.hpp"
#include "equisplit/idempotent_system.hpp"
#include "equisplit/matrix.hpp"
#include "equisplit/representation.hpp"
#include "equisplit/subspace.hpp"

namespace equisplit {

/// F = direct sum over cells of im(e_sigma), flattened in (dim, index) order.
/// Block sigma has the canonical basis of im(e_sigma); a vector w in the
/// block has coordinates w[pivots].
class BlockSpace {
public:
    explicit BlockSpace(const IdempotentSystem& sys);

    std::size_t dim() const { return total_; }
    std::size_t ambient_dim() const { return ambient_; }
    std::size_t num_cells() const { return bases_.size(); }
    std::size_t offset(std::size_t cell) const { return offsets_.at(cell); }
    std::size_t rank(std::size_t cell) const { return images_.at(cell).dim(); }
    /// Basis of block `cell` as columns of an ambient_dim x rank matrix.
    const Matrix& basis(std::size_t cell) const { return bases_.at(cell); }
    /// Coordinates of the columns of `v` (assumed inside the block).
    Matrix coordinates(std::size_t cell, const Matrix& v) const { return images_.at(cell).coordinates(v); }
    /// Rows of an F-vector (or of each column of a matrix) in block `cell`.
    Matrix block_of(std::size_t cell, const Matrix& f) const;

private:
    std::size_t ambient_ = 0;
    std::size_t total_ = 0;
    std::vector<Subspace> images_;
    std::vector<Matrix> bases_;
    std::vector<std::size_t> offsets_;
};

/// (g psi)(sigma) = rho(g) psi(g^-1 sigma), kept as per-cell block maps
/// A(g, sigma) = coords_{g sigma}(rho(g) B_sigma) rather than dense matrices.
class FAction {
public:
    FAction(const CellAction& action, const LinearRep& rep, const BlockSpace& space);

    /// rank(g sigma) x rank(sigma) block moving sigma to g sigma, computed
    /// on first use and cached; safe to call from several threads.
    const Matrix& block(std::size_t g, std::size_t sigma) const;
    /// rho_F(g) applied to the columns of an F-matrix.
    Matrix apply(std::size_t g, const Matrix& f) const;
    Matrix dense(std::size_t g) const;
    /// rho(g) B_sigma lies in im(e_{g sigma}) for all cells and generators,
    /// and A(s h, sigma) = A(s, h sigma) A(h, sigma) for generators s and all
    /// h. Throws InconsistentSystem.
    void verify() const;

    const CellAction& action() const { return action_; }
    const LinearRep& rep() const { return rep_; }
    const BlockSpace& space() const { return space_; }

private:
    const CellAction& action_;
    const LinearRep& rep_;
    const BlockSpace& space_;
    mutable std::vector<Matrix> blocks_;
    std::unique_ptr<std::once_flag[]> once_;
};

/// pi(psi) = sum of the blocks: ambient_dim x dim(F).
Matrix build_pi(const BlockSpace& space);
/// alpha(v)(sigma) = (-1)^dim(sigma) e_sigma v: dim(F) x ambient_dim.
Matrix build_alpha(const IdempotentSystem& sys, const BlockSpace& space);

/// Elements to check equivariance against: all of G when |G| <= limit,
/// otherwise the generators (sufficient for a homomorphism).
std::vector<std::size_t> equivariance_elements(const FiniteGroup& g, std::size_t limit = 48);

/// rho(g) pi = pi rho_F(g), checked blockwise.
bool pi_equivariant(const FAction& f, const Matrix& pi, const std::vector<std::size_t>& elements);
/// rho_F(g) alpha = alpha rho(g), checked blockwise.
bool alpha_equivariant(const FAction& f, const Matrix& alpha, const std::vector<std::size_t>& elements);

struct LevelMaps {
    Matrix alpha;
    Matrix pi;
    Matrix q;  // pi alpha
    std::size_t f_dim = 0;
};

LevelMaps build_level_maps(const IdempotentSystem& sys);

struct AlphaPiVerification {
    bool q_idempotent = false;
    bool image_identity = false;
    bool matches_support_projection = false;
    bool f_action_valid = false;
    bool alpha_equivariant = false;
    bool pi_equivariant = false;
    bool exhaustive_in_g = false;
    std::size_t f_dim = 0;
    std::size_t q_rank = 0;

    bool all() const {
        return q_idempotent && image_identity && matches_support_projection && f_action_valid && alpha_equivariant &&
               pi_equivariant;
    }
    nlohmann::json to_json() const;
};

/// alpha/pi identities and equivariance on one level, with Sigma = the whole complex.
AlphaPiVerification verify_alpha_pi(const IdempotentSystem& sys, const CellAction& action, const LinearRep& rep);

/// p_n = q_n - q_{n-1} (q_{-1} = 0). Throws NotIncreasing(n) when
/// q_n q_{n-1} != q_{n-1} or q_{n-1} q_n != q_{n-1}.
std::vector<Matrix> smooth_product_decomposition(const std::vector<Matrix>& q);

struct MultiLevel {
    Matrix alpha;  // (sum_n dim F^n) x dim V
    Matrix pi;     // dim V x (sum_n dim F^n)
    std::vector<std::size_t> offsets;
    std::vector<Matrix> projectors;  // p_n
};

/// alpha(v)_n = alpha^n (Id - q_{n-1}) v, concatenated over levels. Throws
/// NotIncreasing or NotExhaustive (q_N != Id); verifies pi alpha = Id.
MultiLevel multi_level_alpha(const std::vector<LevelMaps>& levels);

/// Stabilizer of an F-vector under the F-action.
Subgroup stabilizer_of(const FAction& f, const Matrix& psi);

/// sum_sigma av(U) psi(sigma). Throws NotFixed unless U fixes psi, and
/// BadCharacteristic.
Matrix pi_bar(const FAction& f, const Subgroup& u, const Matrix& psi);
/// pi_bar for U' computed from pi_bar for a normal subgroup U of U' by
/// summing over coset representatives of U'/U and dividing by the index.
Matrix pi_bar_via_cosets(const FAction& f, const Subgroup& u, const Subgroup& u_prime, const Matrix& psi);

}  // namespace equisplit
