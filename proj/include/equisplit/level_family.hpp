#pragma once

#include <cstddef>
#include <vector>

#include "equisplit/group.hpp"
#include "equisplit/matrix.hpp"
#include "equisplit/representation.hpp"

namespace equisplit {

/// Subgroups U[n][x] for levels n = 0..N and vertices x, nested in n and
/// permuted by conjugation: g U[n][x] g^-1 = U[n][g x].
class LevelFamily {
public:
    /// Throws InconsistentSystem when nesting or equivariance fails.
    LevelFamily(const CellAction& action, std::vector<std::vector<Subgroup>> subgroups);

    /// U[n][x] = pointwise stabilizer of the ball of radius n + radius_offset
    /// around x, for n = 0..top_level. Throws NotATree.
    static LevelFamily ball_stabilizers(const CellAction& action, std::size_t top_level,
                                        std::size_t radius_offset = 1);
    /// Ball stabilizers up to the first level at which every U[n][x] equals
    /// the kernel of the action (trivial for a faithful action).
    static LevelFamily exhaustive_ball_stabilizers(const CellAction& action, std::size_t radius_offset = 1);

    std::size_t num_levels() const { return subgroups_.size(); }
    std::size_t num_vertices() const { return subgroups_.empty() ? 0 : subgroups_[0].size(); }
    const Subgroup& at(std::size_t n, std::size_t x) const { return subgroups_.at(n).at(x); }
    /// Every subgroup of the top level is trivial.
    bool exhaustive() const;

private:
    std::vector<std::vector<Subgroup>> subgroups_;
};

/// e[n][x] = averaging_idempotent(U[n][x], rep). Checks
/// rho(s) e[n][x] = e[n][s x] rho(s) for the generators s, which implies
/// conjugation-equivariance for every element. Throws
/// BadCharacteristic naming the level, vertex and order of the offending
/// subgroup, or InconsistentSystem when equivariance fails.
std::vector<std::vector<Matrix>> build_level_system(const CellAction& action, const LinearRep& rep,
                                                    const LevelFamily& family);

}  // namespace equisplit
