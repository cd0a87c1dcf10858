#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "equisplit/complex.hpp"
#include "equisplit/matrix.hpp"
#include "equisplit/subspace.hpp"

namespace equisplit {

/// Flags describing which consistency conditions a system satisfies.
struct ConsistencyReport {
    bool vertex_idempotents = true;
    bool commuting_on_cells = true;
    /// Trees only: e_x e_z = e_x e_y e_z for every y on the geodesic x..z.
    /// Empty until check_path_condition() runs.
    std::optional<bool> path_condition;
    /// First few violating triples (x, y, z).
    std::vector<std::array<std::size_t, 3>> path_violations;

    nlohmann::json to_json() const;
};

/// Vertex idempotents e_x on a complex, with the cell idempotents
/// e_sigma = prod_{x in sigma} e_x derived once at construction.
class IdempotentSystem {
public:
    /// Throws InconsistentSystem when a matrix is not square of the common
    /// size or not idempotent, and NonCommutingOnCell when the vertex
    /// idempotents of some cell do not commute pairwise.
    IdempotentSystem(ComplexPtr complex, std::vector<Matrix> vertex_idempotents);

    const Complex& complex() const { return *complex_; }
    const ComplexPtr& complex_ptr() const { return complex_; }
    const FieldSpec& field() const { return field_; }
    std::size_t dim() const { return dim_; }

    const Matrix& vertex_idempotent(std::size_t x) const { return cell_.at(x); }
    const Matrix& cell_idempotent(std::size_t cell) const { return cell_.at(cell); }
    const Subspace& vertex_image(std::size_t x) const { return images_.at(x); }
    /// Row space of e_x; ker(e_x) is its annihilator.
    const Subspace& vertex_coimage(std::size_t x) const { return coimages_.at(x); }

    const ConsistencyReport& consistency() const { return report_; }
    /// Evaluates condition (b) of the report on a tree; no-op otherwise.
    void check_path_condition();

    /// {"complex": <hash>, "vertex_idempotents": [...]}
    nlohmann::json to_json() const;
    /// Throws ParseError if the complex hash does not match.
    static IdempotentSystem from_json(ComplexPtr complex, const nlohmann::json& j);

private:
    ComplexPtr complex_;
    FieldSpec field_;
    std::size_t dim_ = 0;
    std::vector<Matrix> cell_;
    std::vector<Subspace> images_;
    std::vector<Subspace> coimages_;
    ConsistencyReport report_;
};

/// Products of vertex idempotents over each cell, in vertex order. Each is
/// compared against the product in reversed order and checked to be
/// idempotent. Throws NonCommutingOnCell.
std::vector<Matrix> derive_cell_idempotents(const Complex& c, const std::vector<Matrix>& vertex_idempotents);

enum class Convexity { Verify, Asserted };

/// sum over cells of (-1)^dim e_sigma, cells in (dim, index) order. No
/// convexity check.
Matrix alternating_sum(const IdempotentSystem& sys, const Subcomplex& s);

/// The support projection u_Sigma. With Convexity::Verify, throws NotConvex
/// for a non-convex subcomplex of a tree and NotATree when the parent is
/// not a tree.
Matrix support_projection(const IdempotentSystem& sys, const Subcomplex& s,
                          Convexity convexity = Convexity::Verify);

struct SupportVerification {
    bool idempotent = false;
    bool image_identity = false;
    bool kernel_identity = false;
    std::optional<bool> convex;  // known for trees only
    std::size_t rank = 0;
    std::size_t image_sum_dim = 0;
    std::size_t kernel_meet_dim = 0;

    bool all() const { return idempotent && image_identity && kernel_identity; }
    nlohmann::json to_json() const;
};

/// Checks u^2 = u, im(u) = sum im(e_x) and ker(u) = meet ker(e_x) over the
/// vertices of s. Failures are recorded, not thrown.
SupportVerification verify_support_projection(const IdempotentSystem& sys, const Subcomplex& s);

/// Smallest level n with e[n][x] v = v, or nullopt when no level fixes v.
std::optional<std::size_t> approximate_unit_check(const std::vector<std::vector<Matrix>>& levels, std::size_t x,
                                                  const Matrix& v);

/// Greedily removes cells (with their cofaces) while `still_fails` holds,
/// sweeping in descending cell order until a pass removes nothing.
template <class Pred>
Subcomplex shrink_subcomplex(Subcomplex s, Pred still_fails) {
    bool changed = true;
    while (changed) {
        changed = false;
        const std::vector<std::size_t> cells = s.cells();
        for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
            if (!s.contains(*it)) continue;
            Subcomplex smaller = s.without(*it);
            if (!smaller.empty() && still_fails(smaller)) {
                s = std::move(smaller);
                changed = true;
            }
        }
    }
    return s;
}

}  // namespace equisplit
