#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "equisplit/group.hpp"
#include "equisplit/level_family.hpp"
#include "equisplit/matrix.hpp"
#include "equisplit/representation.hpp"
#include "equisplit/resolution.hpp"

namespace equisplit {

/// W' --i--> W --p--> W'' with equivariant i and p.
struct Extension {
    RepPtr sub;       // W'
    RepPtr middle;    // W
    RepPtr quotient;  // W''
    Matrix i;         // dim W x dim W'
    Matrix p;         // dim W'' x dim W

    /// Exactness and equivariance (all g for |G| <= 48, generators
    /// otherwise). Throws InvalidRepresentation.
    void validate() const;
    /// Generator images of the three representations plus i and p.
    nlohmann::json to_json() const;
    static Extension from_json(GroupPtr group, const nlohmann::json& j);
    std::string hash() const;
};

struct ExtensionOptions {
    std::size_t max_dim = 24;
    /// Skip the BadCharacteristic precheck on |G|.
    bool allow_bad_field = false;
};

/// W is a sum of permutation, sign-twisted and trivial representations
/// conjugated by a random unimodular matrix; W' is the G-span of one or
/// two random vectors; W'' = W/W' in the coordinates not pivotal for W'.
/// Deterministic in `seed`.
Extension random_extension(const CellAction& action, FieldSpec field, std::uint64_t seed,
                           const ExtensionOptions& options = {});

/// Quotient of `rep` by an invariant subspace, as an extension.
Extension extension_from_subspace(const RepPtr& rep, const Subspace& sub);

/// Canonical linear section of p: identity on the pivot columns of p.
Matrix canonical_section(const Matrix& p);
/// Canonical linear retraction of i: inverse on the pivot rows of i.
Matrix canonical_retraction(const Matrix& i);

/// |K|^-1 sum_k rho_W(k) t rho_W''(k)^-1 for the canonical section t.
/// Throws BadCharacteristic.
Matrix local_equivariant_section(const Extension& ext, const Subgroup& k);
/// |K|^-1 sum_k rho_W'(k) u rho_W(k)^-1 for the canonical retraction u.
Matrix local_equivariant_retraction(const Extension& ext, const Subgroup& k);

/// Block maps of the G-map F_orbit(sigma) -> W induced by a G_sigma-map
/// h: e_sigma V -> W (given in block coordinates, dim W x rank(sigma)). On
/// the block at tau = g sigma it is rho_W(g) h A(g^-1, tau), g the coset
/// representative; recomputed with a second representative g k. Returns
/// (cell, block map) pairs in cell order. Throws NotLocallyEquivariant.
std::vector<std::pair<std::size_t, Matrix>> frobenius_lift(const FAction& f, std::size_t sigma,
                                                           const LinearRep& target, const Matrix& h);

/// Idempotent systems for each level of a family on `rep`.
std::vector<IdempotentSystem> level_systems(const CellAction& action, const LinearRep& rep,
                                            const LevelFamily& family);

struct SplittingCertificate {
    enum class Kind { Section, Retraction };
    Kind kind = Kind::Section;
    Matrix map;
    std::string scope;  // "global"
    std::vector<std::pair<std::string, bool>> transcript;
    std::string extension_hash;
    std::string complex_hash;

    bool all_passed() const;
    nlohmann::json to_json() const;
};

/// p s = Id (or r i = Id) and rho-equivariance for every element of G,
/// recomputed from the extension alone.
std::vector<std::pair<std::string, bool>> reverify_certificate(const SplittingCertificate& cert,
                                                               const Extension& ext);

/// Section s = sum_n L^n alpha_n with L^n: F^n -> W lifting pi^n through p,
/// built on the quotient's level systems. Throws BadCharacteristic,
/// NotExhaustive or NotIncreasing.
SplittingCertificate construct_global_section(const Extension& ext, const CellAction& action,
                                              const LevelFamily& family);

/// Retraction r = sum_n pi^n E^n with E^n: W -> F^n equivariant and
/// E^n i = alpha_n, built on the sub-representation's level systems.
SplittingCertificate construct_global_retraction(const Extension& ext, const CellAction& action,
                                                 const LevelFamily& family);

/// Per-level pieces r_n = pi^n E^n of the retraction; r_n i = p_n.
std::vector<Matrix> retraction_pieces(const Extension& ext, const CellAction& action, const LevelFamily& family);

}  // namespace equisplit
