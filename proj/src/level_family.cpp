#include "equisplit/level_family.hpp"

#include <map>

#include "equisplit/errors.hpp"

namespace equisplit {

LevelFamily::LevelFamily(const CellAction& action, std::vector<std::vector<Subgroup>> subgroups)
    : subgroups_(std::move(subgroups)) {
    const FiniteGroup& g = action.group();
    const std::size_t nv = action.complex().num_vertices();
    for (std::size_t n = 0; n < subgroups_.size(); ++n) {
        if (subgroups_[n].size() != nv)
            throw InconsistentSystem("level " + std::to_string(n) + " does not list one subgroup per vertex");
        for (std::size_t x = 0; x < nv; ++x) {
            const Subgroup& u = subgroups_[n][x];
            if (g.closure(u.elements) != u.elements)
                throw InconsistentSystem("U[" + std::to_string(n) + "][" + std::to_string(x) + "] is not a subgroup");
            if (n > 0 && !u.is_subset_of(subgroups_[n - 1][x]))
                throw InconsistentSystem("U[" + std::to_string(n) + "][" + std::to_string(x) +
                                         "] is not contained in the previous level");
            // Conjugation by generators suffices.
            for (std::size_t s : g.generators())
                if (conjugate_subgroup(g, s, u).elements != subgroups_[n][action.act(s, x)].elements)
                    throw InconsistentSystem("family is not equivariant at level " + std::to_string(n) +
                                             ", vertex " + std::to_string(x));
        }
    }
}

LevelFamily LevelFamily::ball_stabilizers(const CellAction& action, std::size_t top_level,
                                          std::size_t radius_offset) {
    std::vector<std::vector<Subgroup>> subgroups(top_level + 1);
    for (std::size_t n = 0; n <= top_level; ++n)
        for (std::size_t x = 0; x < action.complex().num_vertices(); ++x) {
            Subgroup u = action.pointwise_ball_stabilizer(x, n + radius_offset);
            u.label = "U[" + std::to_string(n) + "][" + std::to_string(x) + "]";
            subgroups[n].push_back(std::move(u));
        }
    return LevelFamily(action, std::move(subgroups));
}

LevelFamily LevelFamily::exhaustive_ball_stabilizers(const CellAction& action, std::size_t radius_offset) {
    const Subgroup ker = action.kernel();
    const Complex& c = action.complex();
    // Every ball of radius >= number of vertices covers the (connected) tree.
    for (std::size_t top = 0;; ++top) {
        bool done = true;
        for (std::size_t x = 0; x < c.num_vertices() && done; ++x)
            done = action.pointwise_ball_stabilizer(x, top + radius_offset).elements == ker.elements;
        if (done || top + radius_offset >= c.num_vertices()) return ball_stabilizers(action, top, radius_offset);
    }
}

bool LevelFamily::exhaustive() const {
    if (subgroups_.empty()) return false;
    for (const auto& u : subgroups_.back())
        if (!u.is_trivial()) return false;
    return true;
}

std::vector<std::vector<Matrix>> build_level_system(const CellAction& action, const LinearRep& rep,
                                                    const LevelFamily& family) {
    if (rep.group_ptr() != action.group_ptr())
        throw InvalidRepresentation("representation and action use different groups");
    const FiniteGroup& g = action.group();
    std::map<std::vector<std::size_t>, Matrix> cache;
    std::vector<std::vector<Matrix>> e(family.num_levels());
    for (std::size_t n = 0; n < family.num_levels(); ++n)
        for (std::size_t x = 0; x < family.num_vertices(); ++x) {
            const Subgroup& u = family.at(n, x);
            auto it = cache.find(u.elements);
            if (it == cache.end()) {
                try {
                    it = cache.emplace(u.elements, averaging_idempotent(u, rep)).first;
                } catch (const BadCharacteristic& bad) {
                    throw BadCharacteristic("U[" + std::to_string(n) + "][" + std::to_string(x) + "]",
                                            bad.subgroup_order(), bad.characteristic(), u.elements);
                }
            }
            e[n].push_back(it->second);
        }

    // Generators suffice: rho(st) e_x rho(st)^-1 = rho(s) e_{tx} rho(s)^-1.
    for (std::size_t h : g.generators()) {
        const Matrix& r = rep.rho(h);
        for (std::size_t n = 0; n < e.size(); ++n)
            for (std::size_t x = 0; x < e[n].size(); ++x)
                if (r * e[n][x] != e[n][action.act(h, x)] * r)
                    throw InconsistentSystem("vertex idempotents are not conjugation-equivariant at level " +
                                             std::to_string(n) + ", vertex " + std::to_string(x));
    }
    return e;
}

}  // namespace equisplit
