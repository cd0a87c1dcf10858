#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "equisplit/complex.hpp"

namespace equisplit {

/// Permutation of {0, ..., n-1}; image[i] is where i goes.
using Permutation = std::vector<std::size_t>;

/// Parses cycle notation over 0-based points, e.g. "(0 1 2)(3 4)" or "()".
/// Throws ParseError.
Permutation parse_cycles(std::string_view text, std::size_t degree);
std::string format_cycles(const Permutation& p);

/// Finite group stored by its multiplication table. Element 0 is the
/// identity. Elements are numbered breadth-first from the identity by left
/// multiplication with the generators, which also gives every element a
/// word: element g = generator(g) * parent(g).
class FiniteGroup {
public:
    static constexpr std::size_t default_max_order = 5000;

    /// Closure of permutation generators. Composition is (gh)(x) = g(h(x)).
    /// Throws SizeLimit beyond max_order.
    static FiniteGroup from_permutations(std::size_t degree, const std::vector<Permutation>& generators,
                                         std::size_t max_order = default_max_order);
    /// table[a][b] = index of a*b, identity at 0. Validates identity and
    /// inverse laws exactly and associativity on random triples; the
    /// generators are recovered greedily.
    static FiniteGroup from_table(std::vector<std::vector<std::size_t>> table, std::uint64_t seed = 0);
    static FiniteGroup trivial();

    std::size_t order() const { return table_.size(); }
    std::size_t identity() const { return 0; }
    std::size_t mul(std::size_t a, std::size_t b) const { return table_[a][b]; }
    std::size_t inverse(std::size_t a) const { return inverse_[a]; }
    /// g h g^-1
    std::size_t conjugate(std::size_t g, std::size_t h) const { return mul(mul(g, h), inverse(g)); }

    /// Generator element indices.
    const std::vector<std::size_t>& generators() const { return generators_; }
    /// Word structure: g = word_generator(g) * word_parent(g) for g != identity,
    /// where word_generator is an index into generators().
    std::size_t word_parent(std::size_t g) const { return word_parent_[g]; }
    std::size_t word_generator(std::size_t g) const { return word_generator_[g]; }

    bool has_permutations() const { return !permutations_.empty(); }
    std::size_t degree() const { return degree_; }
    const Permutation& permutation(std::size_t g) const { return permutations_.at(g); }

    /// Sorted elements of the subgroup generated by `gens`.
    std::vector<std::size_t> closure(const std::vector<std::size_t>& gens) const;
    std::size_t element_order(std::size_t g) const;

private:
    FiniteGroup() = default;
    void build_words(const std::vector<std::size_t>& generators);

    std::vector<std::vector<std::uint16_t>> table_;
    std::vector<std::size_t> inverse_;
    std::vector<std::size_t> generators_;
    std::vector<std::size_t> word_parent_;
    std::vector<std::size_t> word_generator_;
    std::vector<Permutation> permutations_;
    std::size_t degree_ = 0;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

/// A subgroup of a FiniteGroup, given by its sorted element indices.
struct Subgroup {
    std::vector<std::size_t> elements;
    std::string label;

    std::size_t order() const { return elements.size(); }
    bool contains(std::size_t g) const;
    bool is_trivial() const { return elements.size() == 1; }
    bool is_subset_of(const Subgroup& other) const;
    friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.elements == b.elements; }
};

Subgroup whole_group(const FiniteGroup& g, std::string label = "G");
Subgroup trivial_subgroup(const FiniteGroup& g, std::string label = "1");
Subgroup generated_subgroup(const FiniteGroup& g, const std::vector<std::size_t>& gens, std::string label);
/// Greedy generating set of u: ascending elements not already generated.
std::vector<std::size_t> subgroup_generators(const FiniteGroup& g, const Subgroup& u);
/// g U g^-1
Subgroup conjugate_subgroup(const FiniteGroup& g, std::size_t by, const Subgroup& u);
/// True when u is a normal subgroup of w (u must be contained in w).
bool is_normal_in(const FiniteGroup& g, const Subgroup& u, const Subgroup& w);
/// Every subgroup, ordered by (order, elements). Throws SizeLimit when the
/// group is larger than max_order.
std::vector<Subgroup> all_subgroups(const FiniteGroup& g, std::size_t max_order = 96);

/// A group acting on a complex by dimension-preserving poset automorphisms.
class CellAction {
public:
    /// vertex_images[g] is the permutation of vertices induced by element g.
    /// Throws InvalidGroup when some element does not act by an automorphism
    /// or the map g -> action is not a homomorphism.
    CellAction(GroupPtr group, ComplexPtr complex, std::vector<Permutation> vertex_images);
    /// The group's own permutations, read as permutations of the vertices.
    static CellAction from_permutation_group(GroupPtr group, ComplexPtr complex);

    const FiniteGroup& group() const { return *group_; }
    const GroupPtr& group_ptr() const { return group_; }
    const Complex& complex() const { return *complex_; }
    const ComplexPtr& complex_ptr() const { return complex_; }

    std::size_t act(std::size_t g, std::size_t cell) const { return cell_images_[g][cell]; }
    /// Image of a cell set, sorted.
    std::vector<std::size_t> act_on(std::size_t g, const std::vector<std::size_t>& cells) const;

    Subgroup cell_stabilizer(std::size_t cell) const;
    /// Elements fixing every listed cell.
    Subgroup pointwise_stabilizer(const std::vector<std::size_t>& cells, std::string label) const;
    /// Elements fixing every cell within distance n of vertex x. Throws NotATree.
    Subgroup pointwise_ball_stabilizer(std::size_t x, std::size_t n) const;
    /// Elements acting trivially on the whole complex.
    Subgroup kernel() const;

    /// Smallest cell index of each orbit, ascending.
    std::vector<std::size_t> orbit_representatives() const;
    std::size_t orbit_representative(std::size_t cell) const { return orbit_rep_[cell]; }
    /// Smallest element index g with g * orbit_representative(cell) = cell.
    std::size_t coset_representative(std::size_t cell) const { return coset_rep_[cell]; }

private:
    GroupPtr group_;
    ComplexPtr complex_;
    std::vector<std::vector<std::size_t>> cell_images_;
    std::vector<std::size_t> orbit_rep_;
    std::vector<std::size_t> coset_rep_;
};

/// Generators of the full automorphism group of a finite tree, as vertex
/// permutations: swaps of adjacent isomorphic branches at every vertex of
/// the tree rooted at its centre (plus the swap of the two halves for a
/// bicentral tree). Throws NotATree.
std::vector<Permutation> tree_automorphism_generators(const Complex& tree);

/// Generators of the subgroup obtained by cyclically rotating the branches
/// below each vertex of a tree ball (an iterated wreath product of cyclic
/// groups). Throws NotATree.
std::vector<Permutation> tree_rotation_generators(const Complex& tree);

}  // namespace equisplit
