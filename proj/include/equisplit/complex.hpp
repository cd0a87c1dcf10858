#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace equisplit {

/// A finite cell complex. Cells are indexed so that the vertices come first
/// (vertex v is cell v) and indices are sorted by dimension. Each cell is
/// determined by its vertex set; the face order is inclusion of vertex sets.
class Complex {
public:
    struct Cell {
        std::size_t dim = 0;
        std::vector<std::size_t> vertices;  // sorted
    };

    /// Cells must be listed vertices first, sorted by dimension. Facets are
    /// derived as the faces of dimension one less. Throws Error on violated
    /// invariants (duplicate vertex sets, missing faces of simplices).
    explicit Complex(std::vector<Cell> cells);

    /// Simplicial complex generated by the given simplices (vertex lists over
    /// 0..num_vertices-1), closed under faces. Dimension at most 2.
    static Complex from_simplices(std::size_t num_vertices,
                                  const std::vector<std::vector<std::size_t>>& simplices);

    std::size_t size() const { return cells_.size(); }
    std::size_t num_vertices() const { return num_vertices_; }
    std::size_t dimension() const;
    std::size_t dim(std::size_t cell) const { return cells_.at(cell).dim; }
    const std::vector<std::size_t>& vertices(std::size_t cell) const { return cells_.at(cell).vertices; }
    const std::vector<Cell>& cells() const { return cells_; }
    /// Faces of codimension one.
    const std::vector<std::size_t>& facets(std::size_t cell) const { return facets_.at(cell); }
    /// Cells having `cell` as a facet.
    const std::vector<std::size_t>& cofacets(std::size_t cell) const { return cofacets_.at(cell); }
    /// True when sigma is a proper face of tau.
    bool is_face(std::size_t sigma, std::size_t tau) const;
    std::optional<std::size_t> cell_with_vertices(std::vector<std::size_t> vertices) const;

    /// Vertices joined to v by an edge, ascending.
    std::vector<std::size_t> neighbours(std::size_t v) const;
    /// Edge-path distances from v; unreachable vertices get size().
    std::vector<std::size_t> distances_from(std::size_t v) const;

    bool is_tree() const;

    nlohmann::json to_json() const;
    static Complex from_json(const nlohmann::json& j);
    /// Hash of the canonical serialization.
    const std::string& hash() const { return hash_; }

private:
    std::vector<Cell> cells_;
    std::size_t num_vertices_ = 0;
    std::vector<std::vector<std::size_t>> facets_;
    std::vector<std::vector<std::size_t>> cofacets_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::string hash_;
};

using ComplexPtr = std::shared_ptr<const Complex>;

/// Ball of radius r around a vertex in the (q+1)-regular tree, indexed
/// breadth-first from the centre (vertex 0); edge 0 joins the centre to
/// vertex 1. Throws Error for q < 2 and SizeLimit above max_vertices.
Complex build_regular_tree_ball(std::size_t q, std::size_t r, std::size_t max_vertices = 4096);

/// Expected vertex count 1 + (q+1)(q^r - 1)/(q - 1).
std::size_t tree_ball_vertex_count(std::size_t q, std::size_t r);

/// A facet-closed set of cells of a parent complex, stored sorted.
class Subcomplex {
public:
    /// Throws Error if `cells` is not closed under faces or out of range.
    Subcomplex(ComplexPtr parent, std::vector<std::size_t> cells);
    /// Closure of `cells` under taking faces.
    static Subcomplex closure(ComplexPtr parent, const std::vector<std::size_t>& cells);
    static Subcomplex whole(ComplexPtr parent);

    const Complex& parent() const { return *parent_; }
    const ComplexPtr& parent_ptr() const { return parent_; }
    const std::vector<std::size_t>& cells() const { return cells_; }
    std::vector<std::size_t> vertices() const;
    bool contains(std::size_t cell) const;
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }

    /// Drop a cell together with every cell having it as a face.
    Subcomplex without(std::size_t cell) const;

    /// {"parent": <hash>, "cells": [...]}
    nlohmann::json to_json() const;
    /// Throws ParseError if the hash does not match `parent`.
    static Subcomplex from_json(ComplexPtr parent, const nlohmann::json& j);

    friend bool operator==(const Subcomplex& a, const Subcomplex& b) {
        return a.parent_->hash() == b.parent_->hash() && a.cells_ == b.cells_;
    }

private:
    ComplexPtr parent_;
    std::vector<std::size_t> cells_;
};

/// Smallest convex subcomplex of a tree containing the given vertices.
/// Throws NotATree.
Subcomplex convex_hull_tree(const ComplexPtr& c, const std::vector<std::size_t>& vertex_set);

/// Throws NotATree when the parent is not a tree; convexity of higher
/// dimensional complexes has to be asserted by the caller.
bool is_convex(const Subcomplex& s);

/// Distinct nonempty convex subcomplexes of a tree, ordered by smallest
/// vertex and then by depth-first extension, truncated at max_count.
std::vector<Subcomplex> enumerate_convex_subcomplexes(const ComplexPtr& c, std::size_t max_count,
                                                      std::size_t max_vertices = 4096);

/// A convex subcomplex grown from a random vertex by random frontier steps.
Subcomplex random_convex_subcomplex(const ComplexPtr& c, std::mt19937_64& rng);

/// Cells all of whose vertices lie within distance n of x.
std::vector<std::size_t> ball_cells(const Complex& c, std::size_t x, std::size_t n);

}  // namespace equisplit
