#include "equisplit/complex.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "equisplit/errors.hpp"
#include "equisplit/matrix_io.hpp"
#include "equisplit/rng.hpp"

namespace equisplit {

Complex::Complex(std::vector<Cell> cells) : cells_(std::move(cells)) {
    std::map<std::vector<std::size_t>, std::size_t> index;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        auto& c = cells_[i];
        std::sort(c.vertices.begin(), c.vertices.end());
        if (c.vertices.empty()) throw Error("cell " + std::to_string(i) + " has no vertices");
        if (i > 0 && c.dim < cells_[i - 1].dim) throw Error("cells are not sorted by dimension");
        if (c.dim == 0) {
            if (c.vertices.size() != 1 || c.vertices[0] != i)
                throw Error("vertex cell " + std::to_string(i) + " must have vertex set {" +
                            std::to_string(i) + "}");
            ++num_vertices_;
        } else if (c.vertices.size() < 2) {
            throw Error("cell " + std::to_string(i) + " of positive dimension has one vertex");
        }
        if (!index.emplace(c.vertices, i).second)
            throw Error("two cells share the vertex set of cell " + std::to_string(i));
    }
    for (const auto& c : cells_)
        for (std::size_t v : c.vertices)
            if (v >= num_vertices_) throw Error("vertex index out of range");

    facets_.assign(cells_.size(), {});
    cofacets_.assign(cells_.size(), {});
    adjacency_.assign(num_vertices_, {});
    for (std::size_t t = 0; t < cells_.size(); ++t) {
        for (std::size_t s = 0; s < t; ++s) {
            if (cells_[s].dim + 1 != cells_[t].dim) continue;
            if (std::includes(cells_[t].vertices.begin(), cells_[t].vertices.end(),
                              cells_[s].vertices.begin(), cells_[s].vertices.end())) {
                facets_[t].push_back(s);
                cofacets_[s].push_back(t);
            }
        }
        if (cells_[t].dim == 1) {
            if (cells_[t].vertices.size() != 2) throw Error("edge without two vertices");
            adjacency_[cells_[t].vertices[0]].push_back(cells_[t].vertices[1]);
            adjacency_[cells_[t].vertices[1]].push_back(cells_[t].vertices[0]);
        }
        if (cells_[t].dim > 0 && facets_[t].empty())
            throw Error("cell " + std::to_string(t) + " has no facets");
    }
    for (auto& a : adjacency_) std::sort(a.begin(), a.end());
    hash_ = fnv1a_hex(to_json().dump());
}

Complex Complex::from_simplices(std::size_t num_vertices,
                                const std::vector<std::vector<std::size_t>>& simplices) {
    std::set<std::vector<std::size_t>> faces;
    for (auto s : simplices) {
        std::sort(s.begin(), s.end());
        if (s.empty() || s.size() > 3) throw Error("simplices must have 1 to 3 vertices");
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw Error("repeated vertex in simplex");
        const std::size_t k = s.size();
        for (unsigned mask = 1; mask < (1u << k); ++mask) {
            std::vector<std::size_t> f;
            for (std::size_t i = 0; i < k; ++i)
                if (mask & (1u << i)) f.push_back(s[i]);
            faces.insert(f);
        }
    }
    std::vector<Cell> cells;
    for (std::size_t v = 0; v < num_vertices; ++v) cells.push_back({0, {v}});
    for (std::size_t d = 1; d <= 2; ++d)
        for (const auto& f : faces)
            if (f.size() == d + 1) cells.push_back({d, f});
    return Complex(std::move(cells));
}

std::size_t Complex::dimension() const { return cells_.empty() ? 0 : cells_.back().dim; }

bool Complex::is_face(std::size_t sigma, std::size_t tau) const {
    const auto& a = cells_.at(sigma);
    const auto& b = cells_.at(tau);
    return a.dim < b.dim &&
           std::includes(b.vertices.begin(), b.vertices.end(), a.vertices.begin(), a.vertices.end());
}

std::optional<std::size_t> Complex::cell_with_vertices(std::vector<std::size_t> vertices) const {
    std::sort(vertices.begin(), vertices.end());
    if (vertices.size() == 1) {
        if (vertices[0] < num_vertices_) return vertices[0];
        return std::nullopt;
    }
    for (std::size_t i = num_vertices_; i < cells_.size(); ++i)
        if (cells_[i].vertices == vertices) return i;
    return std::nullopt;
}

std::vector<std::size_t> Complex::neighbours(std::size_t v) const { return adjacency_.at(v); }

std::vector<std::size_t> Complex::distances_from(std::size_t v) const {
    std::vector<std::size_t> dist(num_vertices_, size());
    std::deque<std::size_t> queue{v};
    dist[v] = 0;
    while (!queue.empty()) {
        std::size_t x = queue.front();
        queue.pop_front();
        for (std::size_t y : adjacency_[x])
            if (dist[y] == size()) {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
    }
    return dist;
}

bool Complex::is_tree() const {
    if (num_vertices_ == 0 || dimension() > 1) return false;
    if (size() - num_vertices_ != num_vertices_ - 1) return false;
    const auto dist = distances_from(0);
    return std::none_of(dist.begin(), dist.end(), [&](std::size_t d) { return d == size(); });
}

nlohmann::json Complex::to_json() const {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : cells_) cells.push_back({{"dim", c.dim}, {"vertices", c.vertices}});
    nlohmann::json facets = nlohmann::json::array();
    for (std::size_t t = 0; t < cells_.size(); ++t)
        for (std::size_t s : facets_[t]) facets.push_back({s, t});
    return {{"cells", cells}, {"facets", facets}};
}

Complex Complex::from_json(const nlohmann::json& j) {
    try {
        std::vector<Cell> cells;
        for (const auto& c : j.at("cells"))
            cells.push_back({c.at("dim").get<std::size_t>(), c.at("vertices").get<std::vector<std::size_t>>()});
        Complex result(std::move(cells));
        if (j.contains("facets") && j.at("facets") != result.to_json().at("facets"))
            throw ParseError("facet pairs do not match the cell list");
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed complex: ") + e.what());
    }
}

std::size_t tree_ball_vertex_count(std::size_t q, std::size_t r) {
    std::size_t count = 1, layer = q + 1;
    for (std::size_t d = 1; d <= r; ++d) {
        count += layer;
        layer *= q;
    }
    return count;
}

Complex build_regular_tree_ball(std::size_t q, std::size_t r, std::size_t max_vertices) {
    if (q < 2) throw Error("tree ball needs branching q >= 2");
    // Guard against overflow before computing the count.
    std::size_t count = 1, layer = q + 1;
    for (std::size_t d = 1; d <= r; ++d) {
        count += layer;
        if (count > max_vertices) break;
        layer *= q;
    }
    if (count > max_vertices)
        throw SizeLimit("tree ball (q=" + std::to_string(q) + ", r=" + std::to_string(r) +
                        ") exceeds " + std::to_string(max_vertices) + " vertices");

    std::vector<std::size_t> parent{0}, depth{0};
    for (std::size_t v = 0; v < parent.size(); ++v) {
        if (depth[v] == r) continue;
        const std::size_t children = v == 0 ? q + 1 : q;
        for (std::size_t k = 0; k < children; ++k) {
            parent.push_back(v);
            depth.push_back(depth[v] + 1);
        }
    }
    std::vector<Complex::Cell> cells;
    for (std::size_t v = 0; v < parent.size(); ++v) cells.push_back({0, {v}});
    for (std::size_t v = 1; v < parent.size(); ++v) cells.push_back({1, {parent[v], v}});
    return Complex(std::move(cells));
}

Subcomplex::Subcomplex(ComplexPtr parent, std::vector<std::size_t> cells)
    : parent_(std::move(parent)), cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    for (std::size_t c : cells_) {
        if (c >= parent_->size()) throw Error("subcomplex cell index out of range");
        for (std::size_t f : parent_->facets(c))
            if (!contains(f)) throw Error("subcomplex is not closed under faces at cell " + std::to_string(c));
    }
}

Subcomplex Subcomplex::closure(ComplexPtr parent, const std::vector<std::size_t>& cells) {
    std::set<std::size_t> closed;
    std::vector<std::size_t> stack(cells.begin(), cells.end());
    while (!stack.empty()) {
        std::size_t c = stack.back();
        stack.pop_back();
        if (c >= parent->size()) throw Error("subcomplex cell index out of range");
        if (!closed.insert(c).second) continue;
        for (std::size_t f : parent->facets(c)) stack.push_back(f);
    }
    return Subcomplex(std::move(parent), std::vector<std::size_t>(closed.begin(), closed.end()));
}

Subcomplex Subcomplex::whole(ComplexPtr parent) {
    std::vector<std::size_t> all(parent->size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return Subcomplex(std::move(parent), std::move(all));
}

std::vector<std::size_t> Subcomplex::vertices() const {
    std::vector<std::size_t> v;
    for (std::size_t c : cells_)
        if (parent_->dim(c) == 0) v.push_back(c);
    return v;
}

bool Subcomplex::contains(std::size_t cell) const {
    return std::binary_search(cells_.begin(), cells_.end(), cell);
}

Subcomplex Subcomplex::without(std::size_t cell) const {
    std::vector<std::size_t> kept;
    for (std::size_t c : cells_)
        if (c != cell && !parent_->is_face(cell, c)) kept.push_back(c);
    return Subcomplex(parent_, std::move(kept));
}

nlohmann::json Subcomplex::to_json() const {
    return {{"parent", parent_->hash()}, {"cells", cells_}};
}

Subcomplex Subcomplex::from_json(ComplexPtr parent, const nlohmann::json& j) {
    try {
        if (j.at("parent").get<std::string>() != parent->hash())
            throw ParseError("subcomplex parent hash does not match the complex");
        return Subcomplex(std::move(parent), j.at("cells").get<std::vector<std::size_t>>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed subcomplex: ") + e.what());
    }
}

namespace {

// Vertex set to subcomplex: the vertices plus every edge between them.
Subcomplex induced(const ComplexPtr& c, const std::vector<bool>& in) {
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < c->size(); ++i) {
        const auto& vs = c->vertices(i);
        if (std::all_of(vs.begin(), vs.end(), [&](std::size_t v) { return in[v]; })) cells.push_back(i);
    }
    return Subcomplex(c, std::move(cells));
}

}  // namespace

Subcomplex convex_hull_tree(const ComplexPtr& c, const std::vector<std::size_t>& vertex_set) {
    if (!c->is_tree()) throw NotATree();
    std::vector<bool> in(c->num_vertices(), false);
    if (vertex_set.empty()) return Subcomplex(c, {});
    // The hull of X in a tree is the union of the geodesics from a fixed
    // x0 in X to every other point of X.
    const std::size_t root = vertex_set.front();
    std::vector<std::size_t> parent(c->num_vertices(), c->size());
    std::deque<std::size_t> queue{root};
    parent[root] = root;
    while (!queue.empty()) {
        std::size_t x = queue.front();
        queue.pop_front();
        for (std::size_t y : c->neighbours(x))
            if (parent[y] == c->size()) {
                parent[y] = x;
                queue.push_back(y);
            }
    }
    for (std::size_t x : vertex_set) {
        if (x >= c->num_vertices()) throw Error("hull vertex out of range");
        for (std::size_t v = x; !in[v]; v = parent[v]) {
            in[v] = true;
            if (v == root) break;
        }
    }
    return induced(c, in);
}

bool is_convex(const Subcomplex& s) {
    if (!s.parent().is_tree()) throw NotATree();
    return convex_hull_tree(s.parent_ptr(), s.vertices()).cells() == s.cells();
}

std::vector<Subcomplex> enumerate_convex_subcomplexes(const ComplexPtr& c, std::size_t max_count,
                                                      std::size_t max_vertices) {
    if (!c->is_tree()) throw NotATree();
    if (c->num_vertices() > max_vertices)
        throw SizeLimit("complex has more than " + std::to_string(max_vertices) + " vertices");
    std::vector<Subcomplex> out;
    const std::size_t n = c->num_vertices();
    std::vector<bool> in(n, false);

    // Connected vertex sets of a tree are exactly the convex subcomplexes.
    // Each set is produced once, from its smallest vertex (ESU extension).
    std::vector<std::size_t> members;
    auto extend = [&](auto&& self, std::size_t root, std::vector<std::size_t> ext,
                      std::vector<bool>& blocked) -> void {
        if (out.size() >= max_count) return;
        out.push_back(induced(c, in));
        while (!ext.empty() && out.size() < max_count) {
            std::size_t w = ext.front();
            ext.erase(ext.begin());
            std::vector<std::size_t> next = ext;
            std::vector<std::size_t> newly;
            for (std::size_t u : c->neighbours(w))
                if (u > root && !in[u] && !blocked[u]) {
                    next.push_back(u);
                    newly.push_back(u);
                    blocked[u] = true;
                }
            in[w] = true;
            self(self, root, next, blocked);
            in[w] = false;
            for (std::size_t u : newly) blocked[u] = false;
        }
    };
    for (std::size_t root = 0; root < n && out.size() < max_count; ++root) {
        std::vector<bool> blocked(n, false);
        blocked[root] = true;
        std::vector<std::size_t> ext;
        for (std::size_t u : c->neighbours(root))
            if (u > root) {
                ext.push_back(u);
                blocked[u] = true;
            }
        in[root] = true;
        extend(extend, root, ext, blocked);
        in[root] = false;
    }
    return out;
}

Subcomplex random_convex_subcomplex(const ComplexPtr& c, std::mt19937_64& rng) {
    if (!c->is_tree()) throw NotATree();
    const std::size_t n = c->num_vertices();
    std::vector<bool> in(n, false);
    const std::size_t start = uniform_below(rng, n);
    in[start] = true;
    const std::size_t target = 1 + uniform_below(rng, n);
    std::size_t count = 1;
    while (count < target) {
        std::vector<std::size_t> frontier;
        for (std::size_t v = 0; v < n; ++v)
            if (in[v])
                for (std::size_t u : c->neighbours(v))
                    if (!in[u]) frontier.push_back(u);
        if (frontier.empty()) break;
        std::sort(frontier.begin(), frontier.end());
        frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
        in[frontier[uniform_below(rng, frontier.size())]] = true;
        ++count;
    }
    return induced(c, in);
}

std::vector<std::size_t> ball_cells(const Complex& c, std::size_t x, std::size_t n) {
    const auto dist = c.distances_from(x);
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto& vs = c.vertices(i);
        if (std::all_of(vs.begin(), vs.end(), [&](std::size_t v) { return dist[v] <= n; }))
            cells.push_back(i);
    }
    return cells;
}

}  // namespace equisplit
