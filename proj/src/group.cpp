#include "equisplit/group.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "equisplit/errors.hpp"
#include "equisplit/rng.hpp"

namespace equisplit {

Permutation parse_cycles(std::string_view text, std::size_t degree) {
    Permutation p(degree);
    for (std::size_t i = 0; i < degree; ++i) p[i] = i;
    std::vector<bool> seen(degree, false);
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == ',')) ++pos;
    };
    skip_space();
    if (pos == text.size()) throw ParseError("empty permutation");
    while (pos < text.size()) {
        if (text[pos] != '(') throw ParseError("expected '(' in permutation '" + std::string(text) + "'");
        ++pos;
        std::vector<std::size_t> cycle;
        while (true) {
            skip_space();
            if (pos >= text.size()) throw ParseError("unterminated cycle in '" + std::string(text) + "'");
            if (text[pos] == ')') {
                ++pos;
                break;
            }
            std::size_t start = pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
            if (start == pos) throw ParseError("bad character in permutation '" + std::string(text) + "'");
            std::size_t v = std::stoul(std::string(text.substr(start, pos - start)));
            if (v >= degree) throw ParseError("point " + std::to_string(v) + " exceeds degree");
            if (seen[v]) throw ParseError("point " + std::to_string(v) + " repeated in permutation");
            seen[v] = true;
            cycle.push_back(v);
        }
        for (std::size_t i = 0; i < cycle.size(); ++i) p[cycle[i]] = cycle[(i + 1) % cycle.size()];
        skip_space();
    }
    return p;
}

std::string format_cycles(const Permutation& p) {
    std::string out;
    std::vector<bool> seen(p.size(), false);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (seen[i] || p[i] == i) continue;
        out += '(';
        for (std::size_t j = i; !seen[j]; j = p[j]) {
            seen[j] = true;
            if (j != i) out += ' ';
            out += std::to_string(j);
        }
        out += ')';
    }
    return out.empty() ? "()" : out;
}

FiniteGroup FiniteGroup::trivial() { return from_permutations(0, {}); }

FiniteGroup FiniteGroup::from_permutations(std::size_t degree, const std::vector<Permutation>& generators,
                                           std::size_t max_order) {
    if (max_order > 65535) throw SizeLimit("group order cap must stay below 65536");
    for (const auto& s : generators) {
        if (s.size() != degree) throw InvalidGroup("generator has wrong degree");
        std::vector<bool> hit(degree, false);
        for (std::size_t x : s) {
            if (x >= degree || hit[x]) throw InvalidGroup("generator is not a permutation");
            hit[x] = true;
        }
    }
    FiniteGroup g;
    g.degree_ = degree;
    Permutation id(degree);
    for (std::size_t i = 0; i < degree; ++i) id[i] = i;
    std::map<Permutation, std::size_t> index{{id, 0}};
    g.permutations_.push_back(id);
    g.word_parent_.push_back(0);
    g.word_generator_.push_back(0);

    // Distinct, non-identity generators only.
    std::vector<Permutation> gens;
    for (const auto& s : generators)
        if (s != id && std::find(gens.begin(), gens.end(), s) == gens.end()) gens.push_back(s);

    auto compose = [degree](const Permutation& a, const Permutation& b) {
        Permutation c(degree);
        for (std::size_t x = 0; x < degree; ++x) c[x] = a[b[x]];
        return c;
    };
    for (std::size_t i = 0; i < g.permutations_.size(); ++i) {
        for (std::size_t k = 0; k < gens.size(); ++k) {
            Permutation h = compose(gens[k], g.permutations_[i]);
            if (index.count(h)) continue;
            if (g.permutations_.size() >= max_order)
                throw SizeLimit("group order exceeds " + std::to_string(max_order));
            index.emplace(h, g.permutations_.size());
            g.permutations_.push_back(std::move(h));
            g.word_parent_.push_back(i);
            g.word_generator_.push_back(k);
        }
    }
    for (const auto& s : gens) g.generators_.push_back(index.at(s));

    const std::size_t n = g.permutations_.size();
    // Right multiplication by each generator, then table[a][b] from the word
    // of b: a * b = (a * gen(b)) * parent(b).
    std::vector<std::vector<std::size_t>> right(gens.size(), std::vector<std::size_t>(n));
    for (std::size_t k = 0; k < gens.size(); ++k)
        for (std::size_t a = 0; a < n; ++a) right[k][a] = index.at(compose(g.permutations_[a], gens[k]));
    g.table_.assign(n, std::vector<std::uint16_t>(n));
    for (std::size_t a = 0; a < n; ++a) g.table_[a][0] = static_cast<std::uint16_t>(a);
    for (std::size_t b = 1; b < n; ++b)
        for (std::size_t a = 0; a < n; ++a)
            g.table_[a][b] = g.table_[right[g.word_generator_[b]][a]][g.word_parent_[b]];
    g.inverse_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (g.table_[a][b] == 0) {
                g.inverse_[a] = b;
                break;
            }
    return g;
}

FiniteGroup FiniteGroup::from_table(std::vector<std::vector<std::size_t>> table, std::uint64_t seed) {
    const std::size_t n = table.size();
    if (n == 0 || n > 65535) throw InvalidGroup("table must have between 1 and 65535 rows");
    FiniteGroup g;
    g.table_.assign(n, std::vector<std::uint16_t>(n));
    for (std::size_t a = 0; a < n; ++a) {
        if (table[a].size() != n) throw InvalidGroup("multiplication table is not square");
        std::vector<bool> hit(n, false);
        for (std::size_t b = 0; b < n; ++b) {
            std::size_t c = table[a][b];
            if (c >= n || hit[c]) throw InvalidGroup("row " + std::to_string(a) + " is not a permutation");
            hit[c] = true;
            g.table_[a][b] = static_cast<std::uint16_t>(c);
        }
    }
    for (std::size_t a = 0; a < n; ++a)
        if (table[0][a] != a || table[a][0] != a) throw InvalidGroup("element 0 is not the identity");
    g.inverse_.assign(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (table[a][b] == 0 && table[b][a] == 0) g.inverse_[a] = b;
    for (std::size_t a = 0; a < n; ++a)
        if (g.inverse_[a] == n) throw InvalidGroup("element " + std::to_string(a) + " has no two-sided inverse");
    std::mt19937_64 rng(seed);
    const std::size_t trials = std::min<std::size_t>(n * n * n, 4096);
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t a, b, c;
        if (n * n * n <= 4096) {
            a = t / (n * n), b = (t / n) % n, c = t % n;
        } else {
            a = uniform_below(rng, n), b = uniform_below(rng, n), c = uniform_below(rng, n);
        }
        if (table[table[a][b]][c] != table[a][table[b][c]])
            throw InvalidGroup("multiplication is not associative on (" + std::to_string(a) + ", " +
                               std::to_string(b) + ", " + std::to_string(c) + ")");
    }
    std::vector<std::size_t> gens;
    std::vector<std::size_t> span{0};
    for (std::size_t a = 1; a < n; ++a) {
        if (std::binary_search(span.begin(), span.end(), a)) continue;
        gens.push_back(a);
        span = g.closure(gens);
    }
    g.build_words(gens);
    return g;
}

void FiniteGroup::build_words(const std::vector<std::size_t>& generators) {
    generators_ = generators;
    const std::size_t n = order();
    word_parent_.assign(n, n);
    word_generator_.assign(n, 0);
    word_parent_[0] = 0;
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t x = queue.front();
        queue.pop_front();
        for (std::size_t k = 0; k < generators_.size(); ++k) {
            std::size_t y = mul(generators_[k], x);
            if (word_parent_[y] != n) continue;
            word_parent_[y] = x;
            word_generator_[y] = k;
            queue.push_back(y);
        }
    }
}

std::vector<std::size_t> FiniteGroup::closure(const std::vector<std::size_t>& gens) const {
    std::vector<bool> in(order(), false);
    std::vector<std::size_t> elems{0};
    in[0] = true;
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t s : gens) {
            std::size_t y = mul(s, elems[i]);
            if (!in[y]) {
                in[y] = true;
                elems.push_back(y);
            }
        }
    std::sort(elems.begin(), elems.end());
    return elems;
}

std::size_t FiniteGroup::element_order(std::size_t g) const {
    std::size_t k = 1;
    for (std::size_t x = g; x != 0; x = mul(g, x)) ++k;
    return k;
}

bool Subgroup::contains(std::size_t g) const {
    return std::binary_search(elements.begin(), elements.end(), g);
}

bool Subgroup::is_subset_of(const Subgroup& other) const {
    return std::includes(other.elements.begin(), other.elements.end(), elements.begin(), elements.end());
}

Subgroup whole_group(const FiniteGroup& g, std::string label) {
    Subgroup s{std::vector<std::size_t>(g.order()), std::move(label)};
    for (std::size_t i = 0; i < g.order(); ++i) s.elements[i] = i;
    return s;
}

Subgroup trivial_subgroup(const FiniteGroup&, std::string label) { return {{0}, std::move(label)}; }

std::vector<std::size_t> subgroup_generators(const FiniteGroup& g, const Subgroup& u) {
    std::vector<std::size_t> gens;
    std::vector<std::size_t> reached{0};
    for (std::size_t x : u.elements) {
        if (std::binary_search(reached.begin(), reached.end(), x)) continue;
        gens.push_back(x);
        reached = g.closure(gens);
    }
    return gens;
}

Subgroup generated_subgroup(const FiniteGroup& g, const std::vector<std::size_t>& gens, std::string label) {
    return {g.closure(gens), std::move(label)};
}

Subgroup conjugate_subgroup(const FiniteGroup& g, std::size_t by, const Subgroup& u) {
    Subgroup s{{}, u.label + "^" + std::to_string(by)};
    for (std::size_t x : u.elements) s.elements.push_back(g.conjugate(by, x));
    std::sort(s.elements.begin(), s.elements.end());
    return s;
}

bool is_normal_in(const FiniteGroup& g, const Subgroup& u, const Subgroup& w) {
    if (!u.is_subset_of(w)) return false;
    for (std::size_t x : w.elements)
        for (std::size_t y : u.elements)
            if (!u.contains(g.conjugate(x, y))) return false;
    return true;
}

std::vector<Subgroup> all_subgroups(const FiniteGroup& g, std::size_t max_order) {
    if (g.order() > max_order)
        throw SizeLimit("subgroup enumeration is limited to groups of order " + std::to_string(max_order));
    struct Entry {
        std::vector<std::size_t> gens;
        std::vector<std::size_t> elements;
    };
    std::set<std::vector<std::size_t>> seen;
    std::vector<Entry> found;
    std::vector<std::size_t> cyclic_gens;
    for (std::size_t x = 0; x < g.order(); ++x) {
        auto elems = g.closure({x});
        if (seen.insert(elems).second) {
            found.push_back({{x}, elems});
            if (x != 0) cyclic_gens.push_back(x);
        }
    }
    for (std::size_t i = 0; i < found.size(); ++i)
        for (std::size_t c : cyclic_gens) {
            if (std::binary_search(found[i].elements.begin(), found[i].elements.end(), c)) continue;
            auto gens = found[i].gens;
            gens.push_back(c);
            auto elems = g.closure(gens);
            if (seen.insert(elems).second) found.push_back({gens, elems});
        }
    std::sort(found.begin(), found.end(), [](const Entry& a, const Entry& b) {
        if (a.elements.size() != b.elements.size()) return a.elements.size() < b.elements.size();
        return a.elements < b.elements;
    });
    std::vector<Subgroup> out;
    for (std::size_t i = 0; i < found.size(); ++i)
        out.push_back({found[i].elements, "H" + std::to_string(i)});
    return out;
}

CellAction::CellAction(GroupPtr group, ComplexPtr complex, std::vector<Permutation> vertex_images)
    : group_(std::move(group)), complex_(std::move(complex)) {
    const std::size_t n = group_->order();
    const std::size_t nv = complex_->num_vertices();
    if (vertex_images.size() != n) throw InvalidGroup("need one vertex permutation per group element");
    std::map<std::vector<std::size_t>, std::size_t> by_vertices;
    for (std::size_t c = 0; c < complex_->size(); ++c) by_vertices.emplace(complex_->vertices(c), c);
    cell_images_.assign(n, std::vector<std::size_t>(complex_->size()));
    for (std::size_t g = 0; g < n; ++g) {
        const auto& p = vertex_images[g];
        if (p.size() != nv) throw InvalidGroup("vertex permutation has wrong degree");
        for (std::size_t c = 0; c < complex_->size(); ++c) {
            std::vector<std::size_t> img;
            for (std::size_t v : complex_->vertices(c)) img.push_back(p[v]);
            std::sort(img.begin(), img.end());
            auto it = by_vertices.find(img);
            if (it == by_vertices.end() || complex_->dim(it->second) != complex_->dim(c))
                throw InvalidGroup("element " + std::to_string(g) + " does not map cell " + std::to_string(c) +
                                   " to a cell of the same dimension");
            cell_images_[g][c] = it->second;
        }
        std::vector<std::size_t> sorted = cell_images_[g];
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InvalidGroup("element " + std::to_string(g) + " is not a bijection on cells");
    }
    for (std::size_t c = 0; c < complex_->size(); ++c)
        if (cell_images_[0][c] != c) throw InvalidGroup("identity acts non-trivially");
    for (std::size_t s : group_->generators())
        for (std::size_t g = 0; g < n; ++g)
            for (std::size_t c = 0; c < complex_->size(); ++c)
                if (cell_images_[group_->mul(s, g)][c] != cell_images_[s][cell_images_[g][c]])
                    throw InvalidGroup("cell action is not a homomorphism");

    orbit_rep_.assign(complex_->size(), 0);
    coset_rep_.assign(complex_->size(), 0);
    for (std::size_t c = 0; c < complex_->size(); ++c) {
        std::size_t rep = c;
        for (std::size_t g = 0; g < n; ++g) rep = std::min(rep, cell_images_[g][c]);
        orbit_rep_[c] = rep;
        for (std::size_t g = 0; g < n; ++g)
            if (cell_images_[g][rep] == c) {
                coset_rep_[c] = g;
                break;
            }
    }
}

CellAction CellAction::from_permutation_group(GroupPtr group, ComplexPtr complex) {
    if (group->order() > 1 && group->degree() != complex->num_vertices())
        throw InvalidGroup("permutation degree differs from the vertex count");
    std::vector<Permutation> images;
    for (std::size_t g = 0; g < group->order(); ++g) {
        if (group->has_permutations() && group->degree() == complex->num_vertices()) {
            images.push_back(group->permutation(g));
        } else {
            Permutation id(complex->num_vertices());
            for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
            images.push_back(id);
        }
    }
    return CellAction(std::move(group), std::move(complex), std::move(images));
}

std::vector<std::size_t> CellAction::act_on(std::size_t g, const std::vector<std::size_t>& cells) const {
    std::vector<std::size_t> out;
    for (std::size_t c : cells) out.push_back(act(g, c));
    std::sort(out.begin(), out.end());
    return out;
}

Subgroup CellAction::cell_stabilizer(std::size_t cell) const {
    return pointwise_stabilizer({cell}, "G_" + std::to_string(cell));
}

Subgroup CellAction::pointwise_stabilizer(const std::vector<std::size_t>& cells, std::string label) const {
    Subgroup s{{}, std::move(label)};
    for (std::size_t g = 0; g < group_->order(); ++g)
        if (std::all_of(cells.begin(), cells.end(), [&](std::size_t c) { return act(g, c) == c; }))
            s.elements.push_back(g);
    return s;
}

Subgroup CellAction::pointwise_ball_stabilizer(std::size_t x, std::size_t n) const {
    if (!complex_->is_tree()) throw NotATree();
    return pointwise_stabilizer(ball_cells(*complex_, x, n),
                                "Fix(B(" + std::to_string(x) + "," + std::to_string(n) + "))");
}

Subgroup CellAction::kernel() const {
    std::vector<std::size_t> all(complex_->size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return pointwise_stabilizer(all, "ker");
}

std::vector<std::size_t> CellAction::orbit_representatives() const {
    std::vector<std::size_t> reps;
    for (std::size_t c = 0; c < complex_->size(); ++c)
        if (orbit_rep_[c] == c) reps.push_back(c);
    return reps;
}

namespace {

struct RootedTree {
    std::vector<std::vector<std::size_t>> children;  // sorted by (code, index)
    std::vector<std::string> code;
};

// Rooted structure of the subtree at `root`, not crossing `blocked`.
void root_tree(const Complex& t, std::size_t root, std::size_t blocked, RootedTree& rt) {
    std::vector<std::size_t> order{root}, parent(t.num_vertices(), t.num_vertices());
    parent[root] = root;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t y : t.neighbours(order[i]))
            if (y != blocked && parent[y] == t.num_vertices()) {
                parent[y] = order[i];
                rt.children[order[i]].push_back(y);
                order.push_back(y);
            }
    for (std::size_t i = order.size(); i-- > 0;) {
        std::size_t v = order[i];
        auto& ch = rt.children[v];
        std::sort(ch.begin(), ch.end(), [&](std::size_t a, std::size_t b) {
            return rt.code[a] != rt.code[b] ? rt.code[a] < rt.code[b] : a < b;
        });
        std::string c = "(";
        for (std::size_t x : ch) c += rt.code[x];
        rt.code[v] = c + ")";
    }
}

void isomorphism(const RootedTree& rt, std::size_t a, std::size_t b, Permutation& p) {
    p[a] = b;
    const auto& ca = rt.children[a];
    const auto& cb = rt.children[b];
    for (std::size_t i = 0; i < ca.size(); ++i) isomorphism(rt, ca[i], cb[i], p);
}

Permutation identity_perm(std::size_t n) {
    Permutation p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    return p;
}

std::vector<std::size_t> tree_centres(const Complex& t) {
    std::vector<std::size_t> degree(t.num_vertices());
    std::vector<std::size_t> layer;
    for (std::size_t v = 0; v < t.num_vertices(); ++v) {
        degree[v] = t.neighbours(v).size();
        if (degree[v] <= 1) layer.push_back(v);
    }
    std::size_t remaining = t.num_vertices();
    while (remaining > 2) {
        remaining -= layer.size();
        std::vector<std::size_t> next;
        for (std::size_t v : layer)
            for (std::size_t y : t.neighbours(v))
                if (--degree[y] == 1) next.push_back(y);
        layer = std::move(next);
    }
    std::sort(layer.begin(), layer.end());
    return layer;
}

// Branch classes: children of v grouped by isomorphism type, each ascending.
std::vector<std::vector<std::size_t>> branch_classes(const RootedTree& rt, std::size_t v) {
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t c : rt.children[v]) {
        if (!classes.empty() && rt.code[classes.back().front()] == rt.code[c]) classes.back().push_back(c);
        else classes.push_back({c});
    }
    for (auto& cl : classes) std::sort(cl.begin(), cl.end());
    return classes;
}

template <class Emit>
void tree_generators(const Complex& tree, Emit emit_for_class) {
    if (!tree.is_tree()) throw NotATree();
    const std::size_t n = tree.num_vertices();
    RootedTree rt{std::vector<std::vector<std::size_t>>(n), std::vector<std::string>(n)};
    const auto centres = tree_centres(tree);
    if (centres.size() == 1) {
        root_tree(tree, centres[0], n, rt);
    } else {
        root_tree(tree, centres[0], centres[1], rt);
        root_tree(tree, centres[1], centres[0], rt);
    }
    for (std::size_t v = 0; v < n; ++v)
        for (const auto& cl : branch_classes(rt, v))
            if (cl.size() > 1) emit_for_class(rt, cl);
    if (centres.size() == 2 && rt.code[centres[0]] == rt.code[centres[1]]) emit_for_class(rt, centres);
}

}  // namespace

std::vector<Permutation> tree_automorphism_generators(const Complex& tree) {
    std::vector<Permutation> gens;
    const std::size_t n = tree.num_vertices();
    tree_generators(tree, [&](const RootedTree& rt, const std::vector<std::size_t>& cl) {
        for (std::size_t i = 0; i + 1 < cl.size(); ++i) {
            Permutation p = identity_perm(n);
            isomorphism(rt, cl[i], cl[i + 1], p);
            isomorphism(rt, cl[i + 1], cl[i], p);
            gens.push_back(std::move(p));
        }
    });
    return gens;
}

std::vector<Permutation> tree_rotation_generators(const Complex& tree) {
    std::vector<Permutation> gens;
    const std::size_t n = tree.num_vertices();
    tree_generators(tree, [&](const RootedTree& rt, const std::vector<std::size_t>& cl) {
        Permutation p = identity_perm(n);
        for (std::size_t i = 0; i < cl.size(); ++i) isomorphism(rt, cl[i], cl[(i + 1) % cl.size()], p);
        gens.push_back(std::move(p));
    });
    return gens;
}

}  // namespace equisplit
