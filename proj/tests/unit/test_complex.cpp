#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <memory>
#include <random>

#include "equisplit/complex.hpp"
#include "equisplit/errors.hpp"

using namespace equisplit;

namespace {

ComplexPtr ball(std::size_t q, std::size_t r) { return std::make_shared<const Complex>(build_regular_tree_ball(q, r)); }

std::size_t count_dim(const Complex& c, std::size_t d) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < c.size(); ++i) n += c.dim(i) == d;
    return n;
}

}  // namespace

TEST_CASE("tree ball sizes") {
    auto b0 = ball(2, 0);
    CHECK(b0->num_vertices() == 1);
    CHECK(count_dim(*b0, 1) == 0);
    auto b1 = ball(2, 1);
    CHECK(b1->num_vertices() == 4);
    CHECK(count_dim(*b1, 1) == 3);
    auto b2 = ball(2, 2);
    CHECK(b2->num_vertices() == 10);
    CHECK(count_dim(*b2, 1) == 9);
    for (std::size_t q : {2, 3})
        for (std::size_t r = 0; r <= 4; ++r) {
            auto c = ball(q, r);
            std::size_t expected = 1, layer = q + 1;
            for (std::size_t k = 1; k <= r; ++k, layer *= q) expected += layer;
            CHECK(c->num_vertices() == expected);
            CHECK(tree_ball_vertex_count(q, r) == expected);
            CHECK(c->size() == 2 * expected - 1);
            CHECK(c->is_tree());
        }
    CHECK_THROWS_AS(build_regular_tree_ball(3, 6, 500), SizeLimit);
}

TEST_CASE("ball vertices lie within the radius") {
    auto c = ball(3, 2);
    const auto d = c->distances_from(0);
    for (std::size_t v = 0; v < c->num_vertices(); ++v) CHECK(d[v] <= 2);
    CHECK(c->neighbours(0).size() == 4);
}

TEST_CASE("convex hull examples") {
    auto c = ball(2, 2);
    CHECK(convex_hull_tree(c, {5}).cells() == std::vector<std::size_t>{5});
    const std::size_t leaf = c->neighbours(1).back();  // distance 2 from the centre
    Subcomplex edge = convex_hull_tree(c, {0, 1});
    CHECK(edge.vertices() == std::vector<std::size_t>{0, 1});
    CHECK(edge.size() == 3);
    Subcomplex path = convex_hull_tree(c, {0, leaf});
    CHECK(path.vertices().size() == 3);
    CHECK(path.size() == 5);

    auto cyc = std::make_shared<const Complex>(Complex::from_simplices(3, {{0, 1}, {1, 2}, {0, 2}}));
    CHECK_THROWS_AS(convex_hull_tree(cyc, {0}), NotATree);
}

TEST_CASE("convexity predicate") {
    auto c = ball(2, 2);
    CHECK(is_convex(Subcomplex(c, {3})));
    const std::size_t leaf = c->neighbours(1).back();
    CHECK_FALSE(is_convex(Subcomplex(c, {0, leaf})));
    CHECK(is_convex(Subcomplex::whole(c)));
    // Two adjacent vertices without their edge are not convex either.
    CHECK_FALSE(is_convex(Subcomplex(c, {0, 1})));

    auto tri = std::make_shared<const Complex>(Complex::from_simplices(3, {{0, 1, 2}}));
    CHECK_THROWS_AS(is_convex(Subcomplex::whole(tri)), NotATree);
}

TEST_CASE("convex hull is idempotent and monotone") {
    auto c = ball(3, 2);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t) {
        std::vector<std::size_t> a, b;
        for (std::size_t v = 0; v < c->num_vertices(); ++v) {
            const auto roll = rng() % 8;
            if (roll == 0) a.push_back(v);
            if (roll <= 1) b.push_back(v);
        }
        if (a.empty()) {
            a.push_back(0);
            b.insert(b.begin(), 0);
        }
        Subcomplex ha = convex_hull_tree(c, a);
        CHECK(convex_hull_tree(c, ha.vertices()) == ha);
        CHECK(is_convex(ha));
        Subcomplex hb = convex_hull_tree(c, b);
        for (std::size_t cell : ha.cells()) CHECK(hb.contains(cell));
    }
}

TEST_CASE("enumerating convex subcomplexes") {
    auto path = std::make_shared<const Complex>(Complex::from_simplices(2, {{0, 1}}));
    auto all = enumerate_convex_subcomplexes(path, 100);
    REQUIRE(all.size() == 3);
    CHECK(all[0].cells() == std::vector<std::size_t>{0});
    CHECK(all[1].cells() == std::vector<std::size_t>{0, 1, 2});
    CHECK(all[2].cells() == std::vector<std::size_t>{1});

    CHECK(enumerate_convex_subcomplexes(ball(2, 0), 100).size() == 1);

    auto b = ball(2, 1);
    auto subs = enumerate_convex_subcomplexes(b, 100);
    // Exhaustive oracle: the 4-vertex star has 4 singletons, 3 edges, 3
    // two-edge paths and the full star.
    CHECK(subs.size() == 11);
    for (std::size_t v = 0; v < 4; ++v)
        CHECK(std::find(subs.begin(), subs.end(), Subcomplex(b, {v})) != subs.end());
    CHECK(std::find(subs.begin(), subs.end(), Subcomplex::whole(b)) != subs.end());
    for (const auto& s : subs) CHECK(is_convex(s));
    CHECK(enumerate_convex_subcomplexes(b, 5).size() == 5);
}

TEST_CASE("subcomplexes are facet closed") {
    auto c = ball(2, 2);
    CHECK_THROWS_AS(Subcomplex(c, {c->num_vertices()}), Error);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        Subcomplex s = random_convex_subcomplex(c, rng);
        CHECK(is_convex(s));
        for (std::size_t cell : s.cells())
            for (std::size_t f : c->facets(cell)) CHECK(s.contains(f));
        if (s.size() > 1) {
            Subcomplex smaller = s.without(s.vertices().front());
            for (std::size_t cell : smaller.cells())
                for (std::size_t f : c->facets(cell)) CHECK(smaller.contains(f));
        }
    }
}

TEST_CASE("complex and subcomplex serialisation") {
    auto c = ball(3, 2);
    const auto text = c->to_json().dump();
    Complex back = Complex::from_json(nlohmann::json::parse(text));
    CHECK(back.hash() == c->hash());
    CHECK(back.to_json().dump() == text);
    Subcomplex s = convex_hull_tree(c, {2, 7});
    CHECK(Subcomplex::from_json(c, s.to_json()) == s);
    auto other = ball(2, 2);
    CHECK_THROWS_AS(Subcomplex::from_json(other, s.to_json()), ParseError);
}

TEST_CASE("simplicial complexes keep faces and dimensions") {
    Complex tri = Complex::from_simplices(3, {{0, 1, 2}});
    CHECK(tri.size() == 7);
    CHECK(tri.dimension() == 2);
    CHECK(tri.facets(6).size() == 3);
    CHECK(tri.is_face(0, 6));
    CHECK_FALSE(tri.is_tree());
}
