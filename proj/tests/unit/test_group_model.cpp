#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <random>
#include <set>

#include "equisplit/errors.hpp"
#include "equisplit/group.hpp"
#include "equisplit/level_family.hpp"
#include "equisplit/representation.hpp"
#include "equisplit/rng.hpp"

using namespace equisplit;

namespace {

const FieldSpec Q = FieldSpec::rationals();

struct Star {
    ComplexPtr complex;
    GroupPtr group;
    std::shared_ptr<CellAction> action;
};

// S3 permuting the three leaves of the 3-star (the (2,1) ball).
Star s3_star() {
    Star s;
    s.complex = std::make_shared<const Complex>(build_regular_tree_ball(2, 1));
    s.group = std::make_shared<const FiniteGroup>(
        FiniteGroup::from_permutations(4, {parse_cycles("(1 2 3)", 4), parse_cycles("(1 2)", 4)}));
    s.action = std::make_shared<CellAction>(CellAction::from_permutation_group(s.group, s.complex));
    return s;
}

Subgroup find_order(const FiniteGroup& g, std::size_t order) {
    for (const auto& u : all_subgroups(g))
        if (u.order() == order) return u;
    throw Error("no subgroup of that order");
}

std::vector<std::size_t> iota(std::size_t a, std::size_t b) {
    std::vector<std::size_t> v;
    for (std::size_t i = a; i < b; ++i) v.push_back(i);
    return v;
}

}  // namespace

TEST_CASE("cycle notation") {
    CHECK(parse_cycles("(0 1 2)(3 4)", 5) == Permutation{1, 2, 0, 4, 3});
    CHECK(parse_cycles("()", 3) == Permutation{0, 1, 2});
    CHECK(format_cycles(Permutation{1, 2, 0, 4, 3}) == "(0 1 2)(3 4)");
    CHECK_THROWS_AS(parse_cycles("(0 0)", 3), ParseError);
    CHECK_THROWS_AS(parse_cycles("(0 5)", 3), ParseError);
}

TEST_CASE("group closure and tables") {
    Star s = s3_star();
    const FiniteGroup& g = *s.group;
    CHECK(g.order() == 6);
    for (std::size_t a = 0; a < 6; ++a) {
        CHECK(g.mul(a, g.inverse(a)) == 0);
        for (std::size_t b = 0; b < 6; ++b)
            for (std::size_t c = 0; c < 6; ++c) CHECK(g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)));
    }
    CHECK(all_subgroups(g).size() == 6);

    std::vector<std::vector<std::size_t>> table(6, std::vector<std::size_t>(6));
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b) table[a][b] = g.mul(a, b);
    FiniteGroup from_table = FiniteGroup::from_table(table);
    CHECK(from_table.order() == 6);
    CHECK(all_subgroups(from_table).size() == 6);

    table[1][1] = table[1][2];
    CHECK_THROWS_AS(FiniteGroup::from_table(table), InvalidGroup);
}

TEST_CASE("cell stabilizers") {
    auto point = std::make_shared<const Complex>(build_regular_tree_ball(2, 0));
    auto triv = std::make_shared<const FiniteGroup>(FiniteGroup::trivial());
    CellAction a(triv, point, {Permutation{0}});
    CHECK(a.cell_stabilizer(0).is_trivial());

    Star s = s3_star();
    CHECK(s.action->cell_stabilizer(0).order() == 6);
    for (std::size_t leaf = 1; leaf < 4; ++leaf) CHECK(s.action->cell_stabilizer(leaf).order() == 2);
    // Orbit-stabilizer on every cell.
    for (std::size_t c = 0; c < s.complex->size(); ++c) {
        std::set<std::size_t> orbit;
        for (std::size_t g = 0; g < 6; ++g) orbit.insert(s.action->act(g, c));
        CHECK(orbit.size() * s.action->cell_stabilizer(c).order() == 6);
        const std::size_t rep = s.action->orbit_representative(c);
        CHECK(s.action->act(s.action->coset_representative(c), rep) == c);
    }
    CHECK(s.action->orbit_representatives() == std::vector<std::size_t>{0, 1, 4});
}

TEST_CASE("pointwise ball stabilizers") {
    Star s = s3_star();
    CHECK(s.action->pointwise_ball_stabilizer(0, 0).order() == 6);
    CHECK(s.action->pointwise_ball_stabilizer(0, 1).is_trivial());
    CHECK(s.action->pointwise_ball_stabilizer(1, 5) == s.action->kernel());

    auto c = std::make_shared<const Complex>(build_regular_tree_ball(2, 2));
    auto g = std::make_shared<const FiniteGroup>(FiniteGroup::from_permutations(10, tree_automorphism_generators(*c)));
    CHECK(g->order() == 48);
    CellAction a = CellAction::from_permutation_group(g, c);
    for (std::size_t x = 0; x < 10; ++x)
        for (std::size_t n = 0; n < 4; ++n) {
            const Subgroup u = a.pointwise_ball_stabilizer(x, n + 1);
            CHECK(u.is_subset_of(a.pointwise_ball_stabilizer(x, n)));
            for (std::size_t h = 0; h < g->order(); ++h)
                CHECK(conjugate_subgroup(*g, h, u) == a.pointwise_ball_stabilizer(a.act(h, x), n + 1));
        }
    CHECK(a.kernel().is_trivial());

    auto rot = std::make_shared<const FiniteGroup>(FiniteGroup::from_permutations(10, tree_rotation_generators(*c)));
    CHECK(rot->order() == 24);
}

TEST_CASE("averaging idempotents") {
    Star s = s3_star();
    const FiniteGroup& g = *s.group;
    LinearRep reg = LinearRep::regular(s.group, Q);
    CHECK(averaging_idempotent(trivial_subgroup(g), reg).is_identity());

    const Subgroup a3 = find_order(g, 3);
    Matrix e = averaging_idempotent(a3, reg);
    CHECK(is_idempotent(e));
    CHECK(e.rank() == 2);

    const FieldSpec f3 = FieldSpec::prime(3);
    LinearRep reg3 = LinearRep::regular(s.group, f3);
    try {
        averaging_idempotent(a3, reg3);
        FAIL("expected BadCharacteristic");
    } catch (const BadCharacteristic& bad) {
        CHECK(bad.subgroup_order() == 3);
        CHECK(bad.characteristic() == 3);
    }
}

TEST_CASE("averaging matches the independently computed fixed space") {
    Star s = s3_star();
    std::mt19937_64 rng(4);
    const LinearRep cells = LinearRep::permutation(*s.action, Q, iota(0, s.complex->size()));
    const LinearRep mixed = LinearRep::conjugated(
        LinearRep::tensor(LinearRep::sign(s.group, Q), cells), random_unimodular(Q, cells.dim(), rng));
    for (const LinearRep* rep : {&cells, &mixed})
        for (const Subgroup& u : all_subgroups(*s.group)) {
            Matrix e = averaging_idempotent(u, *rep);
            CHECK(is_idempotent(e));
            CHECK(image(e) == fixed_subspace(u, *rep));
            for (std::size_t h : u.elements) CHECK(rep->rho(h) * e == e);
        }
}

TEST_CASE("representations respect the group law") {
    Star s = s3_star();
    const FiniteGroup& g = *s.group;
    std::mt19937_64 rng(8);
    const LinearRep base = LinearRep::direct_sum(LinearRep::regular(s.group, Q), LinearRep::sign(s.group, Q));
    const LinearRep rep = LinearRep::conjugated(base, random_unimodular(Q, base.dim(), rng));
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b) CHECK(rep.rho(a) * rep.rho(b) == rep.rho(g.mul(a, b)));

    LinearRep rebuilt = LinearRep::from_generator_images(s.group, Q, rep.dim(), rep.generator_images());
    for (std::size_t a = 0; a < 6; ++a) CHECK(rebuilt.rho(a) == rep.rho(a));

    std::vector<Matrix> bad = rep.generator_images();
    bad[0] = Matrix::identity(Q, rep.dim());
    bad[0].set(0, 1, 1);
    CHECK_THROWS_AS(LinearRep::from_generator_images(s.group, Q, rep.dim(), bad), InvalidRepresentation);
}

TEST_CASE("level systems") {
    Star s = s3_star();
    const FiniteGroup& g = *s.group;

    std::vector<std::vector<Subgroup>> trivial_family(2, std::vector<Subgroup>(4, trivial_subgroup(g)));
    LevelFamily trivial(*s.action, trivial_family);
    CHECK(trivial.exhaustive());
    const LinearRep reg = LinearRep::regular(s.group, Q);
    for (const auto& level : build_level_system(*s.action, reg, trivial))
        for (const auto& e : level) CHECK(e.is_identity());

    LevelFamily balls = LevelFamily::ball_stabilizers(*s.action, 1, 0);
    for (const auto& level : build_level_system(*s.action, LinearRep::trivial(s.group, Q), balls))
        for (const auto& e : level) CHECK(e == Matrix::identity(Q, 1));

    const auto e = build_level_system(*s.action, reg, balls);
    CHECK(e[0][1].rank() == 3);
    CHECK(e[0][0].rank() == 1);

    const FieldSpec f2 = FieldSpec::prime(2);
    try {
        build_level_system(*s.action, LinearRep::regular(s.group, f2), balls);
        FAIL("expected BadCharacteristic");
    } catch (const BadCharacteristic& bad) {
        CHECK(bad.subgroup_order() % 2 == 0);
        CHECK(bad.subgroup_label() == "U[0][0]");
    }

    // Not nested.
    std::vector<std::vector<Subgroup>> rising{std::vector<Subgroup>(4, trivial_subgroup(g)),
                                              std::vector<Subgroup>(4, whole_group(g))};
    CHECK_THROWS_AS(LevelFamily(*s.action, rising), InconsistentSystem);
    // Not equivariant: a leaf stabilizer placed at every vertex.
    std::vector<std::vector<Subgroup>> lopsided{std::vector<Subgroup>(4, s.action->cell_stabilizer(1))};
    CHECK_THROWS_AS(LevelFamily(*s.action, lopsided), InconsistentSystem);

    LevelFamily ex = LevelFamily::exhaustive_ball_stabilizers(*s.action);
    CHECK(ex.exhaustive());
    CHECK(ex.num_levels() == 2);
}
