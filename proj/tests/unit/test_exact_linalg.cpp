#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "equisplit/errors.hpp"
#include "equisplit/matrix.hpp"
#include "equisplit/matrix_io.hpp"
#include "equisplit/rng.hpp"
#include "equisplit/subspace.hpp"

using namespace equisplit;

namespace {

const FieldSpec Q = FieldSpec::rationals();

Matrix random_matrix(FieldSpec f, std::size_t r, std::size_t c, std::mt19937_64& rng, long lo = -3, long hi = 3) {
    Matrix m(f, r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (uniform_below(rng, 3) != 0) m.set(i, j, uniform_int(rng, lo, hi));
    return m;
}

// Every vector in the F_p-span of the rows of m, as residue tuples. Pure
// enumeration over coefficient tuples; no elimination involved.
std::set<std::vector<std::uint32_t>> enumerate_span(const Matrix& m) {
    const std::uint32_t p = m.field().characteristic();
    std::set<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> coeff(m.rows(), 0);
    while (true) {
        std::vector<std::uint32_t> v(m.cols(), 0);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                v[j] = (v[j] + coeff[i] * m.residue_entries()[i * m.cols() + j]) % p;
        out.insert(v);
        std::size_t k = 0;
        while (k < coeff.size() && ++coeff[k] == p) coeff[k++] = 0;
        if (k == coeff.size()) break;
    }
    return out;
}

}  // namespace

TEST_CASE("rref examples") {
    CHECK(rref(Matrix::identity(Q, 3)) == Matrix::identity(Q, 3));
    CHECK(rref(Matrix::from_ints(Q, 2, 2, {2, 4, 1, 2})) == Matrix::from_ints(Q, 2, 2, {1, 2, 0, 0}));
    const FieldSpec f2 = FieldSpec::prime(2);
    CHECK(rref(Matrix::from_ints(f2, 2, 2, {1, 1, 1, 1})) == Matrix::from_ints(f2, 2, 2, {1, 1, 0, 0}));
}

TEST_CASE("rref is canonical and preserves the row space") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 40; ++t) {
        const FieldSpec f = t % 2 ? Q : FieldSpec::prime(7);
        Matrix m = random_matrix(f, 4, 5, rng);
        Matrix r = rref(m);
        CHECK(rref(r) == r);
        CHECK(Subspace::row_space(m) == Subspace::row_space(r));
        // Left-multiplying by an invertible matrix keeps the RREF.
        Matrix u = Matrix::identity(f, 4);
        u.set(0, 3, 2);
        u.set(2, 1, -1);
        CHECK(rref(u * m) == r);
    }
}

TEST_CASE("image and kernel examples") {
    CHECK(image(Matrix(Q, 3, 3)).is_zero());
    CHECK(kernel(Matrix::identity(Q, 3)).is_zero());
    const Subspace im = image(Matrix::diagonal(Q, {1, 0}));
    CHECK(im.dim() == 1);
    CHECK(im.basis() == Matrix::from_ints(Q, 1, 2, {1, 0}));
}

TEST_CASE("rank plus nullity equals column count") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 60; ++t) {
        const FieldSpec f = t % 3 == 0 ? FieldSpec::prime(3) : Q;
        const std::size_t r = 1 + uniform_below(rng, 5), c = 1 + uniform_below(rng, 6);
        Matrix m = random_matrix(f, r, c, rng);
        Subspace k = kernel(m);
        CHECK(image(m).dim() + k.dim() == c);
        CHECK((m * k.basis_columns()).is_zero());
    }
}

TEST_CASE("sum and intersection examples") {
    const Subspace v = Subspace::whole(Q, 3);
    CHECK(sum(v, Subspace(Q, 3)) == v);

    const Subspace e12 = Subspace::row_space(Matrix::from_ints(Q, 2, 3, {1, 0, 0, 0, 1, 0}));
    const Subspace e23 = Subspace::row_space(Matrix::from_ints(Q, 2, 3, {0, 1, 0, 0, 0, 1}));
    CHECK(intersect(e12, e23) == Subspace::row_space(Matrix::from_ints(Q, 1, 3, {0, 1, 0})));

    const Subspace e1 = Subspace::row_space(Matrix::from_ints(Q, 1, 2, {1, 0}));
    const Subspace e2 = Subspace::row_space(Matrix::from_ints(Q, 1, 2, {0, 1}));
    CHECK(sum(e1, e2) == Subspace::whole(Q, 2));

    CHECK_THROWS_AS(sum(e1, e12), AmbientMismatch);
    CHECK_THROWS_AS(intersect(e1, e12), AmbientMismatch);
}

TEST_CASE("intersection agrees with brute-force enumeration over F_3") {
    const FieldSpec f3 = FieldSpec::prime(3);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + uniform_below(rng, 3);
        Matrix a = random_matrix(f3, 1 + uniform_below(rng, 3), n, rng, 0, 2);
        Matrix b = random_matrix(f3, 1 + uniform_below(rng, 3), n, rng, 0, 2);
        const auto span_a = enumerate_span(a);
        const auto span_b = enumerate_span(b);
        std::set<std::vector<std::uint32_t>> common;
        for (const auto& v : span_a)
            if (span_b.count(v)) common.insert(v);

        const Subspace sa = Subspace::row_space(a), sb = Subspace::row_space(b);
        const Subspace meet = intersect(sa, sb);
        CHECK(enumerate_span(meet.basis()) == common);
        // Modular dimension law.
        CHECK(sa.dim() + sb.dim() == sum(sa, sb).dim() + meet.dim());
    }
}

TEST_CASE("modular law and canonical bases over Q") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 3 + uniform_below(rng, 4);
        Matrix a = random_matrix(Q, 1 + uniform_below(rng, n), n, rng);
        Matrix b = random_matrix(Q, 1 + uniform_below(rng, n), n, rng);
        const Subspace sa = Subspace::row_space(a), sb = Subspace::row_space(b);
        CHECK(sa.dim() + sb.dim() == sum(sa, sb).dim() + intersect(sa, sb).dim());
        CHECK(sum(sa, sb).contains(sa));
        CHECK(sa.contains(intersect(sa, sb)));
        // Same subspace from a different spanning set: identical stored basis.
        const Matrix parts[] = {a, a.row(0) + a.row(a.rows() - 1)};
        CHECK(Subspace::row_space(Matrix::vstack(parts)).basis() == sa.basis());
    }
}

TEST_CASE("idempotency predicate") {
    CHECK(is_idempotent(Matrix::identity(Q, 3)));
    CHECK(is_idempotent(Matrix::diagonal(Q, {1, 0})));
    CHECK_FALSE(is_idempotent(Matrix::from_ints(Q, 2, 2, {0, 1, 0, 0})));
    CHECK_THROWS_AS(is_idempotent(Matrix(Q, 2, 3)), NotSquare);
}

TEST_CASE("prime field arithmetic is exact modulo l") {
    const FieldSpec f5 = FieldSpec::prime(5);
    Matrix m = Matrix::from_ints(f5, 2, 2, {2, 3, 1, 1});
    Matrix inv = m.inverse();
    CHECK(m * inv == Matrix::identity(f5, 2));
    CHECK(Scalar(f5, 1, 2) == Scalar(f5, 3));
    CHECK_THROWS(Scalar(f5, 1, 5));
    CHECK_THROWS(FieldSpec::prime(6));
    CHECK(FieldSpec::parse("F7") == FieldSpec::prime(7));
    CHECK_THROWS_AS(FieldSpec::parse("F8"), Error);
}

TEST_CASE("rationals are stored in lowest terms") {
    Matrix m(Q, 1, 1);
    m.set(0, 0, 6, -4);
    CHECK(m.at(0, 0).to_string() == "-3/2");
    CHECK(Matrix::from_ints(Q, 2, 2, {1, 2, 3, 4}).inverse().at(0, 0).to_string() == "-2");
}

TEST_CASE("matrix serialisation round-trips bit-exactly") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const FieldSpec f = t % 2 ? Q : FieldSpec::prime(11);
        Matrix m = random_matrix(f, 3, 4, rng);
        if (f.is_rational()) m = m.scaled(Scalar(f, 1, 6));
        const std::string text = to_json(m).dump();
        const Matrix back = matrix_from_json(nlohmann::json::parse(text));
        CHECK(back == m);
        CHECK(to_json(back).dump() == text);
    }
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(
                        R"({"field":"Q","rows":1,"cols":1,"entries":["2/4"]})")),
                    ParseError);
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(
                        R"({"field":"F5","rows":1,"cols":2,"entries":["1"]})")),
                    ParseError);
}
