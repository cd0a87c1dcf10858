#include "equisplit/representation.hpp"

#include <algorithm>
#include <deque>

#include "equisplit/errors.hpp"
#include "equisplit/rng.hpp"

namespace equisplit {

LinearRep::LinearRep(GroupPtr group, FieldSpec field, std::size_t dim, std::vector<Matrix> images)
    : group_(std::move(group)), field_(field), dim_(dim), images_(std::move(images)) {}

LinearRep LinearRep::checked(GroupPtr group, FieldSpec field, std::size_t dim, std::vector<Matrix> images) {
    const FiniteGroup& g = *group;
    if (images.size() != g.order()) throw InvalidRepresentation("need one matrix per group element");
    for (const auto& m : images)
        if (m.rows() != dim || m.cols() != dim || !(m.field() == field))
            throw InvalidRepresentation("representation matrix has wrong shape or field");
    if (!images[0].is_identity()) throw InvalidRepresentation("identity does not act as the identity");
    for (std::size_t s : g.generators()) {
        if (images[s].rank() != dim) throw InvalidRepresentation("generator image is not invertible");
        for (std::size_t x = 0; x < g.order(); ++x)
            if (images[s] * images[x] != images[g.mul(s, x)])
                throw InvalidRepresentation("rho(s) rho(g) != rho(s g) for generator " + std::to_string(s) +
                                            " and element " + std::to_string(x));
    }
    return LinearRep(std::move(group), field, dim, std::move(images));
}

LinearRep LinearRep::from_generator_images(GroupPtr group, FieldSpec field, std::size_t dim,
                                           const std::vector<Matrix>& generator_images,
                                           std::size_t max_entries) {
    const FiniteGroup& g = *group;
    if (generator_images.size() != g.generators().size())
        throw InvalidRepresentation("expected " + std::to_string(g.generators().size()) + " generator images");
    if (g.order() * dim * dim > max_entries)
        throw SizeLimit("representation table would exceed " + std::to_string(max_entries) + " entries");
    for (const auto& m : generator_images)
        if (m.rows() != dim || m.cols() != dim || !(m.field() == field))
            throw InvalidRepresentation("generator image has wrong shape or field");
    // Walk the word tree from the identity so parents come first.
    std::vector<std::vector<std::size_t>> children(g.order());
    for (std::size_t x = 1; x < g.order(); ++x) children[g.word_parent(x)].push_back(x);
    std::vector<Matrix> images(g.order());
    images[0] = Matrix::identity(field, dim);
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t x = queue.front();
        queue.pop_front();
        for (std::size_t y : children[x]) {
            images[y] = generator_images[g.word_generator(y)] * images[x];
            queue.push_back(y);
        }
    }
    return checked(std::move(group), field, dim, std::move(images));
}

LinearRep LinearRep::trivial(GroupPtr group, FieldSpec field) {
    std::vector<Matrix> images(group->order(), Matrix::identity(field, 1));
    return LinearRep(std::move(group), field, 1, std::move(images));
}

LinearRep LinearRep::regular(GroupPtr group, FieldSpec field, std::size_t max_entries) {
    const FiniteGroup& g = *group;
    const std::size_t n = g.order();
    if (n * n * n > max_entries)
        throw SizeLimit("regular representation of a group of order " + std::to_string(n) + " is too large");
    std::vector<Matrix> images;
    images.reserve(n);
    for (std::size_t x = 0; x < n; ++x) {
        std::vector<std::size_t> img(n);
        for (std::size_t h = 0; h < n; ++h) img[h] = g.mul(x, h);
        images.push_back(Matrix::permutation(field, img));
    }
    return LinearRep(std::move(group), field, n, std::move(images));
}

LinearRep LinearRep::permutation(const CellAction& action, FieldSpec field, const std::vector<std::size_t>& cells) {
    const FiniteGroup& g = action.group();
    std::vector<std::size_t> position(action.complex().size(), cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) position[cells.at(i)] = i;
    std::vector<Matrix> images;
    images.reserve(g.order());
    for (std::size_t x = 0; x < g.order(); ++x) {
        std::vector<std::size_t> img(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            img[i] = position[action.act(x, cells[i])];
            if (img[i] == cells.size()) throw InvalidRepresentation("cell list is not invariant under the group");
        }
        images.push_back(Matrix::permutation(field, img));
    }
    return LinearRep(action.group_ptr(), field, cells.size(), std::move(images));
}

LinearRep LinearRep::sign(GroupPtr group, FieldSpec field) {
    const FiniteGroup& g = *group;
    if (!g.has_permutations()) throw InvalidRepresentation("sign representation needs a permutation group");
    std::vector<Matrix> images;
    for (std::size_t x = 0; x < g.order(); ++x) {
        const Permutation& p = g.permutation(x);
        std::vector<bool> seen(p.size(), false);
        std::size_t transpositions = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (seen[i]) continue;
            std::size_t len = 0;
            for (std::size_t j = i; !seen[j]; j = p[j]) {
                seen[j] = true;
                ++len;
            }
            transpositions += len - 1;
        }
        images.push_back(Matrix::from_ints(field, 1, 1, {transpositions % 2 ? -1L : 1L}));
    }
    return LinearRep(std::move(group), field, 1, std::move(images));
}

LinearRep LinearRep::direct_sum(const LinearRep& a, const LinearRep& b) {
    if (a.group_ != b.group_ || !(a.field_ == b.field_))
        throw InvalidRepresentation("direct sum of representations of different groups or fields");
    std::vector<Matrix> images;
    for (std::size_t x = 0; x < a.group().order(); ++x) {
        Matrix m(a.field_, a.dim_ + b.dim_, a.dim_ + b.dim_);
        m.set_block(0, 0, a.rho(x));
        m.set_block(a.dim_, a.dim_, b.rho(x));
        images.push_back(std::move(m));
    }
    return LinearRep(a.group_, a.field_, a.dim_ + b.dim_, std::move(images));
}

LinearRep LinearRep::tensor(const LinearRep& a, const LinearRep& b) {
    if (a.group_ != b.group_ || !(a.field_ == b.field_))
        throw InvalidRepresentation("tensor product of representations of different groups or fields");
    const std::size_t n = a.dim_ * b.dim_;
    std::vector<Matrix> images;
    for (std::size_t x = 0; x < a.group().order(); ++x) {
        const Matrix& ma = a.rho(x);
        const Matrix& mb = b.rho(x);
        Matrix m(a.field_, n, n);
        for (std::size_t i = 0; i < a.dim_; ++i)
            for (std::size_t j = 0; j < a.dim_; ++j) {
                if (ma.is_zero_at(i, j)) continue;
                m.set_block(i * b.dim_, j * b.dim_, mb.scaled(ma.at(i, j)));
            }
        images.push_back(std::move(m));
    }
    return LinearRep(a.group_, a.field_, n, std::move(images));
}

LinearRep LinearRep::conjugated(const LinearRep& rep, const Matrix& c) {
    const Matrix c_inv = c.inverse();
    std::vector<Matrix> images;
    images.reserve(rep.group().order());
    for (std::size_t x = 0; x < rep.group().order(); ++x) images.push_back(c * rep.rho(x) * c_inv);
    return LinearRep(rep.group_, rep.field_, rep.dim_, std::move(images));
}

std::vector<Matrix> LinearRep::generator_images() const {
    std::vector<Matrix> out;
    for (std::size_t s : group_->generators()) out.push_back(rho(s));
    return out;
}

Matrix averaging_idempotent(const Subgroup& u, const LinearRep& rep) {
    if (rep.field().kills(u.order()))
        throw BadCharacteristic(u.label, u.order(), rep.field().characteristic(), u.elements);
    Matrix sum(rep.field(), rep.dim(), rep.dim());
    for (std::size_t x : u.elements) sum += rep.rho(x);
    return sum.scaled(Scalar(rep.field(), 1, static_cast<long>(u.order())));
}

Subspace fixed_subspace(const Subgroup& u, const LinearRep& rep) {
    std::vector<Matrix> parts;
    const Matrix id = Matrix::identity(rep.field(), rep.dim());
    for (std::size_t x : u.elements) parts.push_back(rep.rho(x) - id);
    if (parts.empty()) return Subspace::whole(rep.field(), rep.dim());
    return kernel(Matrix::vstack(parts));
}

Matrix random_unimodular(FieldSpec field, std::size_t n, std::mt19937_64& rng, std::size_t steps) {
    Matrix m = Matrix::identity(field, n);
    if (n < 2) return m;
    if (steps == 0) steps = 2 * n;
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t i = uniform_below(rng, n);
        std::size_t j = uniform_below(rng, n - 1);
        if (j >= i) ++j;
        const long k = uniform_below(rng, 2) ? 1 : -1;
        // row_i += k * row_j
        Matrix e = Matrix::identity(field, n);
        e.set(i, j, k);
        m = e * m;
    }
    return m;
}

}  // namespace equisplit
