#include "equisplit/resolution.hpp"

#include "equisplit/errors.hpp"

namespace equisplit {

BlockSpace::BlockSpace(const IdempotentSystem& sys) : ambient_(sys.dim()) {
    const std::size_t n = sys.complex().size();
    images_.reserve(n);
    for (std::size_t c = 0; c < n; ++c) {
        images_.push_back(image(sys.cell_idempotent(c)));
        bases_.push_back(images_.back().basis_columns());
        offsets_.push_back(total_);
        total_ += images_.back().dim();
    }
}

Matrix BlockSpace::block_of(std::size_t cell, const Matrix& f) const {
    return f.block(offsets_.at(cell), 0, rank(cell), f.cols());
}

FAction::FAction(const CellAction& action, const LinearRep& rep, const BlockSpace& space)
    : action_(action), rep_(rep), space_(space) {
    if (space.num_cells() != action.complex().size() || space.ambient_dim() != rep.dim())
        throw DimensionMismatch("block space does not match the action or representation");
    const std::size_t n = action.group().order() * space.num_cells();
    blocks_.resize(n);
    once_ = std::make_unique<std::once_flag[]>(n);
}

const Matrix& FAction::block(std::size_t g, std::size_t sigma) const {
    const std::size_t k = g * space_.num_cells() + sigma;
    std::call_once(once_[k], [&] {
        blocks_[k] = space_.coordinates(action_.act(g, sigma), rep_.rho(g) * space_.basis(sigma));
    });
    return blocks_[k];
}

Matrix FAction::apply(std::size_t g, const Matrix& f) const {
    Matrix out(f.field(), f.rows(), f.cols());
    for (std::size_t sigma = 0; sigma < space_.num_cells(); ++sigma) {
        if (space_.rank(sigma) == 0) continue;
        const std::size_t tau = action_.act(g, sigma);
        out.set_block(space_.offset(tau), 0, block(g, sigma) * space_.block_of(sigma, f));
    }
    return out;
}

Matrix FAction::dense(std::size_t g) const {
    Matrix out(rep_.field(), space_.dim(), space_.dim());
    for (std::size_t sigma = 0; sigma < space_.num_cells(); ++sigma)
        if (space_.rank(sigma) > 0)
            out.set_block(space_.offset(action_.act(g, sigma)), space_.offset(sigma), block(g, sigma));
    return out;
}

void FAction::verify() const {
    const FiniteGroup& g = action_.group();
    const auto& sys_cells = space_.num_cells();
    for (std::size_t s : g.generators())
        for (std::size_t sigma = 0; sigma < sys_cells; ++sigma) {
            const Matrix moved = rep_.rho(s) * space_.basis(sigma);
            if (image(moved) != image(space_.basis(action_.act(s, sigma))))
                throw InconsistentSystem("rho(g) does not map block " + std::to_string(sigma) +
                                         " onto block " + std::to_string(action_.act(s, sigma)));
        }
    for (std::size_t s : g.generators())
        for (std::size_t h : equivariance_elements(g))
            for (std::size_t sigma = 0; sigma < sys_cells; ++sigma)
                if (block(g.mul(s, h), sigma) != block(s, action_.act(h, sigma)) * block(h, sigma))
                    throw InconsistentSystem("F-action is not a homomorphism at cell " + std::to_string(sigma));
}

Matrix build_pi(const BlockSpace& space) {
    std::vector<Matrix> parts;
    for (std::size_t c = 0; c < space.num_cells(); ++c)
        if (space.rank(c) > 0) parts.push_back(space.basis(c));
    if (parts.empty()) return Matrix(space.basis(0).field(), space.ambient_dim(), 0);
    return Matrix::hstack(parts);
}

Matrix build_alpha(const IdempotentSystem& sys, const BlockSpace& space) {
    Matrix alpha(sys.field(), space.dim(), sys.dim());
    for (std::size_t c = 0; c < space.num_cells(); ++c) {
        if (space.rank(c) == 0) continue;
        const Matrix coords = space.coordinates(c, sys.cell_idempotent(c));
        alpha.add_block(space.offset(c), 0, coords, sys.complex().dim(c) % 2 ? -1 : 1);
    }
    return alpha;
}

std::vector<std::size_t> equivariance_elements(const FiniteGroup& g, std::size_t limit) {
    if (g.order() > limit) return g.generators();
    std::vector<std::size_t> all(g.order());
    for (std::size_t h = 0; h < g.order(); ++h) all[h] = h;
    return all;
}

bool pi_equivariant(const FAction& f, const Matrix& pi, const std::vector<std::size_t>& elements) {
    const BlockSpace& space = f.space();
    for (std::size_t g : elements)
        for (std::size_t sigma = 0; sigma < space.num_cells(); ++sigma) {
            if (space.rank(sigma) == 0) continue;
            const std::size_t tau = f.action().act(g, sigma);
            const Matrix lhs = f.rep().rho(g) * pi.block(0, space.offset(sigma), pi.rows(), space.rank(sigma));
            const Matrix rhs = pi.block(0, space.offset(tau), pi.rows(), space.rank(tau)) * f.block(g, sigma);
            if (lhs != rhs) return false;
        }
    return true;
}

bool alpha_equivariant(const FAction& f, const Matrix& alpha, const std::vector<std::size_t>& elements) {
    const BlockSpace& space = f.space();
    for (std::size_t g : elements)
        for (std::size_t sigma = 0; sigma < space.num_cells(); ++sigma) {
            if (space.rank(sigma) == 0) continue;
            const std::size_t tau = f.action().act(g, sigma);
            const Matrix lhs = f.block(g, sigma) * space.block_of(sigma, alpha);
            const Matrix rhs = space.block_of(tau, alpha) * f.rep().rho(g);
            if (lhs != rhs) return false;
        }
    return true;
}

LevelMaps build_level_maps(const IdempotentSystem& sys) {
    const BlockSpace space(sys);
    LevelMaps m;
    m.alpha = build_alpha(sys, space);
    m.pi = build_pi(space);
    m.q = m.pi * m.alpha;
    m.f_dim = space.dim();
    return m;
}

nlohmann::json AlphaPiVerification::to_json() const {
    return {{"q_idempotent", q_idempotent},
            {"image_identity", image_identity},
            {"matches_support_projection", matches_support_projection},
            {"f_action_valid", f_action_valid},
            {"alpha_equivariant", alpha_equivariant},
            {"pi_equivariant", pi_equivariant},
            {"exhaustive_in_g", exhaustive_in_g},
            {"f_dim", f_dim},
            {"q_rank", q_rank}};
}

AlphaPiVerification verify_alpha_pi(const IdempotentSystem& sys, const CellAction& action, const LinearRep& rep) {
    AlphaPiVerification rec;
    const BlockSpace space(sys);
    const Matrix alpha = build_alpha(sys, space);
    const Matrix pi = build_pi(space);
    const Matrix q = pi * alpha;
    rec.f_dim = space.dim();
    rec.q_idempotent = is_idempotent(q);
    const Subspace im_q = image(q);
    rec.q_rank = im_q.dim();
    Subspace image_sum(sys.field(), sys.dim());
    for (std::size_t x = 0; x < sys.complex().num_vertices(); ++x) image_sum = sum(image_sum, sys.vertex_image(x));
    rec.image_identity = im_q == image_sum;
    rec.matches_support_projection = q == alternating_sum(sys, Subcomplex::whole(sys.complex_ptr()));

    const FAction f(action, rep, space);
    try {
        f.verify();
        rec.f_action_valid = true;
    } catch (const InconsistentSystem&) {
        rec.f_action_valid = false;
    }
    const auto elements = equivariance_elements(action.group());
    rec.exhaustive_in_g = elements.size() == action.group().order();
    rec.alpha_equivariant = alpha_equivariant(f, alpha, elements);
    rec.pi_equivariant = pi_equivariant(f, pi, elements);
    return rec;
}

std::vector<Matrix> smooth_product_decomposition(const std::vector<Matrix>& q) {
    std::vector<Matrix> p;
    for (std::size_t n = 0; n < q.size(); ++n) {
        if (n == 0) {
            p.push_back(q[0]);
            continue;
        }
        if (q[n] * q[n - 1] != q[n - 1] || q[n - 1] * q[n] != q[n - 1]) throw NotIncreasing(n);
        p.push_back(q[n] - q[n - 1]);
    }
    return p;
}

MultiLevel multi_level_alpha(const std::vector<LevelMaps>& levels) {
    if (levels.empty()) throw NotExhaustive();
    std::vector<Matrix> q;
    for (const auto& l : levels) q.push_back(l.q);
    MultiLevel out;
    out.projectors = smooth_product_decomposition(q);
    if (!q.back().is_identity()) throw NotExhaustive();

    const FieldSpec field = q[0].field();
    const std::size_t n = q[0].rows();
    std::vector<Matrix> alpha_parts, pi_parts;
    std::size_t offset = 0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        out.offsets.push_back(offset);
        offset += levels[k].f_dim;
        const Matrix complement = k == 0 ? Matrix::identity(field, n) : Matrix::identity(field, n) - q[k - 1];
        alpha_parts.push_back(levels[k].alpha * complement);
        pi_parts.push_back(levels[k].pi);
    }
    out.alpha = Matrix::vstack(alpha_parts);
    out.pi = Matrix::hstack(pi_parts);
    if (!(out.pi * out.alpha).is_identity()) throw NotExhaustive();
    return out;
}

Subgroup stabilizer_of(const FAction& f, const Matrix& psi) {
    std::vector<std::size_t> elements;
    for (std::size_t g = 0; g < f.action().group().order(); ++g)
        if (f.apply(g, psi) == psi) elements.push_back(g);
    return Subgroup{elements, "Stab(psi)"};
}

Matrix pi_bar(const FAction& f, const Subgroup& u, const Matrix& psi) {
    for (std::size_t g : u.elements)
        if (f.apply(g, psi) != psi) throw NotFixed();
    const Matrix av = averaging_idempotent(u, f.rep());
    const BlockSpace& space = f.space();
    Matrix out(psi.field(), space.ambient_dim(), psi.cols());
    for (std::size_t sigma = 0; sigma < space.num_cells(); ++sigma)
        if (space.rank(sigma) > 0) out += av * (space.basis(sigma) * space.block_of(sigma, psi));
    return out;
}

Matrix pi_bar_via_cosets(const FAction& f, const Subgroup& u, const Subgroup& u_prime, const Matrix& psi) {
    const FiniteGroup& g = f.action().group();
    if (!u.is_subset_of(u_prime) || !is_normal_in(g, u, u_prime))
        throw InvalidGroup(u.label + " is not a normal subgroup of " + u_prime.label);
    const std::size_t index = u_prime.order() / u.order();
    if (f.rep().field().kills(index))
        throw BadCharacteristic(u_prime.label + "/" + u.label, index, f.rep().field().characteristic(),
                                u_prime.elements);
    for (std::size_t h : u_prime.elements)
        if (f.apply(h, psi) != psi) throw NotFixed();
    const Matrix inner = pi_bar(f, u, psi);
    // One representative per coset hU, the smallest element index.
    std::vector<bool> covered(g.order(), false);
    Matrix out(psi.field(), inner.rows(), inner.cols());
    for (std::size_t h : u_prime.elements) {
        if (covered[h]) continue;
        for (std::size_t k : u.elements) covered[g.mul(h, k)] = true;
        out += f.rep().rho(h) * inner;
    }
    return out.scaled(Scalar(psi.field(), 1, static_cast<long>(index)));
}

}  // namespace equisplit
