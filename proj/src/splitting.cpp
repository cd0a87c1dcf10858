#include "equisplit/splitting.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "equisplit/errors.hpp"
#include "equisplit/matrix_io.hpp"
#include "equisplit/rng.hpp"

namespace equisplit {

namespace {


nlohmann::json rep_json(const LinearRep& rep) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& m : rep.generator_images()) gens.push_back(to_json(m));
    return {{"dim", rep.dim()}, {"generator_images", gens}};
}

RepPtr rep_from_json(const GroupPtr& group, FieldSpec field, const nlohmann::json& j) {
    std::vector<Matrix> gens;
    for (const auto& m : j.at("generator_images")) gens.push_back(matrix_from_json(m));
    return std::make_shared<const LinearRep>(
        LinearRep::from_generator_images(group, field, j.at("dim").get<std::size_t>(), gens));
}

// Per-level data on one representation: the system, its block space and
// F-action (which refer to each other, hence the stable heap slot).
struct Level {
    Level(IdempotentSystem s, const CellAction& action, const LinearRep& rep)
        : sys(std::move(s)), space(sys), f(action, rep, space) {
        alpha = build_alpha(sys, space);
        pi = build_pi(space);
    }
    IdempotentSystem sys;
    BlockSpace space;
    FAction f;
    Matrix alpha;
    Matrix pi;
};

struct LevelStack {
    std::vector<std::unique_ptr<Level>> levels;
    MultiLevel multi;
};

LevelStack prepare_levels(const CellAction& action, const LinearRep& rep, const LevelFamily& family) {
    LevelStack stack;
    std::vector<LevelMaps> maps;
    for (auto& sys : level_systems(action, rep, family)) {
        stack.levels.push_back(std::make_unique<Level>(std::move(sys), action, rep));
        const Level& l = *stack.levels.back();
        maps.push_back(LevelMaps{l.alpha, l.pi, l.pi * l.alpha, l.space.dim()});
    }
    stack.multi = multi_level_alpha(maps);
    return stack;
}

// Minimal-index g with g sigma = tau, for every tau in the orbit of sigma.
std::map<std::size_t, std::size_t> orbit_with_representatives(const CellAction& action, std::size_t sigma) {
    std::map<std::size_t, std::size_t> out;
    for (std::size_t g = 0; g < action.group().order(); ++g) out.emplace(action.act(g, sigma), g);
    return out;
}

std::size_t second_representative_factor(const Subgroup& k) { return k.elements.size() > 1 ? k.elements[1] : 0; }

void check(std::vector<std::pair<std::string, bool>>& transcript, std::string label, bool ok) {
    transcript.emplace_back(std::move(label), ok);
}

std::string cell_label(std::size_t c) { return "G_" + std::to_string(c); }

}  // namespace

void Extension::validate() const {
    if (!sub || !middle || !quotient) throw InvalidRepresentation("extension is missing a representation");
    if (sub->group_ptr() != middle->group_ptr() || quotient->group_ptr() != middle->group_ptr())
        throw InvalidRepresentation("extension mixes groups");
    if (i.rows() != middle->dim() || i.cols() != sub->dim() || p.rows() != quotient->dim() ||
        p.cols() != middle->dim())
        throw InvalidRepresentation("extension maps have the wrong shape");
    const std::size_t ri = i.rank(), rp = p.rank();
    if (ri != sub->dim()) throw InvalidRepresentation("i is not injective");
    if (rp != quotient->dim()) throw InvalidRepresentation("p is not surjective");
    if (!(p * i).is_zero()) throw InvalidRepresentation("p i != 0");
    if (ri + rp != middle->dim()) throw InvalidRepresentation("sequence is not exact in the middle");
    for (std::size_t g : equivariance_elements(middle->group())) {
        if (middle->rho(g) * i != i * sub->rho(g)) throw InvalidRepresentation("i is not equivariant");
        if (quotient->rho(g) * p != p * middle->rho(g)) throw InvalidRepresentation("p is not equivariant");
    }
}

nlohmann::json Extension::to_json() const {
    return {{"field", middle->field().tag()}, {"sub", rep_json(*sub)}, {"middle", rep_json(*middle)},
            {"quotient", rep_json(*quotient)}, {"i", equisplit::to_json(i)}, {"p", equisplit::to_json(p)}};
}

Extension Extension::from_json(GroupPtr group, const nlohmann::json& j) {
    try {
        const FieldSpec field = FieldSpec::parse(j.at("field").get<std::string>());
        Extension ext{rep_from_json(group, field, j.at("sub")), rep_from_json(group, field, j.at("middle")),
                      rep_from_json(group, field, j.at("quotient")), matrix_from_json(j.at("i")),
                      matrix_from_json(j.at("p"))};
        ext.validate();
        return ext;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("extension: ") + e.what());
    }
}

std::string Extension::hash() const { return fnv1a_hex(to_json().dump()); }

Extension extension_from_subspace(const RepPtr& rep, const Subspace& sub) {
    const FieldSpec field = rep->field();
    const std::size_t n = rep->dim(), k = sub.dim();
    const Matrix i = sub.basis_columns();
    const auto& pivots = sub.pivots();
    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : pivots) is_pivot[c] = true;
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) free.push_back(c);

    // p(w) = w_free - sum_j w_{pivot j} b_j[free]
    Matrix p(field, free.size(), n);
    Matrix s0(field, n, free.size());
    for (std::size_t r = 0; r < free.size(); ++r) {
        p.set(r, free[r], 1);
        s0.set(free[r], r, 1);
        for (std::size_t j = 0; j < k; ++j) {
            const Scalar b = sub.basis().at(j, free[r]);
            if (!(b == Scalar(field))) p.set(r, pivots[j], -b);
        }
    }
    std::vector<Matrix> sub_gens, quot_gens;
    for (const Matrix& g : rep->generator_images()) {
        sub_gens.push_back(sub.coordinates(g * i));
        quot_gens.push_back(p * g * s0);
    }
    const GroupPtr& group = rep->group_ptr();
    Extension ext{std::make_shared<const LinearRep>(LinearRep::from_generator_images(group, field, k, sub_gens)), rep,
                  std::make_shared<const LinearRep>(
                      LinearRep::from_generator_images(group, field, free.size(), quot_gens)),
                  i, p};
    return ext;
}

Extension random_extension(const CellAction& action, FieldSpec field, std::uint64_t seed,
                           const ExtensionOptions& options) {
    const GroupPtr& group = action.group_ptr();
    if (!options.allow_bad_field && field.kills(group->order()))
        throw BadCharacteristic("G", group->order(), field.characteristic(), whole_group(*group).elements);
    std::mt19937_64 rng = trial_rng(seed, 0);
    const Complex& c = action.complex();

    std::vector<std::size_t> vertices, edges;
    for (std::size_t x = 0; x < c.size(); ++x) (c.dim(x) == 0 ? vertices : edges).push_back(x);
    std::vector<LinearRep> pool;
    pool.push_back(LinearRep::permutation(action, field, vertices));
    if (!edges.empty()) pool.push_back(LinearRep::permutation(action, field, edges));
    pool.push_back(LinearRep::trivial(group, field));
    if (group->has_permutations()) {
        pool.push_back(LinearRep::sign(group, field));
        pool.push_back(LinearRep::tensor(pool.back(), pool.front()));
    }
    for (std::size_t rep_cell : action.orbit_representatives()) {
        std::vector<std::size_t> orbit;
        for (const auto& [cell, g] : orbit_with_representatives(action, rep_cell)) orbit.push_back(cell);
        if (orbit.size() > 1 && orbit.size() < c.size()) pool.push_back(LinearRep::permutation(action, field, orbit));
    }

    const std::size_t target = 3 + uniform_below(rng, std::max<std::size_t>(options.max_dim, 4) - 2);
    std::optional<LinearRep> w;
    std::vector<std::pair<std::size_t, std::size_t>> summands;  // (offset, dim)
    for (int attempts = 0; attempts < 64 && (!w || w->dim() < target); ++attempts) {
        const LinearRep& pick = pool[uniform_below(rng, pool.size())];
        const std::size_t have = w ? w->dim() : 0;
        if (have + pick.dim() > options.max_dim) continue;
        summands.emplace_back(have, pick.dim());
        w = w ? LinearRep::direct_sum(*w, pick) : pick;
    }
    if (!w) {
        w = pool[2];
        summands.emplace_back(0, 1);
    }
    const std::size_t n = w->dim();
    const Matrix conj = random_unimodular(field, n, rng);
    const RepPtr middle = std::make_shared<const LinearRep>(LinearRep::conjugated(*w, conj));

    // Seed vectors live in a random proper subset of the summands (all of
    // them when there is only one), then move with the conjugation.
    std::vector<bool> support(n, summands.size() == 1);
    if (summands.size() > 1) {
        const std::uint64_t mask = 1 + uniform_below(rng, (std::uint64_t{1} << summands.size()) - 2);
        for (std::size_t k = 0; k < summands.size(); ++k)
            if (mask >> k & 1)
                for (std::size_t j = 0; j < summands[k].second; ++j) support[summands[k].first + j] = true;
    }
    Subspace span(field, n);
    for (int attempts = 0; attempts < 32; ++attempts) {
        const std::size_t count = 1 + uniform_below(rng, 2);
        Matrix seeds(field, n, count);
        for (std::size_t r = 0; r < count; ++r)
            for (std::size_t j = 0; j < n; ++j)
                if (support[j] && uniform_below(rng, 2) == 0) seeds.set(j, r, uniform_int(rng, -2, 2));
        span = Subspace::column_space(conj * seeds);
        // Close under the generators.
        for (std::size_t prev = n + 1; prev != span.dim();) {
            prev = span.dim();
            std::vector<Matrix> parts{span.basis()};
            for (const Matrix& g : middle->generator_images()) parts.push_back((g * span.basis_columns()).transpose());
            span = Subspace::row_space(Matrix::vstack(parts));
        }
        if (span.dim() > 0 && span.dim() < n) break;
        // Widen the support if this subset keeps spanning everything or nothing.
        if (attempts == 15) std::fill(support.begin(), support.end(), true);
    }
    Extension ext = extension_from_subspace(middle, span);
    ext.validate();
    return ext;
}

Matrix canonical_section(const Matrix& p) {
    const EchelonForm e = echelon(p);
    if (e.pivots.size() != p.rows()) throw InvalidRepresentation("p is not surjective");
    const Matrix m = p.select_cols(e.pivots).inverse();
    Matrix t(p.field(), p.cols(), p.rows());
    for (std::size_t j = 0; j < e.pivots.size(); ++j) t.set_block(e.pivots[j], 0, m.row(j));
    return t;
}

Matrix canonical_retraction(const Matrix& i) { return canonical_section(i.transpose()).transpose(); }

Matrix local_equivariant_section(const Extension& ext, const Subgroup& k) {
    if (ext.middle->field().kills(k.order()))
        throw BadCharacteristic(k.label, k.order(), ext.middle->field().characteristic(), k.elements);
    const FiniteGroup& g = ext.middle->group();
    const Matrix t = canonical_section(ext.p);
    Matrix sum(t.field(), t.rows(), t.cols());
    for (std::size_t x : k.elements) sum += ext.middle->rho(x) * t * ext.quotient->rho(g.inverse(x));
    return sum.scaled(Scalar(t.field(), 1, static_cast<long>(k.order())));
}

Matrix local_equivariant_retraction(const Extension& ext, const Subgroup& k) {
    if (ext.middle->field().kills(k.order()))
        throw BadCharacteristic(k.label, k.order(), ext.middle->field().characteristic(), k.elements);
    const FiniteGroup& g = ext.middle->group();
    const Matrix u = canonical_retraction(ext.i);
    Matrix sum(u.field(), u.rows(), u.cols());
    for (std::size_t x : k.elements) sum += ext.sub->rho(x) * u * ext.middle->rho(g.inverse(x));
    return sum.scaled(Scalar(u.field(), 1, static_cast<long>(k.order())));
}

std::vector<std::pair<std::size_t, Matrix>> frobenius_lift(const FAction& f, std::size_t sigma,
                                                           const LinearRep& target, const Matrix& h) {
    const CellAction& action = f.action();
    const FiniteGroup& g = action.group();
    const Subgroup k = action.cell_stabilizer(sigma);
    for (std::size_t x : subgroup_generators(g, k))
        if (target.rho(x) * h != h * f.block(x, sigma))
            throw NotLocallyEquivariant("h is not " + k.label + "-equivariant");

    const std::size_t k1 = second_representative_factor(k);
    std::vector<std::pair<std::size_t, Matrix>> out;
    for (const auto& [tau, rep] : orbit_with_representatives(action, sigma)) {
        Matrix lift = target.rho(rep) * h * f.block(g.inverse(rep), tau);
        const std::size_t other = g.mul(rep, k1);
        if (target.rho(other) * h * f.block(g.inverse(other), tau) != lift)
            throw NotLocallyEquivariant("lift depends on the coset representative at cell " + std::to_string(tau));
        out.emplace_back(tau, std::move(lift));
    }
    return out;
}

std::vector<IdempotentSystem> level_systems(const CellAction& action, const LinearRep& rep,
                                            const LevelFamily& family) {
    std::vector<IdempotentSystem> out;
    for (auto& e : build_level_system(action, rep, family)) out.emplace_back(action.complex_ptr(), std::move(e));
    return out;
}

bool SplittingCertificate::all_passed() const {
    for (const auto& [label, ok] : transcript)
        if (!ok) return false;
    return !transcript.empty();
}

nlohmann::json SplittingCertificate::to_json() const {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& [label, ok] : transcript) t.push_back({{"check", label}, {"passed", ok}});
    return {{"kind", kind == Kind::Section ? "section" : "retraction"},
            {"map", equisplit::to_json(map)},
            {"scope", scope},
            {"transcript", t},
            {"extension_hash", extension_hash},
            {"complex_hash", complex_hash},
            {"map_hash", fnv1a_hex(equisplit::to_json(map).dump())}};
}

std::vector<std::pair<std::string, bool>> reverify_certificate(const SplittingCertificate& cert,
                                                               const Extension& ext) {
    std::vector<std::pair<std::string, bool>> out;
    const FiniteGroup& g = ext.middle->group();
    if (cert.kind == SplittingCertificate::Kind::Section) {
        const Matrix& s = cert.map;
        const bool shape = s.rows() == ext.middle->dim() && s.cols() == ext.quotient->dim();
        check(out, "section has shape dim W x dim W''", shape);
        if (!shape) return out;
        check(out, "p s = Id", (ext.p * s).is_identity());
        bool eq = true;
        for (std::size_t x = 0; x < g.order() && eq; ++x) eq = ext.middle->rho(x) * s == s * ext.quotient->rho(x);
        check(out, "rho_W(g) s = s rho_W''(g) for all g", eq);
    } else {
        const Matrix& r = cert.map;
        const bool shape = r.rows() == ext.sub->dim() && r.cols() == ext.middle->dim();
        check(out, "retraction has shape dim W' x dim W", shape);
        if (!shape) return out;
        check(out, "r i = Id", (r * ext.i).is_identity());
        bool eq = true;
        for (std::size_t x = 0; x < g.order() && eq; ++x) eq = ext.sub->rho(x) * r == r * ext.middle->rho(x);
        check(out, "rho_W'(g) r = r rho_W(g) for all g", eq);
    }
    return out;
}

SplittingCertificate construct_global_section(const Extension& ext, const CellAction& action,
                                              const LevelFamily& family) {
    ext.validate();
    SplittingCertificate cert;
    cert.kind = SplittingCertificate::Kind::Section;
    cert.scope = "global";
    cert.extension_hash = ext.hash();
    cert.complex_hash = action.complex().hash();

    const LevelStack stack = prepare_levels(action, *ext.quotient, family);
    check(cert.transcript, "pi alpha = Id on W'' (telescoping)", true);
    Matrix s(ext.p.field(), ext.middle->dim(), ext.quotient->dim());
    std::map<std::vector<std::size_t>, Matrix> local;
    for (std::size_t n = 0; n < stack.levels.size(); ++n) {
        const Level& level = *stack.levels[n];
        Matrix lift(s.field(), s.rows(), level.space.dim());
        for (std::size_t sigma : action.orbit_representatives()) {
            if (level.space.rank(sigma) == 0) continue;
            const Subgroup k = action.cell_stabilizer(sigma);
            auto it = local.find(k.elements);
            if (it == local.end()) {
                Matrix s_k = local_equivariant_section(ext, k);
                check(cert.transcript, "p s_K = Id for K = " + cell_label(sigma), (ext.p * s_k).is_identity());
                bool eq = true;
                for (std::size_t x : subgroup_generators(action.group(), k))
                    eq = eq && ext.middle->rho(x) * s_k == s_k * ext.quotient->rho(x);
                check(cert.transcript, "s_K is K-equivariant for K = " + cell_label(sigma), eq);
                it = local.emplace(k.elements, std::move(s_k)).first;
            }
            const Matrix h = it->second * level.space.basis(sigma);
            for (const auto& [tau, block] : frobenius_lift(level.f, sigma, *ext.middle, h))
                lift.set_block(0, level.space.offset(tau), block);
        }
        const std::string tag = "level " + std::to_string(n) + ": ";
        check(cert.transcript, tag + "p L = pi", ext.p * lift == level.pi);
        check(cert.transcript, tag + "p L alpha = pi alpha", ext.p * lift * level.alpha == level.pi * level.alpha);
        const Matrix alpha_n = stack.multi.alpha.block(stack.multi.offsets[n], 0, level.space.dim(),
                                                       stack.multi.alpha.cols());
        s += lift * alpha_n;
    }
    cert.map = std::move(s);
    for (auto& entry : reverify_certificate(cert, ext)) cert.transcript.push_back(std::move(entry));
    return cert;
}

namespace {

// Pieces r_n = pi^n E^n together with the projectors p_n of W'.
std::pair<std::vector<Matrix>, std::vector<Matrix>> build_retraction(const Extension& ext, const CellAction& action,
                                                                     const LevelFamily& family) {
    ext.validate();
    const LevelStack stack = prepare_levels(action, *ext.sub, family);
    const FiniteGroup& g = action.group();
    const FieldSpec field = ext.i.field();
    const std::size_t dv = ext.sub->dim();
    std::map<std::vector<std::size_t>, Matrix> local;
    std::vector<Matrix> pieces;
    for (std::size_t n = 0; n < stack.levels.size(); ++n) {
        const Level& level = *stack.levels[n];
        const Matrix complement =
            n == 0 ? Matrix::identity(field, dv)
                   : Matrix::identity(field, dv) - stack.levels[n - 1]->pi * stack.levels[n - 1]->alpha;
        Matrix r_n(field, dv, ext.middle->dim());
        for (std::size_t sigma : action.orbit_representatives()) {
            if (level.space.rank(sigma) == 0) continue;
            const Subgroup k = action.cell_stabilizer(sigma);
            auto it = local.find(k.elements);
            if (it == local.end()) it = local.emplace(k.elements, local_equivariant_retraction(ext, k)).first;
            const Matrix& r_k = it->second;
            Matrix beta = level.space.coordinates(sigma, level.sys.cell_idempotent(sigma) * complement);
            if (action.complex().dim(sigma) % 2) beta = -beta;
            const Matrix e0 = beta * r_k;
            for (std::size_t x : subgroup_generators(g, k))
                if (e0 * ext.middle->rho(x) != level.f.block(x, sigma) * e0)
                    throw NotLocallyEquivariant("local retraction component is not " + k.label + "-equivariant");
            const std::size_t k1 = second_representative_factor(k);
            for (const auto& [tau, rep] : orbit_with_representatives(action, sigma)) {
                const Matrix e_tau = level.f.block(rep, sigma) * e0 * ext.middle->rho(g.inverse(rep));
                const std::size_t other = g.mul(rep, k1);
                if (level.f.block(other, sigma) * e0 * ext.middle->rho(g.inverse(other)) != e_tau)
                    throw NotLocallyEquivariant("retraction depends on the coset representative at cell " +
                                                std::to_string(tau));
                r_n += level.space.basis(tau) * e_tau;
            }
        }
        pieces.push_back(std::move(r_n));
    }
    return {std::move(pieces), stack.multi.projectors};
}

}  // namespace

std::vector<Matrix> retraction_pieces(const Extension& ext, const CellAction& action, const LevelFamily& family) {
    return build_retraction(ext, action, family).first;
}

SplittingCertificate construct_global_retraction(const Extension& ext, const CellAction& action,
                                                 const LevelFamily& family) {
    SplittingCertificate cert;
    cert.kind = SplittingCertificate::Kind::Retraction;
    cert.scope = "global";
    cert.extension_hash = ext.hash();
    cert.complex_hash = action.complex().hash();
    // r_n i = p_n, the level-n summand of the smooth decomposition of W'.
    const auto [pieces, p] = build_retraction(ext, action, family);
    Matrix r(ext.i.field(), ext.sub->dim(), ext.middle->dim());
    for (std::size_t n = 0; n < pieces.size(); ++n) {
        check(cert.transcript, "level " + std::to_string(n) + ": r_n i = p_n", pieces[n] * ext.i == p[n]);
        r += pieces[n];
    }
    cert.map = std::move(r);
    for (auto& entry : reverify_certificate(cert, ext)) cert.transcript.push_back(std::move(entry));
    return cert;
}

}  // namespace equisplit
