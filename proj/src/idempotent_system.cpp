#include "equisplit/idempotent_system.hpp"

#include <algorithm>

#include "equisplit/errors.hpp"
#include "equisplit/matrix_io.hpp"

namespace equisplit {

nlohmann::json ConsistencyReport::to_json() const {
    nlohmann::json j{{"vertex_idempotents", vertex_idempotents}, {"commuting_on_cells", commuting_on_cells}};
    j["path_condition"] = path_condition ? nlohmann::json(*path_condition) : nlohmann::json(nullptr);
    j["path_violations"] = path_violations;
    return j;
}

std::vector<Matrix> derive_cell_idempotents(const Complex& c, const std::vector<Matrix>& e) {
    std::vector<Matrix> out;
    out.reserve(c.size());
    for (std::size_t cell = 0; cell < c.size(); ++cell) {
        const auto& vs = c.vertices(cell);
        if (vs.size() == 1) {
            out.push_back(e.at(vs[0]));
            continue;
        }
        for (std::size_t a = 0; a < vs.size(); ++a)
            for (std::size_t b = a + 1; b < vs.size(); ++b)
                if (e[vs[a]] * e[vs[b]] != e[vs[b]] * e[vs[a]]) throw NonCommutingOnCell(cell);
        Matrix forward = e[vs[0]];
        for (std::size_t k = 1; k < vs.size(); ++k) forward = forward * e[vs[k]];
        Matrix backward = e[vs.back()];
        for (std::size_t k = vs.size() - 1; k-- > 0;) backward = backward * e[vs[k]];
        if (forward != backward || !is_idempotent(forward)) throw NonCommutingOnCell(cell);
        out.push_back(std::move(forward));
    }
    return out;
}

IdempotentSystem::IdempotentSystem(ComplexPtr complex, std::vector<Matrix> vertex_idempotents)
    : complex_(std::move(complex)) {
    const Complex& c = *complex_;
    if (vertex_idempotents.size() != c.num_vertices())
        throw InconsistentSystem("expected one idempotent per vertex");
    if (vertex_idempotents.empty()) throw InconsistentSystem("complex has no vertices");
    field_ = vertex_idempotents[0].field();
    dim_ = vertex_idempotents[0].rows();
    for (std::size_t x = 0; x < vertex_idempotents.size(); ++x) {
        const Matrix& m = vertex_idempotents[x];
        if (!(m.field() == field_) || m.rows() != dim_ || m.cols() != dim_)
            throw InconsistentSystem("vertex idempotent " + std::to_string(x) + " has the wrong shape or field");
        if (!is_idempotent(m)) throw InconsistentSystem("e_" + std::to_string(x) + " is not idempotent");
        images_.push_back(image(m));
        coimages_.push_back(Subspace::row_space(m));
    }
    cell_ = derive_cell_idempotents(c, vertex_idempotents);
}

void IdempotentSystem::check_path_condition() {
    const Complex& c = *complex_;
    if (!c.is_tree()) return;
    bool ok = true;
    report_.path_violations.clear();
    for (std::size_t x = 0; x < c.num_vertices(); ++x) {
        const auto dx = c.distances_from(x);
        for (std::size_t z = 0; z < c.num_vertices(); ++z) {
            if (z == x || dx[z] < 2) continue;
            const auto dz = c.distances_from(z);
            const Matrix xz = cell_[x] * cell_[z];
            for (std::size_t y = 0; y < c.num_vertices(); ++y) {
                if (y == x || y == z || dx[y] + dz[y] != dx[z]) continue;
                if (cell_[x] * cell_[y] * cell_[z] != xz) {
                    ok = false;
                    if (report_.path_violations.size() < 8) report_.path_violations.push_back({x, y, z});
                }
            }
        }
    }
    report_.path_condition = ok;
}

nlohmann::json IdempotentSystem::to_json() const {
    nlohmann::json mats = nlohmann::json::array();
    for (std::size_t x = 0; x < complex_->num_vertices(); ++x) mats.push_back(equisplit::to_json(cell_[x]));
    return {{"complex", complex_->hash()}, {"vertex_idempotents", mats}};
}

IdempotentSystem IdempotentSystem::from_json(ComplexPtr complex, const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("complex") || !j.contains("vertex_idempotents"))
        throw ParseError("idempotent system needs 'complex' and 'vertex_idempotents'");
    if (j.at("complex") != complex->hash()) throw ParseError("idempotent system refers to a different complex");
    std::vector<Matrix> e;
    for (const auto& m : j.at("vertex_idempotents")) e.push_back(matrix_from_json(m));
    return IdempotentSystem(std::move(complex), std::move(e));
}

Matrix alternating_sum(const IdempotentSystem& sys, const Subcomplex& s) {
    Matrix u(sys.field(), sys.dim(), sys.dim());
    // Subcomplex cells are sorted by index, which is (dim, index) order.
    for (std::size_t cell : s.cells()) {
        if (sys.complex().dim(cell) % 2 == 0)
            u += sys.cell_idempotent(cell);
        else
            u -= sys.cell_idempotent(cell);
    }
    return u;
}

Matrix support_projection(const IdempotentSystem& sys, const Subcomplex& s, Convexity convexity) {
    if (convexity == Convexity::Verify && !is_convex(s)) throw NotConvex();
    return alternating_sum(sys, s);
}

nlohmann::json SupportVerification::to_json() const {
    nlohmann::json j{{"idempotent", idempotent},
                     {"image_identity", image_identity},
                     {"kernel_identity", kernel_identity},
                     {"rank", rank},
                     {"image_sum_dim", image_sum_dim},
                     {"kernel_meet_dim", kernel_meet_dim}};
    j["convex"] = convex ? nlohmann::json(*convex) : nlohmann::json(nullptr);
    return j;
}

SupportVerification verify_support_projection(const IdempotentSystem& sys, const Subcomplex& s) {
    SupportVerification rec;
    if (sys.complex().is_tree()) rec.convex = is_convex(s);
    const Matrix u = alternating_sum(sys, s);
    rec.idempotent = is_idempotent(u);

    Subspace image_sum(sys.field(), sys.dim());
    std::vector<Matrix> coimage_rows;
    for (std::size_t x : s.vertices()) {
        image_sum = sum(image_sum, sys.vertex_image(x));
        if (sys.vertex_coimage(x).dim() > 0) coimage_rows.push_back(sys.vertex_coimage(x).basis());
    }
    const Subspace kernel_meet =
        coimage_rows.empty() ? Subspace::whole(sys.field(), sys.dim()) : kernel(Matrix::vstack(coimage_rows));

    const Subspace im_u = image(u);
    rec.rank = im_u.dim();
    rec.image_sum_dim = image_sum.dim();
    rec.kernel_meet_dim = kernel_meet.dim();
    rec.image_identity = im_u == image_sum;
    rec.kernel_identity = kernel(u) == kernel_meet;
    return rec;
}

std::optional<std::size_t> approximate_unit_check(const std::vector<std::vector<Matrix>>& levels, std::size_t x,
                                                  const Matrix& v) {
    for (std::size_t n = 0; n < levels.size(); ++n)
        if (levels[n].at(x) * v == v) return n;
    return std::nullopt;
}

}  // namespace equisplit
