#include "equisplit/matrix_io.hpp"

#include <cstdio>

#include "equisplit/errors.hpp"

namespace equisplit {

nlohmann::json to_json(const Matrix& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) entries.push_back(m.at(i, j).to_string());
    return {{"field", m.field().tag()}, {"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    try {
        const FieldSpec field = FieldSpec::parse(j.at("field").get<std::string>());
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        const auto& entries = j.at("entries");
        if (!entries.is_array() || entries.size() != rows * cols)
            throw ParseError("matrix entry count does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
        Matrix m(field, rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t c = 0; c < cols; ++c)
                m.set(i, c, Scalar::parse(field, entries[i * cols + c].get<std::string>()));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed matrix: ") + e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("malformed matrix: ") + e.what());
    }
}

nlohmann::json to_json(const Subspace& s) {
    return {{"ambient_dim", s.ambient_dim()}, {"dim", s.dim()}, {"basis", to_json(s.basis())}};
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace equisplit
