#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace equisplit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotSquare : public Error {
public:
    NotSquare(std::size_t rows, std::size_t cols);
};

class AmbientMismatch : public Error {
public:
    AmbientMismatch(std::size_t a, std::size_t b);
};

class FieldMismatch : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class Singular : public Error {
public:
    Singular() : Error("matrix is singular") {}
};

class ParseError : public Error {
public:
    using Error::Error;
};

class NotATree : public Error {
public:
    NotATree() : Error("complex is not a tree") {}
};

class SizeLimit : public Error {
public:
    using Error::Error;
};

class NotConvex : public Error {
public:
    NotConvex() : Error("subcomplex is not convex") {}
};

class InvalidGroup : public Error {
public:
    using Error::Error;
};

class InvalidRepresentation : public Error {
public:
    using Error::Error;
};

/// A subgroup order is zero in the coefficient field, so averaging over it
/// is undefined. Carries the offending subgroup so callers can report it.
class BadCharacteristic : public Error {
public:
    BadCharacteristic(std::string subgroup_label, std::size_t subgroup_order,
                      std::uint32_t characteristic,
                      std::vector<std::size_t> elements = {});

    const std::string& subgroup_label() const { return label_; }
    std::size_t subgroup_order() const { return order_; }
    std::uint32_t characteristic() const { return characteristic_; }
    /// Element indices of the subgroup, when known.
    const std::vector<std::size_t>& elements() const { return elements_; }

private:
    std::string label_;
    std::size_t order_;
    std::uint32_t characteristic_;
    std::vector<std::size_t> elements_;
};

class NonCommutingOnCell : public Error {
public:
    explicit NonCommutingOnCell(std::size_t cell);
    std::size_t cell() const { return cell_; }

private:
    std::size_t cell_;
};

class InconsistentSystem : public Error {
public:
    using Error::Error;
};

class NotIncreasing : public Error {
public:
    explicit NotIncreasing(std::size_t level);
    std::size_t level() const { return level_; }

private:
    std::size_t level_;
};

class NotExhaustive : public Error {
public:
    NotExhaustive() : Error("top level composite is not the identity") {}
};

class NotFixed : public Error {
public:
    NotFixed() : Error("block function is not fixed by the subgroup") {}
};

class NotLocallyEquivariant : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace equisplit
