#include "equisplit/errors.hpp"

#include <utility>

namespace equisplit {

NotSquare::NotSquare(std::size_t rows, std::size_t cols)
    : Error("matrix is not square: " + std::to_string(rows) + "x" +
            std::to_string(cols)) {}

AmbientMismatch::AmbientMismatch(std::size_t a, std::size_t b)
    : Error("ambient dimensions differ: " + std::to_string(a) + " vs " +
            std::to_string(b)) {}

BadCharacteristic::BadCharacteristic(std::string subgroup_label,
                                     std::size_t subgroup_order,
                                     std::uint32_t characteristic,
                                     std::vector<std::size_t> elements)
    : Error("bad characteristic: order " + std::to_string(subgroup_order) +
            " of subgroup " + subgroup_label + " is divisible by " +
            std::to_string(characteristic)),
      label_(std::move(subgroup_label)),
      order_(subgroup_order),
      characteristic_(characteristic),
      elements_(std::move(elements)) {}

NonCommutingOnCell::NonCommutingOnCell(std::size_t cell)
    : Error("vertex idempotents do not commute on cell " + std::to_string(cell)),
      cell_(cell) {}

NotIncreasing::NotIncreasing(std::size_t level)
    : Error("composite idempotents are not increasing at level " +
            std::to_string(level)),
      level_(level) {}

}  // namespace equisplit
