#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace k2gen {

/// 1-based (row, column) order of a child among its K x K siblings.
struct SiblingOrder {
    int i = 1;
    int j = 1;

    bool operator==(const SiblingOrder&) const = default;
};

/// Root-to-node sequence of sibling orders, in unpruned coordinates.
/// The root itself has an empty path.
struct PositionPath {
    std::vector<SiblingOrder> orders;

    std::size_t length() const noexcept { return orders.size(); }
    bool empty() const noexcept { return orders.empty(); }
    /// True iff every step stays on the block diagonal (i == j).
    bool on_diagonal() const noexcept;

    bool operator==(const PositionPath&) const = default;
};

/// 1-based (row, column) block index of the submatrix reached by `path`:
/// p = sum_l K^(L-l) (i_l - 1) + 1, q likewise with j.
/// Throws InvalidArgument on an empty path or an order outside [1, K].
std::pair<std::int64_t, std::int64_t> node_position(const PositionPath& path, int k);

} // namespace k2gen
