#include "tailsim/tiling.hpp"

#include <algorithm>

namespace tailsim {

namespace {

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

}  // namespace

TileGrid::TileGrid(Index matrix_rows, Index matrix_cols, TileShape shape)
    : matrix_rows_(matrix_rows), matrix_cols_(matrix_cols), shape_(shape) {
    if (shape.range_rows <= 0 || shape.range_cols <= 0)
        throw ContractError("tile shape ranges must be positive");
    if (matrix_rows <= 0 || matrix_cols <= 0)
        throw ContractError("cannot tile an empty matrix shape");
    tile_rows_ = ceil_div(matrix_rows, shape.range_rows);
    tile_cols_ = ceil_div(matrix_cols, shape.range_cols);
}

Window TileGrid::window(Count t) const {
    if (t < 0 || t >= total_tiles()) throw ContractError("tile index out of range");
    const Index tr = static_cast<Index>(t) / tile_cols_;
    const Index tc = static_cast<Index>(t) % tile_cols_;
    Window w;
    w.row_lo = tr * shape_.range_rows;
    w.row_hi = std::min(matrix_rows_, w.row_lo + shape_.range_rows);
    w.col_lo = tc * shape_.range_cols;
    w.col_hi = std::min(matrix_cols_, w.col_lo + shape_.range_cols);
    return w;
}

TileGrid partition(const SparseMatrix& m, TileShape shape) {
    return TileGrid(m.rows(), m.cols(), shape);
}

Count tile_occupancy(const SparseMatrix& m, const TileGrid& grid, Count t) {
    return m.count_in_window(grid.window(t));
}

OccupancyDistribution occupancy_histogram(const SparseMatrix& m, TileShape shape) {
    const TileGrid grid = partition(m, shape);
    OccupancyDistribution dist;
    dist.shape = shape;
    dist.exhaustive = true;
    dist.samples.reserve(static_cast<std::size_t>(grid.total_tiles()));
    for (Count t = 0; t < grid.total_tiles(); ++t)
        dist.samples.push_back(tile_occupancy(m, grid, t));
    return dist;
}

TileShape size_to_shape(Count target_size, OperandRole role, Index operand_rows,
                        Index operand_cols) {
    if (target_size < 1) throw ContractError("target tile size must be at least 1");
    if (operand_rows <= 0 || operand_cols <= 0)
        throw ContractError("operand shape must be positive");

    // Shared dimension: columns of A (M x K), rows of B (K x N).
    const Index k_extent = role == OperandRole::A ? operand_cols : operand_rows;
    const Index other_extent = role == OperandRole::A ? operand_rows : operand_cols;

    const Index range_k = std::min<Count>(target_size, k_extent);
    const Index range_other =
        std::clamp<Count>(target_size / range_k, Count{1}, Count{other_extent});

    if (role == OperandRole::A) return TileShape{range_other, range_k};
    return TileShape{range_k, range_other};
}

double overbooking_rate(const SparseMatrix& m, TileShape shape, Count capacity) {
    if (capacity < 1) throw ContractError("capacity must be at least 1");
    const TileGrid grid = partition(m, shape);
    Count over = 0;
    for (Count t = 0; t < grid.total_tiles(); ++t)
        if (tile_occupancy(m, grid, t) > capacity) ++over;
    return static_cast<double>(over) / static_cast<double>(grid.total_tiles());
}

std::vector<Count> default_ladder(Count capacity, Index rows, Index cols) {
    if (capacity < 1) throw ContractError("capacity must be at least 1");
    const Count full = static_cast<Count>(rows) * static_cast<Count>(cols);
    std::vector<Count> ladder;
    for (Count size = capacity; size < full; size *= 2) ladder.push_back(size);
    if (ladder.empty() || ladder.back() != full) ladder.push_back(std::max(capacity, full));
    return ladder;
}

TileShape prescient_tile_size(const SparseMatrix& m, Count capacity, OperandRole role,
                              const std::vector<Count>& ladder) {
    if (capacity < 1) throw ContractError("capacity must be at least 1");
    const std::vector<Count> rungs =
        ladder.empty() ? default_ladder(capacity, m.rows(), m.cols()) : ladder;

    bool found = false;
    Count best_size = 0;
    TileShape best_shape;
    for (Count size : rungs) {
        const TileShape shape = size_to_shape(size, role, m.rows(), m.cols());
        const OccupancyDistribution dist = occupancy_histogram(m, shape);
        const Count max_occ = *std::max_element(dist.samples.begin(), dist.samples.end());
        if (max_occ <= capacity && (!found || size > best_size)) {
            found = true;
            best_size = size;
            best_shape = shape;
        }
    }
    if (!found)
        throw ConfigError("no ladder size fits capacity " + std::to_string(capacity) +
                          "; include a rung no larger than the capacity");
    return best_shape;
}

}  // namespace tailsim
