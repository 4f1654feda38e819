#pragma once

#include <vector>

#include "tailsim/sparse_matrix.hpp"

namespace tailsim {

// Coordinate-space tile extents for one operand (rows x cols of the window).
struct TileShape {
    Index range_rows = 0;
    Index range_cols = 0;

    Count size() const { return range_rows * range_cols; }
    bool operator==(const TileShape&) const = default;
};

// The tile decomposition of one matrix under a fixed shape. Ragged edge
// tiles are kept; tiles are enumerated row-major.
class TileGrid {
public:
    TileGrid() = default;
    TileGrid(Index matrix_rows, Index matrix_cols, TileShape shape);

    Index tile_rows() const { return tile_rows_; }
    Index tile_cols() const { return tile_cols_; }
    Count total_tiles() const { return tile_rows_ * tile_cols_; }
    const TileShape& shape() const { return shape_; }

    // Window of tile `t` in row-major enumeration; edge tiles clamp to the
    // matrix boundary.
    Window window(Count t) const;

private:
    Index matrix_rows_ = 0;
    Index matrix_cols_ = 0;
    Index tile_rows_ = 0;
    Index tile_cols_ = 0;
    TileShape shape_;
};

// Tile occupancies drawn from one grid, either every tile (exhaustive) or a
// sample without replacement.
struct OccupancyDistribution {
    std::vector<Count> samples;
    TileShape shape;
    bool exhaustive = false;
};

// Grid for `m` under `shape`. Shape ranges must be positive; ranges larger
// than the matrix produce a single tile along that axis.
TileGrid partition(const SparseMatrix& m, TileShape shape);

// Stored entries inside tile `t` of the grid.
Count tile_occupancy(const SparseMatrix& m, const TileGrid& grid, Count t);

// Exhaustive occupancy of every tile, row-major order.
OccupancyDistribution occupancy_histogram(const SparseMatrix& m, TileShape shape);

// Converts a target tile size (elements of coordinate space) into a concrete
// shape, expanding along the shared dimension K first, then along N for the
// B operand or M for the A operand, clamping each range to the operand
// extent. The realized size never exceeds the target.
TileShape size_to_shape(Count target_size, OperandRole role, Index operand_rows,
                        Index operand_cols);

// Fraction of tiles (empty tiles included) whose occupancy exceeds
// `capacity`. capacity >= 1.
double overbooking_rate(const SparseMatrix& m, TileShape shape, Count capacity);

// Candidate tile sizes: capacity, 2*capacity, 4*capacity, ... capped by and
// ending with the full operand size.
std::vector<Count> default_ladder(Count capacity, Index rows, Index cols);

// Oracle tiling: evaluates every ladder size exhaustively and returns the
// shape of the largest size whose maximum tile occupancy fits in `capacity`.
// The smallest rung (size == capacity) always fits, since a tile can hold at
// most one entry per coordinate.
TileShape prescient_tile_size(const SparseMatrix& m, Count capacity, OperandRole role,
                              const std::vector<Count>& ladder = {});

}  // namespace tailsim
