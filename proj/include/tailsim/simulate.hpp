#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailsim/scan_driver.hpp"
#include "tailsim/sparse_matrix.hpp"
#include "tailsim/swiftiles.hpp"
#include "tailsim/tiling.hpp"
#include "tailsim/types.hpp"

namespace tailsim {

// How tile sizes are chosen for both operands.
//   uniform-shape      tile area equals the buffer capacity, so even a fully
//                      dense tile fits; no overbooking ever.
//   prescient          largest ladder rung whose exhaustive worst-case
//                      occupancy fits; needs a full pre-pass over the tensor.
//   swiftiles-overbook statistical estimate that deliberately overbooks a
//                      fraction y of tiles.
enum class Strategy { UniformShape, Prescient, SwiftilesOverbook };

const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& text);

struct EnergyTable {
    double parent_access = 100.0;  // per word moved to/from the parent level
    double buffer_write = 2.0;     // per word written into an operand buffer
    double buffer_read = 1.0;      // per word read from an operand buffer
};

struct SimConfig {
    Count capacity = 0;     // per-operand buffer capacity, elements
    Count fifo_region = 0;  // 0 selects the default max(1, capacity/16)
    BufferIdiom idiom = BufferIdiom::Tailor;
    Strategy strategy = Strategy::SwiftilesOverbook;
    SwiftilesConfig swiftiles;  // buffer_capacity is overridden with `capacity`
    double bandwidth = 16.0;           // words per cycle to/from the parent
    double compute_throughput = 128.0;  // multiplies per cycle
    double metadata_factor = 2.0;       // words transferred per element (value + coords)
    EnergyTable energy;
    std::vector<Count> ladder;  // optional prescient candidate override

    Count resolved_fifo_region() const;
    void validate() const;
};

struct SwiftilesSummary {
    Count t_initial = 0;
    Count q_y = 0;
    Count t_target = 0;
    Count samples = 0;
    bool exhaustive = false;
};

struct SimReport {
    std::string strategy;
    std::string idiom;
    Index a_rows = 0, a_cols = 0, b_cols = 0;  // shared dimension is a_cols
    Count a_nnz = 0, b_nnz = 0;
    Count capacity = 0, fifo_region = 0;
    TileShape shape_a{1, 1}, shape_b{1, 1};
    Count tiles_a = 0, tiles_b = 0, pairs = 0;
    double overbooking_rate_a = 0.0, overbooking_rate_b = 0.0;
    ScanCounters a, b;
    Count output_elements = 0;
    Count effectual_multiplies = 0;
    double metadata_factor = 2.0;
    double cycles = 0.0, energy = 0.0;
    std::optional<SwiftilesSummary> swiftiles;

    Count parent_elements() const { return a.supplies() + b.supplies(); }
    double traffic_words() const {
        return static_cast<double>(parent_elements() + output_elements) * metadata_factor;
    }
    double reuse_fraction() const;
    double bumped_fraction() const;
};

// {bumped fraction of loaded tile elements, fraction of reads served from
// already-resident data}; the two should mirror each other.
std::pair<double, double> reuse_vs_bumped(const SimReport& r);

// All (a_tile, b_tile) pairs, A-stationary: a_tile outer in row-major tile
// order, b_tile inner. Both shapes must span the full shared dimension.
std::vector<std::pair<Count, Count>> build_schedule(const SparseMatrix& a,
                                                    const SparseMatrix& b, TileShape shape_a,
                                                    TileShape shape_b);

// Effectual multiplies between two windows sharing a K range: for each of
// the paired shared coordinates, (entries in that column of the A window) *
// (entries in that row of the B window), summed. Full windows give the
// effectual multiply count of the whole product.
Count intersect_count(const SparseMatrix& a, const SparseMatrix& b, const Window& wa,
                      const Window& wb);

// Nonzero count of A*B via a symbolic row-wise pass.
Count output_nonzeros(const SparseMatrix& a, const SparseMatrix& b);

// Runs the tiled SpMSpM traffic model: picks tile shapes per the strategy,
// then replays the schedule against one buffer per operand, counting parent
// supplies, reads and reuse. Within a pair the A tile is walked once and the
// B tile once per occupied A-tile row; pairs with an empty tile move no data.
SimReport simulate(const SparseMatrix& a, const SparseMatrix& b, const SimConfig& cfg);

}  // namespace tailsim
