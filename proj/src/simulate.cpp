#include "tailsim/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace tailsim {

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::UniformShape: return "uniform-shape";
        case Strategy::Prescient: return "prescient";
        case Strategy::SwiftilesOverbook: return "swiftiles-overbook";
    }
    return "?";
}

Strategy parse_strategy(const std::string& text) {
    if (text == "uniform-shape") return Strategy::UniformShape;
    if (text == "prescient") return Strategy::Prescient;
    if (text == "swiftiles-overbook") return Strategy::SwiftilesOverbook;
    throw ConfigError("unknown strategy '" + text +
                      "' (expected uniform-shape, prescient or swiftiles-overbook)");
}

Count SimConfig::resolved_fifo_region() const {
    if (fifo_region > 0) return fifo_region;
    return std::max<Count>(1, capacity / 16);
}

void SimConfig::validate() const {
    if (capacity < 1) throw ConfigError("buffer capacity must be at least 1");
    const Count f = resolved_fifo_region();
    if (f < 1 || f > capacity) throw ConfigError("fifo region must lie in [1, capacity]");
    if (bandwidth <= 0.0) throw ConfigError("bandwidth must be positive");
    if (compute_throughput <= 0.0) throw ConfigError("compute throughput must be positive");
    if (metadata_factor <= 0.0) throw ConfigError("metadata factor must be positive");
    if (strategy == Strategy::SwiftilesOverbook) {
        SwiftilesConfig sw = swiftiles;
        sw.buffer_capacity = capacity;
        sw.validate();
    }
}

double SimReport::reuse_fraction() const {
    const Count reads = a.reads + b.reads;
    if (reads == 0) return 1.0;
    return static_cast<double>(a.reuse_hits + b.reuse_hits) / static_cast<double>(reads);
}

double SimReport::bumped_fraction() const {
    const Count loaded = a.tile_elements + b.tile_elements;
    if (loaded == 0) return 0.0;
    return static_cast<double>(a.bumped + b.bumped) / static_cast<double>(loaded);
}

std::pair<double, double> reuse_vs_bumped(const SimReport& r) {
    return {r.bumped_fraction(), r.reuse_fraction()};
}

std::vector<std::pair<Count, Count>> build_schedule(const SparseMatrix& a,
                                                    const SparseMatrix& b, TileShape shape_a,
                                                    TileShape shape_b) {
    if (a.cols() != b.rows()) throw ContractError("operand shared dimensions differ");
    if (shape_a.range_cols != a.cols() || shape_b.range_rows != b.rows())
        throw ContractError("schedule requires tiles spanning the full shared dimension");
    const TileGrid ga(a.rows(), a.cols(), shape_a);
    const TileGrid gb(b.rows(), b.cols(), shape_b);
    std::vector<std::pair<Count, Count>> schedule;
    schedule.reserve(static_cast<std::size_t>(ga.total_tiles() * gb.total_tiles()));
    for (Count at = 0; at < ga.total_tiles(); ++at)
        for (Count bt = 0; bt < gb.total_tiles(); ++bt) schedule.emplace_back(at, bt);
    return schedule;
}

Count intersect_count(const SparseMatrix& a, const SparseMatrix& b, const Window& wa,
                      const Window& wb) {
    if (wa.cols() != wb.rows()) throw ContractError("windows pair unequal shared ranges");
    const Count k_span = wa.cols();
    std::vector<Count> a_per_k(static_cast<std::size_t>(k_span), 0);
    const auto& a_starts = a.row_starts();
    const auto& a_cols = a.col_indices();
    for (Index r = wa.row_lo; r < wa.row_hi; ++r) {
        const auto begin = a_cols.begin() + a_starts[static_cast<std::size_t>(r)];
        const auto end = a_cols.begin() + a_starts[static_cast<std::size_t>(r) + 1];
        auto lo = std::lower_bound(begin, end, wa.col_lo);
        auto hi = std::lower_bound(lo, end, wa.col_hi);
        for (auto it = lo; it != hi; ++it) ++a_per_k[static_cast<std::size_t>(*it - wa.col_lo)];
    }
    Count total = 0;
    const auto& b_starts = b.row_starts();
    const auto& b_cols = b.col_indices();
    for (Count k = 0; k < k_span; ++k) {
        const Count a_count = a_per_k[static_cast<std::size_t>(k)];
        if (a_count == 0) continue;
        const Index row = wb.row_lo + k;
        const auto begin = b_cols.begin() + b_starts[static_cast<std::size_t>(row)];
        const auto end = b_cols.begin() + b_starts[static_cast<std::size_t>(row) + 1];
        auto lo = std::lower_bound(begin, end, wb.col_lo);
        auto hi = std::lower_bound(lo, end, wb.col_hi);
        total += a_count * static_cast<Count>(hi - lo);
    }
    return total;
}

Count output_nonzeros(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols() != b.rows()) throw ContractError("operand shared dimensions differ");
    std::vector<Index> last_row(static_cast<std::size_t>(b.cols()), -1);
    const auto& a_starts = a.row_starts();
    const auto& a_cols = a.col_indices();
    const auto& b_starts = b.row_starts();
    const auto& b_cols = b.col_indices();
    Count total = 0;
    for (Index m = 0; m < a.rows(); ++m) {
        for (Count ia = a_starts[static_cast<std::size_t>(m)];
             ia < a_starts[static_cast<std::size_t>(m) + 1]; ++ia) {
            const Index k = a_cols[static_cast<std::size_t>(ia)];
            for (Count ib = b_starts[static_cast<std::size_t>(k)];
                 ib < b_starts[static_cast<std::size_t>(k) + 1]; ++ib) {
                const Index j = b_cols[static_cast<std::size_t>(ib)];
                if (last_row[static_cast<std::size_t>(j)] != m) {
                    last_row[static_cast<std::size_t>(j)] = m;
                    ++total;
                }
            }
        }
    }
    return total;
}

namespace {

struct StrategyChoice {
    TileShape shape_a{1, 1};
    TileShape shape_b{1, 1};
    std::optional<SwiftilesSummary> swiftiles;
};

StrategyChoice choose_shapes(const SparseMatrix& a, const SparseMatrix& b,
                             const SimConfig& cfg) {
    StrategyChoice out;
    switch (cfg.strategy) {
        case Strategy::UniformShape:
            out.shape_a = size_to_shape(cfg.capacity, OperandRole::A, a.rows(), a.cols());
            out.shape_b = size_to_shape(cfg.capacity, OperandRole::B, b.rows(), b.cols());
            break;
        case Strategy::Prescient:
            out.shape_a = prescient_tile_size(a, cfg.capacity, OperandRole::A, cfg.ladder);
            out.shape_b = prescient_tile_size(b, cfg.capacity, OperandRole::B, cfg.ladder);
            break;
        case Strategy::SwiftilesOverbook: {
            SwiftilesConfig sw = cfg.swiftiles;
            sw.buffer_capacity = cfg.capacity;
            const SwiftilesResult est = estimate_tile_size(a, sw, OperandRole::A);
            out.shape_a = est.shape_target;
            // One estimate steers both operands: A is stationary, so its
            // profile is the cheap one to take.
            out.shape_b = size_to_shape(est.t_target, OperandRole::B, b.rows(), b.cols());
            out.swiftiles = SwiftilesSummary{est.t_initial, est.q_y, est.t_target,
                                             static_cast<Count>(est.samples.samples.size()),
                                             est.samples.exhaustive};
            break;
        }
    }
    return out;
}

struct OperandTiles {
    std::vector<std::vector<Index>> elements;  // nonzero ordinals per tile
    std::vector<Count> occupied_rows;
};

OperandTiles gather_a_tiles(const SparseMatrix& a, const TileGrid& grid) {
    OperandTiles out;
    out.elements.resize(static_cast<std::size_t>(grid.total_tiles()));
    out.occupied_rows.assign(static_cast<std::size_t>(grid.total_tiles()), 0);
    const auto& starts = a.row_starts();
    for (Count t = 0; t < grid.total_tiles(); ++t) {
        const Window w = grid.window(t);
        auto& elems = out.elements[static_cast<std::size_t>(t)];
        elems.reserve(static_cast<std::size_t>(
            starts[static_cast<std::size_t>(w.row_hi)] -
            starts[static_cast<std::size_t>(w.row_lo)]));
        for (Index r = w.row_lo; r < w.row_hi; ++r) {
            const Count lo = starts[static_cast<std::size_t>(r)];
            const Count hi = starts[static_cast<std::size_t>(r) + 1];
            if (hi > lo) ++out.occupied_rows[static_cast<std::size_t>(t)];
            for (Count o = lo; o < hi; ++o) elems.push_back(o);
        }
    }
    return out;
}

std::vector<std::vector<Index>> gather_b_tiles(const SparseMatrix& b, const TileGrid& grid) {
    // One tile row (tiles span all of K), so the tile index is the column
    // band; a row-major pass gathers each tile in its scan order.
    std::vector<std::vector<Index>> tiles(static_cast<std::size_t>(grid.total_tiles()));
    const Count band = grid.shape().range_cols;
    const auto& starts = b.row_starts();
    const auto& cols = b.col_indices();
    for (Index r = 0; r < b.rows(); ++r) {
        for (Count o = starts[static_cast<std::size_t>(r)];
             o < starts[static_cast<std::size_t>(r) + 1]; ++o) {
            const Index tile = cols[static_cast<std::size_t>(o)] / band;
            tiles[static_cast<std::size_t>(tile)].push_back(o);
        }
    }
    return tiles;
}

}  // namespace

SimReport simulate(const SparseMatrix& a, const SparseMatrix& b, const SimConfig& cfg) {
    cfg.validate();
    if (a.cols() != b.rows()) throw ContractError("operand shared dimensions differ");
    if (cfg.capacity < a.cols())
        throw ConfigError(
            "buffer capacity smaller than the shared dimension; full-K tiles cannot fit "
            "even one coordinate per shared index");

    const StrategyChoice choice = choose_shapes(a, b, cfg);
    const Count fifo = cfg.resolved_fifo_region();

    SimReport report;
    report.strategy = to_string(cfg.strategy);
    report.idiom = to_string(cfg.idiom);
    report.a_rows = a.rows();
    report.a_cols = a.cols();
    report.b_cols = b.cols();
    report.a_nnz = a.nnz();
    report.b_nnz = b.nnz();
    report.capacity = cfg.capacity;
    report.fifo_region = fifo;
    report.shape_a = choice.shape_a;
    report.shape_b = choice.shape_b;
    report.metadata_factor = cfg.metadata_factor;
    report.swiftiles = choice.swiftiles;

    const TileGrid grid_a(a.rows(), a.cols(), choice.shape_a);
    const TileGrid grid_b(b.rows(), b.cols(), choice.shape_b);
    report.tiles_a = grid_a.total_tiles();
    report.tiles_b = grid_b.total_tiles();
    report.pairs = grid_a.total_tiles() * grid_b.total_tiles();
    report.overbooking_rate_a = overbooking_rate(a, choice.shape_a, cfg.capacity);
    report.overbooking_rate_b = overbooking_rate(b, choice.shape_b, cfg.capacity);

    const OperandTiles a_tiles = gather_a_tiles(a, grid_a);
    const std::vector<std::vector<Index>> b_tiles = gather_b_tiles(b, grid_b);
    Count nonempty_b = 0;
    for (const auto& t : b_tiles)
        if (!t.empty()) ++nonempty_b;

    TileScanDriver driver_a(cfg.idiom, cfg.capacity, fifo);
    TileScanDriver driver_b(cfg.idiom, cfg.capacity, fifo);
    for (Count at = 0; at < grid_a.total_tiles(); ++at) {
        const auto& elems = a_tiles.elements[static_cast<std::size_t>(at)];
        if (elems.empty() || nonempty_b == 0) continue;  // nothing to intersect
        driver_a.begin_tile(elems);
        driver_a.scan_repeat(nonempty_b);  // once per pair with a nonempty B tile
        driver_a.end_tile();
        const Count a_rows_occupied = a_tiles.occupied_rows[static_cast<std::size_t>(at)];
        for (Count bt = 0; bt < grid_b.total_tiles(); ++bt) {
            const auto& belems = b_tiles[static_cast<std::size_t>(bt)];
            if (belems.empty()) continue;
            driver_b.begin_tile(belems);  // B is reloaded for every pair
            driver_b.scan_repeat(a_rows_occupied);
            driver_b.end_tile();
        }
    }
    report.a = driver_a.counters();
    report.b = driver_b.counters();

    const Window full_a{0, a.rows(), 0, a.cols()};
    const Window full_b{0, b.rows(), 0, b.cols()};
    report.effectual_multiplies = intersect_count(a, b, full_a, full_b);
    report.output_elements = output_nonzeros(a, b);

    const double words = report.traffic_words();
    report.cycles = std::max(
        static_cast<double>(report.effectual_multiplies) / cfg.compute_throughput,
        words / cfg.bandwidth);
    const double supply_words =
        static_cast<double>(report.parent_elements()) * cfg.metadata_factor;
    const double read_words =
        static_cast<double>(report.a.reads + report.b.reads) * cfg.metadata_factor;
    report.energy = cfg.energy.parent_access * words + cfg.energy.buffer_write * supply_words +
                    cfg.energy.buffer_read * read_words;
    return report;
}

}  // namespace tailsim
