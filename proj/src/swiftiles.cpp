#include "tailsim/swiftiles.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "tailsim/rng.hpp"

namespace tailsim {

namespace {

// ceil() that forgives the upward drift of binary fractions (0.1 * 100 is a
// hair above 100), so integral ratios stay exact.
Count ceil_ratio(double x) { return static_cast<Count>(std::ceil(x - 1e-9)); }

}  // namespace

void SwiftilesConfig::validate() const {
    if (buffer_capacity < 1) throw ConfigError("buffer capacity must be at least 1");
    if (!(y >= 0.0 && y <= 1.0))
        throw ConfigError("target overbooking fraction y must be in [0, 1], got " +
                          std::to_string(y));
    if (k < 0) throw ConfigError("sample accuracy k must be non-negative");
}

Count SwiftilesConfig::sample_budget(Count total_tiles) const {
    if (k == kSampleAll || y == 0.0) return total_tiles;
    return std::min(total_tiles, ceil_ratio(static_cast<double>(k) / y));
}

Count initial_estimate(Count buffer_capacity, double s) {
    if (buffer_capacity < 1) throw ConfigError("buffer capacity must be at least 1");
    if (!(s > 0.0 && s <= 1.0)) {
        if (s == 0.0) throw ConfigError("cannot estimate a tile size for an empty tensor");
        throw ConfigError("density must be in (0, 1], got " + std::to_string(s));
    }
    return std::llround(static_cast<double>(buffer_capacity) / s);
}

OccupancyDistribution sample_occupancies(const SparseMatrix& m, TileShape shape, Count n_samples,
                                         Seed seed) {
    if (n_samples < 1) throw ContractError("sample count must be at least 1");
    const TileGrid grid = partition(m, shape);
    const Count total = grid.total_tiles();
    if (n_samples >= total) return occupancy_histogram(m, shape);

    // Partial Fisher-Yates over a virtual identity permutation: O(n_samples)
    // space, uniform without replacement.
    Rng rng(seed);
    std::unordered_map<Count, Count> moved;
    auto slot = [&](Count i) {
        const auto it = moved.find(i);
        return it == moved.end() ? i : it->second;
    };

    OccupancyDistribution dist;
    dist.shape = shape;
    dist.exhaustive = false;
    dist.samples.reserve(static_cast<std::size_t>(n_samples));
    for (Count i = 0; i < n_samples; ++i) {
        const Count j = i + static_cast<Count>(rng.below(static_cast<std::uint64_t>(total - i)));
        const Count tile = slot(j);
        moved[j] = slot(i);
        dist.samples.push_back(tile_occupancy(m, grid, tile));
    }
    return dist;
}

Count quantile_qy(const OccupancyDistribution& dist, double y) {
    if (dist.samples.empty()) throw ContractError("quantile of an empty sample set");
    if (!(y >= 0.0 && y <= 1.0))
        throw ContractError("quantile fraction must be in [0, 1], got " + std::to_string(y));
    const Count n = static_cast<Count>(dist.samples.size());
    const Count rank = std::clamp<Count>(ceil_ratio(y * static_cast<double>(n)), 1, n);

    std::vector<Count> sorted(dist.samples);
    auto nth = sorted.begin() + (rank - 1);
    std::nth_element(sorted.begin(), nth, sorted.end(), std::greater<Count>());
    return *nth;
}

Count scale_target(Count t_initial, Count buffer_capacity, Count q_y) {
    if (t_initial < 1) throw ContractError("initial estimate must be positive");
    if (q_y < 1) throw ContractError("scaling requires a positive occupancy quantile");
    return std::llround(static_cast<double>(t_initial) * static_cast<double>(buffer_capacity) /
                        static_cast<double>(q_y));
}

SwiftilesResult estimate_tile_size(const SparseMatrix& m, const SwiftilesConfig& cfg,
                                   OperandRole role) {
    cfg.validate();
    const Count tensor_size = static_cast<Count>(m.rows()) * static_cast<Count>(m.cols());
    const double s = density(m);
    if (s == 0.0) throw ConfigError("cannot estimate a tile size for an empty tensor");

    SwiftilesResult result;
    result.role = role;
    result.t_initial = std::clamp<Count>(initial_estimate(cfg.buffer_capacity, s), 1, tensor_size);
    result.shape_initial = size_to_shape(result.t_initial, role, m.rows(), m.cols());

    if (cfg.k == 0) {
        // Sampling disabled: fall back to the density-only estimate.
        result.q_y = cfg.buffer_capacity;
        result.t_target = result.t_initial;
        result.samples.shape = result.shape_initial;
        result.shape_target = result.shape_initial;
        return result;
    }

    const TileGrid grid = partition(m, result.shape_initial);
    const Count budget = cfg.sample_budget(grid.total_tiles());
    result.samples = sample_occupancies(m, result.shape_initial, budget, cfg.seed);
    result.q_y = quantile_qy(result.samples, cfg.y);

    if (result.q_y == 0) {
        // Even the quantile tile is empty; no finite rescale applies.
        result.t_target = tensor_size;
    } else {
        const Count lo = std::min(cfg.buffer_capacity, tensor_size);
        result.t_target = std::clamp(scale_target(result.t_initial, cfg.buffer_capacity,
                                                  result.q_y),
                                     lo, tensor_size);
    }
    result.shape_target = size_to_shape(result.t_target, role, m.rows(), m.cols());
    return result;
}

}  // namespace tailsim
