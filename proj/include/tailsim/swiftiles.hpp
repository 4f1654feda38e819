#pragma once

#include <limits>

#include "tailsim/tiling.hpp"

namespace tailsim {

// Sentinel k meaning "sample every tile".
inline constexpr Count kSampleAll = std::numeric_limits<Count>::max();

// Estimator parameters.
//   buffer_capacity - b, elements one operand buffer holds
//   y               - target fraction of overbooked tiles; y = 0 means
//                     "predict none" (exhaustive sampling, max-occupancy scaling)
//   k               - accuracy knob; the sample budget is ceil(k / y);
//                     k = 0 skips sampling (T_target = T_initial),
//                     kSampleAll samples exhaustively
//   seed            - drives tile selection only
struct SwiftilesConfig {
    Count buffer_capacity = 0;
    double y = 0.10;
    Count k = 10;
    Seed seed = 0;

    void validate() const;

    // ceil(k / y) capped at total_tiles; total_tiles when exhaustive.
    Count sample_budget(Count total_tiles) const;
};

struct SwiftilesResult {
    Count t_initial = 0;
    TileShape shape_initial;
    OccupancyDistribution samples;
    Count q_y = 0;
    Count t_target = 0;
    TileShape shape_target;
    OperandRole role = OperandRole::A;
};

// T_initial = round(b / s) for buffer capacity b and nonzero density s.
// s must be in (0, 1]; s = 0 (empty tensor) is an error. Callers clamp to
// the tensor size.
Count initial_estimate(Count buffer_capacity, double s);

// Occupancies of `n_samples` tiles of the grid of `m` under `shape`, chosen
// uniformly without replacement. A budget covering every tile degrades to
// the exhaustive histogram (flagged). The same seed reproduces the same
// tiles.
OccupancyDistribution sample_occupancies(const SparseMatrix& m, TileShape shape, Count n_samples,
                                         Seed seed);

// The descending order statistic at rank ceil(y * n), clamped to [1, n]:
// the smallest sampled occupancy that at most a y-fraction of samples
// strictly exceed. y = 0 gives the maximum, y = 1 the minimum.
Count quantile_qy(const OccupancyDistribution& dist, double y);

// T_target = round(T_initial * b / q_y), the capacity-utilization rescale of
// the initial estimate. q_y must be positive.
Count scale_target(Count t_initial, Count buffer_capacity, Count q_y);

// Full pipeline: density -> T_initial -> shape -> sampled occupancies ->
// Q_y -> T_target (clamped to [b, tensor size]; Q_y = 0 selects the maximal
// tile) -> realized shape under the K-first policy for `role`.
SwiftilesResult estimate_tile_size(const SparseMatrix& m, const SwiftilesConfig& cfg,
                                   OperandRole role = OperandRole::A);

}  // namespace tailsim
