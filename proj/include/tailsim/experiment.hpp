#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "tailsim/simulate.hpp"
#include "tailsim/sparse_matrix.hpp"
#include "tailsim/types.hpp"

namespace tailsim {

// Sweep axis for an experiment. Y and K retune the estimator, Capacity
// resizes the buffers (negative K values select exhaustive sampling).
enum class SweepAxis { None, Y, K, Capacity };

const char* to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& text);

struct ExperimentSpec {
    std::vector<std::string> workloads;  // matrix market paths or generator specs
    std::vector<Strategy> strategies{Strategy::UniformShape, Strategy::Prescient,
                                     Strategy::SwiftilesOverbook};
    SimConfig base;
    SweepAxis axis = SweepAxis::None;
    std::vector<double> values;  // sweep points; ignored when axis == None
    std::vector<Seed> seeds{1};
    std::string out_dir;   // empty: nothing written
    std::string data_dir;  // empty: TAILSIM_DATA_DIR, then plain relative paths
};

ExperimentSpec parse_experiment_spec(const nlohmann::json& j);

// A workload source is either a generator spec ("uniform:256x256:density=0.05",
// optionally "gen:"-prefixed) or a matrix market path, resolved against
// data_dir when relative.
bool is_generator_source(const std::string& source);
SparseMatrix load_workload(const std::string& source, const std::string& data_dir);

nlohmann::json report_to_json(const SimReport& report);

// Runs every (workload, seed, sweep value, strategy) combination. Returns
// the summary (schema_version, per-run records, geomean traffic/cycles/
// energy ratios per strategy against the uniform-shape baseline) and, when
// out_dir is set, writes runs.csv and summary.json there. The CSV body is
// deterministic; the generation timestamp only appears in a comment line.
nlohmann::json run_experiment(const ExperimentSpec& spec);

struct TileStatsReport {
    TileShape shape{1, 1};
    Count total_tiles = 0;
    Count min_occupancy = 0;
    Count max_occupancy = 0;
    double mean_occupancy = 0.0;
    double stddev_occupancy = 0.0;
    Count p50 = 0, p90 = 0, p99 = 0;
    double overbook_rate = 0.0;          // fraction of tiles above capacity
    std::vector<std::pair<Count, Count>> histogram;  // occupancy -> tiles
};

TileStatsReport tile_stats(const SparseMatrix& m, TileShape shape, Count capacity);
nlohmann::json to_json(const TileStatsReport& r);

}  // namespace tailsim
