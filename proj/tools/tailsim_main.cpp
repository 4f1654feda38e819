#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>

#include "tailsim/experiment.hpp"
#include "tailsim/generate.hpp"
#include "tailsim/matrix_market.hpp"
#include "tailsim/simulate.hpp"
#include "tailsim/swiftiles.hpp"
#include "tailsim/tiling.hpp"

namespace {

using namespace tailsim;

Count parse_k_text(const std::string& text) {
    if (text == "all") return kSampleAll;
    std::size_t used = 0;
    const long long k = std::stoll(text, &used);
    if (used != text.size() || k < 0)
        throw ConfigError("k must be a non-negative integer or 'all'");
    return k;
}

OperandRole parse_role(const std::string& text) {
    if (text == "a") return OperandRole::A;
    if (text == "b") return OperandRole::B;
    throw ConfigError("role must be 'a' or 'b'");
}

void write_or_print(const nlohmann::json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream file(out);
    if (!file) throw ConfigError("cannot write " + out);
    file << j.dump(2) << "\n";
    std::cout << "wrote " << out << "\n";
}

struct CommonWorkload {
    std::string source;
    std::string data_dir;

    void attach(CLI::App* cmd) {
        cmd->add_option("--workload", source,
                        "matrix market path or generator spec (e.g. "
                        "uniform:512x512:density=0.02,seed=1)")
            ->required();
        cmd->add_option("--data-dir", data_dir,
                        "directory for relative workload paths (default: $TAILSIM_DATA_DIR)");
    }

    SparseMatrix load() const { return load_workload(source, data_dir); }
};

int run(int argc, char** argv) {
    CLI::App app{"tiled sparse-matrix traffic simulator with overbooked buffers"};
    app.require_subcommand(1);

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "write a synthetic matrix to matrix market");
    std::string gen_spec, gen_out;
    gen_cmd->add_option("--spec", gen_spec, "generator spec")->required();
    gen_cmd->add_option("--out", gen_out, "output .mtx path")->required();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run one traffic simulation of A * A^T");
    CommonWorkload sim_wl;
    sim_wl.attach(sim_cmd);
    SimConfig sim_cfg;
    std::string sim_strategy = "swiftiles-overbook";
    std::string sim_idiom = "tailor";
    std::string sim_k = "10";
    std::string sim_out;
    sim_cmd->add_option("--capacity", sim_cfg.capacity, "buffer capacity in elements")
        ->required();
    sim_cmd->add_option("--fifo-region", sim_cfg.fifo_region,
                        "fifo slots at the buffer tail (default capacity/16)");
    sim_cmd->add_option("--strategy", sim_strategy,
                        "uniform-shape | prescient | swiftiles-overbook");
    sim_cmd->add_option("--idiom", sim_idiom, "buffet | tailor");
    sim_cmd->add_option("--y", sim_cfg.swiftiles.y, "target overbooking fraction");
    sim_cmd->add_option("--k", sim_k, "per-percent sample count, or 'all'");
    sim_cmd->add_option("--seed", sim_cfg.swiftiles.seed, "estimator sampling seed");
    sim_cmd->add_option("--bandwidth", sim_cfg.bandwidth, "words per cycle to the parent");
    sim_cmd->add_option("--compute-throughput", sim_cfg.compute_throughput,
                        "multiplies per cycle");
    sim_cmd->add_option("--metadata-factor", sim_cfg.metadata_factor,
                        "words transferred per element");
    sim_cmd->add_option("--out", sim_out, "write the report as JSON here");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment from a JSON config");
    std::string sweep_config, sweep_out_dir, sweep_data_dir;
    sweep_cmd->add_option("--config", sweep_config, "experiment config JSON")->required();
    sweep_cmd->add_option("--out-dir", sweep_out_dir, "override the config's out_dir");
    sweep_cmd->add_option("--data-dir", sweep_data_dir, "override the config's data_dir");

    // tile-stats
    auto* stats_cmd = app.add_subcommand("tile-stats", "occupancy distribution for a tile size");
    CommonWorkload stats_wl;
    stats_wl.attach(stats_cmd);
    Count stats_capacity = 0, stats_target = 0;
    std::string stats_role = "a";
    stats_cmd->add_option("--capacity", stats_capacity, "buffer capacity in elements")
        ->required();
    stats_cmd->add_option("--target", stats_target, "tile area (default: capacity)");
    stats_cmd->add_option("--role", stats_role, "operand role, a | b");

    // swiftiles
    auto* est_cmd = app.add_subcommand("swiftiles", "run the statistical tile-size estimator");
    CommonWorkload est_wl;
    est_wl.attach(est_cmd);
    SwiftilesConfig est_cfg;
    std::string est_k = "10";
    std::string est_role = "a";
    est_cmd->add_option("--capacity", est_cfg.buffer_capacity, "buffer capacity in elements")
        ->required();
    est_cmd->add_option("--y", est_cfg.y, "target overbooking fraction");
    est_cmd->add_option("--k", est_k, "per-percent sample count, or 'all'");
    est_cmd->add_option("--seed", est_cfg.seed, "sampling seed");
    est_cmd->add_option("--role", est_role, "operand role, a | b");

    // prescient
    auto* pre_cmd = app.add_subcommand("prescient", "exhaustive ladder search for a tile size");
    CommonWorkload pre_wl;
    pre_wl.attach(pre_cmd);
    Count pre_capacity = 0;
    std::string pre_role = "a";
    pre_cmd->add_option("--capacity", pre_capacity, "buffer capacity in elements")->required();
    pre_cmd->add_option("--role", pre_role, "operand role, a | b");

    CLI11_PARSE(app, argc, argv);

    if (gen_cmd->parsed()) {
        const GeneratorSpec spec = parse_generator_spec(gen_spec);
        save_matrix_market(generate(spec), gen_out);
        std::cout << "wrote " << gen_out << "\n";
        return 0;
    }
    if (sim_cmd->parsed()) {
        sim_cfg.strategy = parse_strategy(sim_strategy);
        sim_cfg.idiom = parse_buffer_idiom(sim_idiom);
        sim_cfg.swiftiles.k = parse_k_text(sim_k);
        const SparseMatrix a = sim_wl.load();
        const SparseMatrix b = transpose(a);
        const SimReport report = simulate(a, b, sim_cfg);
        write_or_print(report_to_json(report), sim_out);
        return 0;
    }
    if (sweep_cmd->parsed()) {
        std::ifstream file(sweep_config);
        if (!file) throw ConfigError("cannot read " + sweep_config);
        nlohmann::json j;
        file >> j;
        ExperimentSpec spec = parse_experiment_spec(j);
        if (!sweep_out_dir.empty()) spec.out_dir = sweep_out_dir;
        if (!sweep_data_dir.empty()) spec.data_dir = sweep_data_dir;
        const nlohmann::json summary = run_experiment(spec);
        if (spec.out_dir.empty()) {
            std::cout << summary.dump(2) << "\n";
        } else {
            std::cout << "wrote " << spec.out_dir << "/runs.csv and summary.json\n";
            std::cout << summary["geomean_ratio"].dump(2) << "\n";
        }
        return 0;
    }
    if (stats_cmd->parsed()) {
        const SparseMatrix m = stats_wl.load();
        if (stats_target == 0) stats_target = stats_capacity;
        const TileShape shape =
            size_to_shape(stats_target, parse_role(stats_role), m.rows(), m.cols());
        std::cout << to_json(tile_stats(m, shape, stats_capacity)).dump(2) << "\n";
        return 0;
    }
    if (est_cmd->parsed()) {
        est_cfg.k = parse_k_text(est_k);
        const SparseMatrix m = est_wl.load();
        const SwiftilesResult r = estimate_tile_size(m, est_cfg, parse_role(est_role));
        const nlohmann::json j{
            {"t_initial", r.t_initial},
            {"shape_initial",
             {{"rows", r.shape_initial.range_rows}, {"cols", r.shape_initial.range_cols}}},
            {"samples", r.samples.samples.size()},
            {"exhaustive", r.samples.exhaustive},
            {"q_y", r.q_y},
            {"t_target", r.t_target},
            {"shape_target",
             {{"rows", r.shape_target.range_rows}, {"cols", r.shape_target.range_cols}}}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (pre_cmd->parsed()) {
        const SparseMatrix m = pre_wl.load();
        const OperandRole role = parse_role(pre_role);
        const TileShape shape = prescient_tile_size(m, pre_capacity, role);
        const auto occ = occupancy_histogram(m, shape).samples;
        const Count max_occ = occ.empty() ? 0 : *std::max_element(occ.begin(), occ.end());
        const nlohmann::json j{
            {"shape", {{"rows", shape.range_rows}, {"cols", shape.range_cols}}},
            {"tile_area", shape.size()},
            {"total_tiles", static_cast<Count>(occ.size())},
            {"max_occupancy", max_occ},
            {"capacity", pre_capacity}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ContractError& e) {
        std::cerr << "internal contract violation: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
