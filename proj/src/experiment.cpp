#include "tailsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "tailsim/generate.hpp"
#include "tailsim/matrix_market.hpp"

namespace tailsim {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// Generator specs carry commas; keep CSV cells intact.
std::string csv_label(const std::string& source) {
    std::string out = source;
    std::replace(out.begin(), out.end(), ',', ';');
    return out;
}

std::string k_to_string(Count k) {
    return k == kSampleAll ? std::string("all") : std::to_string(k);
}

}  // namespace

const char* to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::None: return "none";
        case SweepAxis::Y: return "y";
        case SweepAxis::K: return "k";
        case SweepAxis::Capacity: return "capacity";
    }
    return "?";
}

SweepAxis parse_sweep_axis(const std::string& text) {
    if (text == "none") return SweepAxis::None;
    if (text == "y") return SweepAxis::Y;
    if (text == "k") return SweepAxis::K;
    if (text == "capacity") return SweepAxis::Capacity;
    throw ConfigError("unknown sweep axis '" + text + "' (expected none, y, k or capacity)");
}

bool is_generator_source(const std::string& source) {
    std::string s = source;
    if (s.rfind("gen:", 0) == 0) return true;
    const auto colon = s.find(':');
    if (colon == std::string::npos) return false;
    const std::string kind = s.substr(0, colon);
    return kind == "uniform" || kind == "banded" || kind == "powerlaw";
}

SparseMatrix load_workload(const std::string& source, const std::string& data_dir) {
    if (is_generator_source(source)) return generate(parse_generator_spec(source));
    std::filesystem::path p(source);
    if (p.is_relative()) {
        std::string dir = data_dir;
        if (dir.empty()) {
            if (const char* env = std::getenv("TAILSIM_DATA_DIR")) dir = env;
        }
        if (!dir.empty()) p = std::filesystem::path(dir) / p;
    }
    return load_matrix_market(p.string());
}

nlohmann::json report_to_json(const SimReport& r) {
    auto counters = [](const ScanCounters& c) {
        return nlohmann::json{{"loads", c.loads},
                              {"overbooked_loads", c.overbooked_loads},
                              {"tile_elements", c.tile_elements},
                              {"first_fetch", c.first_fetch},
                              {"refetch", c.refetch},
                              {"supplies", c.supplies()},
                              {"reads", c.reads},
                              {"reuse_hits", c.reuse_hits},
                              {"bumped", c.bumped}};
    };
    nlohmann::json j{{"strategy", r.strategy},
                     {"idiom", r.idiom},
                     {"a_rows", r.a_rows},
                     {"a_cols", r.a_cols},
                     {"b_cols", r.b_cols},
                     {"a_nnz", r.a_nnz},
                     {"b_nnz", r.b_nnz},
                     {"capacity", r.capacity},
                     {"fifo_region", r.fifo_region},
                     {"shape_a", {{"rows", r.shape_a.range_rows}, {"cols", r.shape_a.range_cols}}},
                     {"shape_b", {{"rows", r.shape_b.range_rows}, {"cols", r.shape_b.range_cols}}},
                     {"tiles_a", r.tiles_a},
                     {"tiles_b", r.tiles_b},
                     {"pairs", r.pairs},
                     {"overbooking_rate_a", r.overbooking_rate_a},
                     {"overbooking_rate_b", r.overbooking_rate_b},
                     {"buffer_a", counters(r.a)},
                     {"buffer_b", counters(r.b)},
                     {"parent_elements", r.parent_elements()},
                     {"output_elements", r.output_elements},
                     {"effectual_multiplies", r.effectual_multiplies},
                     {"metadata_factor", r.metadata_factor},
                     {"traffic_words", r.traffic_words()},
                     {"reuse_fraction", r.reuse_fraction()},
                     {"bumped_fraction", r.bumped_fraction()},
                     {"cycles", r.cycles},
                     {"energy", r.energy}};
    if (r.swiftiles) {
        j["swiftiles"] = {{"t_initial", r.swiftiles->t_initial},
                          {"q_y", r.swiftiles->q_y},
                          {"t_target", r.swiftiles->t_target},
                          {"samples", r.swiftiles->samples},
                          {"exhaustive", r.swiftiles->exhaustive}};
    } else {
        j["swiftiles"] = nullptr;
    }
    return j;
}

namespace {

Count parse_k_value(const nlohmann::json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "all") return kSampleAll;
        throw ConfigError("k must be a non-negative integer or \"all\"");
    }
    const auto k = v.get<Count>();
    if (k < 0) throw ConfigError("k must be a non-negative integer or \"all\"");
    return k;
}

}  // namespace

ExperimentSpec parse_experiment_spec(const nlohmann::json& j) {
    static const std::vector<std::string> known{
        "workload",  "workloads", "strategy",           "strategies",      "idiom",
        "capacity",  "fifo_region", "y",                "k",               "seed",
        "seeds",     "bandwidth", "compute_throughput", "metadata_factor", "energy",
        "ladder",    "sweep",     "out_dir",            "data_dir"};
    for (const auto& item : j.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw ConfigError("unknown config key '" + item.key() + "'");
    }

    ExperimentSpec spec;
    if (j.contains("workloads")) {
        spec.workloads = j.at("workloads").get<std::vector<std::string>>();
    } else if (j.contains("workload")) {
        spec.workloads = {j.at("workload").get<std::string>()};
    }
    if (spec.workloads.empty()) throw ConfigError("no workloads given");

    if (j.contains("strategies")) {
        spec.strategies.clear();
        for (const auto& s : j.at("strategies")) spec.strategies.push_back(parse_strategy(s));
    } else if (j.contains("strategy")) {
        spec.strategies = {parse_strategy(j.at("strategy").get<std::string>())};
    }
    if (spec.strategies.empty()) throw ConfigError("no strategies given");

    if (!j.contains("capacity")) throw ConfigError("config requires 'capacity'");
    spec.base.capacity = j.at("capacity").get<Count>();
    spec.base.fifo_region = j.value("fifo_region", Count{0});
    if (j.contains("idiom")) spec.base.idiom = parse_buffer_idiom(j.at("idiom").get<std::string>());
    spec.base.swiftiles.y = j.value("y", 0.10);
    if (j.contains("k")) spec.base.swiftiles.k = parse_k_value(j.at("k"));
    spec.base.bandwidth = j.value("bandwidth", spec.base.bandwidth);
    spec.base.compute_throughput = j.value("compute_throughput", spec.base.compute_throughput);
    spec.base.metadata_factor = j.value("metadata_factor", spec.base.metadata_factor);
    if (j.contains("energy")) {
        const auto& e = j.at("energy");
        spec.base.energy.parent_access = e.value("parent_access", 100.0);
        spec.base.energy.buffer_write = e.value("buffer_write", 2.0);
        spec.base.energy.buffer_read = e.value("buffer_read", 1.0);
    }
    if (j.contains("ladder")) spec.base.ladder = j.at("ladder").get<std::vector<Count>>();

    if (j.contains("seeds")) {
        spec.seeds = j.at("seeds").get<std::vector<Seed>>();
    } else if (j.contains("seed")) {
        spec.seeds = {j.at("seed").get<Seed>()};
    }
    if (spec.seeds.empty()) throw ConfigError("no seeds given");

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        spec.axis = parse_sweep_axis(s.at("axis").get<std::string>());
        for (const auto& v : s.at("values")) {
            if (spec.axis == SweepAxis::K) {
                const Count k = parse_k_value(v);
                spec.values.push_back(k == kSampleAll ? -1.0 : static_cast<double>(k));
            } else {
                spec.values.push_back(v.get<double>());
            }
        }
        if (spec.axis != SweepAxis::None && spec.values.empty())
            throw ConfigError("sweep has no values");
    }

    spec.out_dir = j.value("out_dir", std::string{});
    spec.data_dir = j.value("data_dir", std::string{});
    return spec;
}

namespace {

struct RunRow {
    std::string workload;
    std::string strategy;
    double value = 0.0;
    Seed seed = 0;
    SimConfig cfg;
    SimReport report;
};

SimConfig config_for(const ExperimentSpec& spec, Strategy strategy, double value, Seed seed) {
    SimConfig cfg = spec.base;
    cfg.strategy = strategy;
    cfg.swiftiles.seed = seed;
    switch (spec.axis) {
        case SweepAxis::None: break;
        case SweepAxis::Y: cfg.swiftiles.y = value; break;
        case SweepAxis::K:
            cfg.swiftiles.k = value < 0 ? kSampleAll : static_cast<Count>(std::llround(value));
            break;
        case SweepAxis::Capacity: cfg.capacity = static_cast<Count>(std::llround(value)); break;
    }
    return cfg;
}

// Runs that ignore the estimator (and estimator runs with identical tuning)
// are deduplicated through this key.
std::string memo_key(const std::string& label, const SimConfig& cfg) {
    std::ostringstream key;
    key << label << '|' << to_string(cfg.strategy) << '|' << cfg.capacity << '|'
        << cfg.resolved_fifo_region() << '|' << to_string(cfg.idiom);
    if (cfg.strategy == Strategy::SwiftilesOverbook)
        key << '|' << fmt_double(cfg.swiftiles.y) << '|' << cfg.swiftiles.k << '|'
            << cfg.swiftiles.seed;
    return key.str();
}

const char* kCsvHeader =
    "workload,strategy,idiom,axis,value,seed,capacity,fifo_region,y,k,"
    "shape_a_rows,shape_a_cols,shape_b_rows,shape_b_cols,tiles_a,tiles_b,"
    "overbook_rate_a,overbook_rate_b,first_fetch_a,refetch_a,first_fetch_b,refetch_b,"
    "parent_elements,output_elements,traffic_words,effectual_multiplies,reads,"
    "reuse_hits,reuse_fraction,bumped_fraction,cycles,energy,t_initial,q_y,t_target,samples";

std::string csv_row(const RunRow& row, SweepAxis axis) {
    const SimReport& r = row.report;
    std::ostringstream out;
    out << row.workload << ',' << r.strategy << ',' << r.idiom << ',' << to_string(axis) << ','
        << fmt_double(row.value) << ',' << row.seed << ',' << r.capacity << ','
        << r.fifo_region << ',' << fmt_double(row.cfg.swiftiles.y) << ','
        << k_to_string(row.cfg.swiftiles.k) << ',' << r.shape_a.range_rows << ','
        << r.shape_a.range_cols << ',' << r.shape_b.range_rows << ',' << r.shape_b.range_cols
        << ',' << r.tiles_a << ',' << r.tiles_b << ',' << fmt_double(r.overbooking_rate_a)
        << ',' << fmt_double(r.overbooking_rate_b) << ',' << r.a.first_fetch << ','
        << r.a.refetch << ',' << r.b.first_fetch << ',' << r.b.refetch << ','
        << r.parent_elements() << ',' << r.output_elements << ','
        << fmt_double(r.traffic_words()) << ',' << r.effectual_multiplies << ','
        << (r.a.reads + r.b.reads) << ',' << (r.a.reuse_hits + r.b.reuse_hits) << ','
        << fmt_double(r.reuse_fraction()) << ',' << fmt_double(r.bumped_fraction()) << ','
        << fmt_double(r.cycles) << ',' << fmt_double(r.energy);
    if (r.swiftiles) {
        out << ',' << r.swiftiles->t_initial << ',' << r.swiftiles->q_y << ','
            << r.swiftiles->t_target << ',' << r.swiftiles->samples;
    } else {
        out << ",,,,";
    }
    return out.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

nlohmann::json run_experiment(const ExperimentSpec& spec) {
    std::vector<std::pair<std::string, SparseMatrix>> workloads;
    workloads.reserve(spec.workloads.size());
    for (const auto& source : spec.workloads) {
        SparseMatrix m = load_workload(source, spec.data_dir);
        // Reports model A * A^T so every workload is self-paired.
        workloads.emplace_back(csv_label(source), std::move(m));
    }

    std::vector<double> values = spec.values;
    if (spec.axis == SweepAxis::None) values = {0.0};

    std::map<std::string, SimReport> memo;
    std::vector<RunRow> rows;
    for (const auto& [label, matrix] : workloads) {
        const SparseMatrix b = transpose(matrix);
        for (const double value : values) {
            for (const Seed seed : spec.seeds) {
                for (const Strategy strategy : spec.strategies) {
                    RunRow row;
                    row.workload = label;
                    row.strategy = to_string(strategy);
                    row.value = value;
                    row.seed = seed;
                    row.cfg = config_for(spec, strategy, value, seed);
                    const std::string key = memo_key(label, row.cfg);
                    auto it = memo.find(key);
                    if (it == memo.end())
                        it = memo.emplace(key, simulate(matrix, b, row.cfg)).first;
                    row.report = it->second;
                    rows.push_back(std::move(row));
                }
            }
        }
    }

    // Geomean of metric ratios against the uniform-shape run of the same
    // (workload, value, seed) cell.
    const auto geomeans = [&](auto metric) {
        std::map<std::string, std::pair<double, Count>> acc;  // strategy -> {sum log, n}
        for (const auto& row : rows) {
            if (row.strategy == to_string(Strategy::UniformShape)) continue;
            const RunRow* base = nullptr;
            for (const auto& other : rows) {
                if (other.workload == row.workload && other.value == row.value &&
                    other.seed == row.seed &&
                    other.strategy == to_string(Strategy::UniformShape)) {
                    base = &other;
                    break;
                }
            }
            if (!base) continue;
            const double num = metric(row.report);
            const double den = metric(base->report);
            if (num <= 0.0 || den <= 0.0) continue;
            auto& slot = acc[row.strategy];
            slot.first += std::log(num / den);
            ++slot.second;
        }
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [strategy, slot] : acc)
            out[strategy] = std::exp(slot.first / static_cast<double>(slot.second));
        return out;
    };

    nlohmann::json summary{
        {"schema_version", 1},
        {"axis", to_string(spec.axis)},
        {"values", values},
        {"seeds", spec.seeds},
        {"workloads", nlohmann::json::array()},
        {"config",
         {{"capacity", spec.base.capacity},
          {"fifo_region", spec.base.resolved_fifo_region()},
          {"idiom", to_string(spec.base.idiom)},
          {"y", spec.base.swiftiles.y},
          {"k", k_to_string(spec.base.swiftiles.k)},
          {"bandwidth", spec.base.bandwidth},
          {"compute_throughput", spec.base.compute_throughput},
          {"metadata_factor", spec.base.metadata_factor},
          {"energy",
           {{"parent_access", spec.base.energy.parent_access},
            {"buffer_write", spec.base.energy.buffer_write},
            {"buffer_read", spec.base.energy.buffer_read}}}}},
        {"runs", nlohmann::json::array()},
        {"baseline_strategy", to_string(Strategy::UniformShape)},
    };
    for (const auto& [label, matrix] : workloads) {
        summary["workloads"].push_back(
            {{"source", label}, {"rows", matrix.rows()}, {"cols", matrix.cols()},
             {"nnz", matrix.nnz()}, {"density", density(matrix)}});
    }
    for (const auto& row : rows) {
        nlohmann::json run = report_to_json(row.report);
        run["workload"] = row.workload;
        run["axis"] = to_string(spec.axis);
        run["value"] = row.value;
        run["seed"] = row.seed;
        summary["runs"].push_back(std::move(run));
    }
    summary["geomean_ratio"] = {
        {"traffic", geomeans([](const SimReport& r) { return r.traffic_words(); })},
        {"cycles", geomeans([](const SimReport& r) { return r.cycles; })},
        {"energy", geomeans([](const SimReport& r) { return r.energy; })}};

    if (!spec.out_dir.empty()) {
        std::filesystem::create_directories(spec.out_dir);
        const auto csv_path = std::filesystem::path(spec.out_dir) / "runs.csv";
        std::ofstream csv(csv_path);
        if (!csv) throw ConfigError("cannot write " + csv_path.string());
        csv << "# generated " << utc_timestamp() << "\n" << kCsvHeader << "\n";
        for (const auto& row : rows) csv << csv_row(row, spec.axis) << "\n";
        const auto json_path = std::filesystem::path(spec.out_dir) / "summary.json";
        std::ofstream js(json_path);
        if (!js) throw ConfigError("cannot write " + json_path.string());
        js << summary.dump(2) << "\n";
    }
    return summary;
}

TileStatsReport tile_stats(const SparseMatrix& m, TileShape shape, Count capacity) {
    if (capacity < 1) throw ConfigError("capacity must be at least 1");
    std::vector<Count> occ = occupancy_histogram(m, shape).samples;
    TileStatsReport r;
    r.shape = shape;
    r.total_tiles = static_cast<Count>(occ.size());
    r.overbook_rate = overbooking_rate(m, shape, capacity);
    std::sort(occ.begin(), occ.end());
    r.min_occupancy = occ.front();
    r.max_occupancy = occ.back();
    double sum = 0.0, sum_sq = 0.0;
    for (const Count c : occ) {
        sum += static_cast<double>(c);
        sum_sq += static_cast<double>(c) * static_cast<double>(c);
    }
    const double n = static_cast<double>(occ.size());
    r.mean_occupancy = sum / n;
    r.stddev_occupancy = std::sqrt(std::max(0.0, sum_sq / n - r.mean_occupancy * r.mean_occupancy));
    const auto nearest_rank = [&](double p) {
        const auto rank = static_cast<std::size_t>(std::ceil(p * n));
        return occ[std::min(occ.size() - 1, rank == 0 ? 0 : rank - 1)];
    };
    r.p50 = nearest_rank(0.50);
    r.p90 = nearest_rank(0.90);
    r.p99 = nearest_rank(0.99);
    for (std::size_t i = 0; i < occ.size();) {
        std::size_t j = i;
        while (j < occ.size() && occ[j] == occ[i]) ++j;
        r.histogram.emplace_back(occ[i], static_cast<Count>(j - i));
        i = j;
    }
    return r;
}

nlohmann::json to_json(const TileStatsReport& r) {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& [occ, tiles] : r.histogram) hist.push_back({occ, tiles});
    return nlohmann::json{{"shape", {{"rows", r.shape.range_rows}, {"cols", r.shape.range_cols}}},
                          {"total_tiles", r.total_tiles},
                          {"min_occupancy", r.min_occupancy},
                          {"max_occupancy", r.max_occupancy},
                          {"mean_occupancy", r.mean_occupancy},
                          {"stddev_occupancy", r.stddev_occupancy},
                          {"p50", r.p50},
                          {"p90", r.p90},
                          {"p99", r.p99},
                          {"overbook_rate", r.overbook_rate},
                          {"histogram", hist}};
}

}  // namespace tailsim
