#include "tailsim/generate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "tailsim/rng.hpp"

namespace tailsim {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError(std::string(name) + " must be in [0, 1], got " + std::to_string(p));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Builds one CSR row at a time from per-row Bernoulli cell draws.
template <typename RowProb>
SparseMatrix scan_generate(Index rows, Index cols, Seed seed, RowProb&& probability) {
    Rng rng(seed);
    std::vector<Index> row_starts;
    row_starts.reserve(static_cast<std::size_t>(rows) + 1);
    row_starts.push_back(0);
    std::vector<Index> col_indices;
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            const double p = probability(r, c);
            // Certain and impossible cells consume no randomness, so e.g. a
            // unit-density band is exact rather than sampled.
            if (p >= 1.0 || (p > 0.0 && rng.bernoulli(p))) col_indices.push_back(c);
        }
        row_starts.push_back(static_cast<Index>(col_indices.size()));
    }
    return SparseMatrix::from_csr(rows, cols, std::move(row_starts), std::move(col_indices));
}

}  // namespace

void GeneratorSpec::validate() const {
    if (rows <= 0 || cols <= 0)
        throw ConfigError("generator shape must be positive, got " + std::to_string(rows) + "x" +
                          std::to_string(cols));
    switch (kind) {
        case Kind::UniformRandom:
            check_probability(density, "density");
            break;
        case Kind::Banded:
            if (half_width < 0) throw ConfigError("half_width must be non-negative");
            check_probability(in_band, "in-band density");
            check_probability(off_band, "off-band density");
            break;
        case Kind::PowerLawRows:
            check_probability(density, "density");
            if (!std::isfinite(exponent) || exponent < 0.0)
                throw ConfigError("exponent must be finite and non-negative");
            break;
    }
}

std::string GeneratorSpec::to_string() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::UniformRandom:
            out << "uniform:" << rows << "x" << cols << ":density=" << format_double(density);
            break;
        case Kind::Banded:
            out << "banded:" << rows << "x" << cols << ":half_width=" << half_width
                << ",in=" << format_double(in_band) << ",out=" << format_double(off_band);
            break;
        case Kind::PowerLawRows:
            out << "powerlaw:" << rows << "x" << cols << ":density=" << format_double(density)
                << ",exponent=" << format_double(exponent);
            break;
    }
    out << ",seed=" << seed;
    return out.str();
}

SparseMatrix generate(const GeneratorSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case GeneratorSpec::Kind::UniformRandom:
            return scan_generate(spec.rows, spec.cols, spec.seed,
                                 [&](Index, Index) { return spec.density; });

        case GeneratorSpec::Kind::Banded:
            return scan_generate(spec.rows, spec.cols, spec.seed, [&](Index r, Index c) {
                return std::llabs(r - c) <= spec.half_width ? spec.in_band : spec.off_band;
            });

        case GeneratorSpec::Kind::PowerLawRows: {
            // Row r carries weight (r+1)^-exponent of the global mass
            // density*rows*cols. Water-fill: rows whose share exceeds one
            // nonzero per cell are clamped and the excess is redistributed,
            // keeping the expected total at the requested density.
            const std::size_t n = static_cast<std::size_t>(spec.rows);
            std::vector<double> weight(n);
            double weight_sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                weight[r] = std::pow(static_cast<double>(r) + 1.0, -spec.exponent);
                weight_sum += weight[r];
            }
            const double total = spec.density * static_cast<double>(spec.rows) *
                                 static_cast<double>(spec.cols);
            std::vector<double> expected(n);
            for (std::size_t r = 0; r < n; ++r) expected[r] = total * weight[r] / weight_sum;

            const double cap = static_cast<double>(spec.cols);
            for (;;) {
                double excess = 0.0;
                double open_weight = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (expected[r] > cap) {
                        excess += expected[r] - cap;
                        expected[r] = cap;
                    } else if (expected[r] < cap) {
                        open_weight += weight[r];
                    }
                }
                if (excess <= 1e-9 || open_weight <= 0.0) break;
                bool changed = false;
                for (std::size_t r = 0; r < n; ++r) {
                    if (expected[r] < cap) {
                        expected[r] += excess * weight[r] / open_weight;
                        changed = true;
                    }
                }
                if (!changed) break;
            }

            return scan_generate(spec.rows, spec.cols, spec.seed, [&](Index r, Index) {
                return expected[static_cast<std::size_t>(r)] / cap;
            });
        }
    }
    throw ConfigError("unknown generator kind");
}

GeneratorSpec parse_generator_spec(const std::string& text) {
    std::string body = text;
    if (body.rfind("gen:", 0) == 0) body = body.substr(4);

    // kind : ROWSxCOLS : key=value[,key=value...]
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const std::size_t colon = body.find(':', pos);
        if (colon == std::string::npos) {
            parts.push_back(body.substr(pos));
            break;
        }
        parts.push_back(body.substr(pos, colon - pos));
        pos = colon + 1;
    }
    if (parts.size() != 3)
        throw ParseError("generator spec must be kind:ROWSxCOLS:params, got '" + text + "'");

    GeneratorSpec spec;
    if (parts[0] == "uniform")
        spec.kind = GeneratorSpec::Kind::UniformRandom;
    else if (parts[0] == "banded")
        spec.kind = GeneratorSpec::Kind::Banded;
    else if (parts[0] == "powerlaw")
        spec.kind = GeneratorSpec::Kind::PowerLawRows;
    else
        throw ParseError("unknown generator kind '" + parts[0] + "'");

    const std::size_t x = parts[1].find('x');
    if (x == std::string::npos)
        throw ParseError("generator shape must be ROWSxCOLS, got '" + parts[1] + "'");
    try {
        spec.rows = std::stoll(parts[1].substr(0, x));
        spec.cols = std::stoll(parts[1].substr(x + 1));
    } catch (const std::exception&) {
        throw ParseError("generator shape must be ROWSxCOLS, got '" + parts[1] + "'");
    }

    std::map<std::string, std::string> kv;
    std::stringstream params(parts[2]);
    std::string item;
    while (std::getline(params, item, ',')) {
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw ParseError("generator parameter must be key=value, got '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }

    auto take = [&](const char* key, bool required) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required)
                throw ParseError("generator spec missing parameter '" + std::string(key) + "'");
            return {};
        }
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto to_double = [](const std::string& v, const char* key) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw ParseError("generator parameter '" + std::string(key) + "' is not a number: '" +
                             v + "'");
        }
    };

    switch (spec.kind) {
        case GeneratorSpec::Kind::UniformRandom:
            spec.density = to_double(take("density", true), "density");
            break;
        case GeneratorSpec::Kind::Banded:
            spec.half_width = static_cast<Index>(to_double(take("half_width", true), "half_width"));
            spec.in_band = to_double(take("in", true), "in");
            spec.off_band = to_double(take("out", true), "out");
            break;
        case GeneratorSpec::Kind::PowerLawRows:
            spec.density = to_double(take("density", true), "density");
            spec.exponent = to_double(take("exponent", true), "exponent");
            break;
    }
    if (const std::string s = take("seed", false); !s.empty())
        spec.seed = static_cast<Seed>(std::stoull(s));
    if (!kv.empty())
        throw ParseError("unknown generator parameter '" + kv.begin()->first + "'");

    spec.validate();
    return spec;
}

}  // namespace tailsim
