#pragma once

#include <string>

#include "tailsim/sparse_matrix.hpp"

namespace tailsim {

// Parameters for synthetic pattern generation. Which fields apply depends on
// `kind`:
//   UniformRandom  - density
//   Banded         - half_width, in_band, off_band (band: |row - col| <= half_width)
//   PowerLawRows   - density (global), exponent (row r weighted (r+1)^-exponent)
// `seed` fully determines the output for a given spec.
struct GeneratorSpec {
    enum class Kind { UniformRandom, Banded, PowerLawRows };

    Kind kind = Kind::UniformRandom;
    Index rows = 0;
    Index cols = 0;
    double density = 0.0;
    Index half_width = 0;
    double in_band = 0.0;
    double off_band = 0.0;
    double exponent = 1.0;
    Seed seed = 0;

    // Throws ConfigError when shapes are non-positive, densities leave [0, 1],
    // half_width is negative, or the exponent is not finite.
    void validate() const;

    // Canonical one-line form, parseable by parse_generator_spec.
    std::string to_string() const;
};

// Deterministic pattern-only matrix from a spec. Realized density converges
// to the requested density as the expected nonzero count grows.
SparseMatrix generate(const GeneratorSpec& spec);

// Parses the compact spec grammar used in configs and on the command line:
//   uniform:ROWSxCOLS:density=D[,seed=S]
//   banded:ROWSxCOLS:half_width=W,in=DI,out=DO[,seed=S]
//   powerlaw:ROWSxCOLS:density=D,exponent=E[,seed=S]
// An optional leading "gen:" is accepted. Throws ParseError on malformed
// strings and ConfigError on out-of-range parameters.
GeneratorSpec parse_generator_spec(const std::string& text);

}  // namespace tailsim
