#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "tailsim/generate.hpp"
#include "tailsim/tiling.hpp"

using namespace tailsim;

namespace {

const std::vector<Entry> kSixBySix{{0, 0}, {0, 5}, {2, 2}, {3, 3}, {5, 1}, {5, 5}};

std::vector<Entry> identity_entries(Index n) {
    std::vector<Entry> e;
    for (Index i = 0; i < n; ++i) e.push_back({i, i});
    return e;
}

// Independent occupancy: count coordinates falling inside each tile window.
std::vector<Count> brute_occupancies(const SparseMatrix& m, TileShape shape) {
    const TileGrid grid(m.rows(), m.cols(), shape);
    std::vector<Count> occ(static_cast<std::size_t>(grid.total_tiles()), 0);
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index i = m.row_starts()[static_cast<std::size_t>(r)];
             i < m.row_starts()[static_cast<std::size_t>(r) + 1]; ++i) {
            const Index c = m.col_indices()[static_cast<std::size_t>(i)];
            const Count t =
                (r / shape.range_rows) * grid.tile_cols() + (c / shape.range_cols);
            ++occ[static_cast<std::size_t>(t)];
        }
    }
    return occ;
}

}  // namespace

TEST_CASE("grid enumeration and ragged edges") {
    const TileGrid even(6, 6, {3, 3});
    CHECK(even.total_tiles() == 4);
    CHECK(even.window(0) == Window{0, 3, 0, 3});
    CHECK(even.window(3) == Window{3, 6, 3, 6});

    const TileGrid ragged(5, 5, {3, 3});
    CHECK(ragged.total_tiles() == 4);
    CHECK(ragged.window(1) == Window{0, 3, 3, 5});  // 3x2
    CHECK(ragged.window(2) == Window{3, 5, 0, 3});  // 2x3
    CHECK(ragged.window(3) == Window{3, 5, 3, 5});  // 2x2

    const TileGrid clamped(100, 100, {1'000'000, 1'000'000});
    CHECK(clamped.total_tiles() == 1);
    CHECK(clamped.window(0) == Window{0, 100, 0, 100});

    CHECK_THROWS_AS(TileGrid(6, 6, {0, 3}), ContractError);
}

TEST_CASE("tile occupancies match hand enumeration") {
    const auto id4 = SparseMatrix::from_coo(4, 4, identity_entries(4));
    CHECK(occupancy_histogram(id4, {2, 2}).samples == std::vector<Count>{2, 0, 0, 2});

    const auto six = SparseMatrix::from_coo(6, 6, kSixBySix);
    CHECK(occupancy_histogram(six, {3, 3}).samples == std::vector<Count>{2, 1, 1, 2});
}

TEST_CASE("occupancies sum to nnz and match the brute oracle") {
    const auto m = generate(parse_generator_spec("uniform:83x67:density=0.07,seed=13"));
    for (const TileShape shape : {TileShape{7, 11}, TileShape{16, 16}, TileShape{83, 1}}) {
        const auto dist = occupancy_histogram(m, shape);
        CHECK(dist.exhaustive);
        CHECK(std::accumulate(dist.samples.begin(), dist.samples.end(), Count{0}) == m.nnz());
        CHECK(dist.samples == brute_occupancies(m, shape));
    }
}

TEST_CASE("uniform occupancies concentrate near the expectation") {
    const auto m = generate(parse_generator_spec("uniform:1000x1000:density=0.01,seed=7"));
    const auto dist = occupancy_histogram(m, {100, 100});
    REQUIRE(dist.samples.size() == 100);
    const double mean =
        static_cast<double>(std::accumulate(dist.samples.begin(), dist.samples.end(), Count{0})) /
        100.0;
    CHECK(mean > 90.0);
    CHECK(mean < 110.0);
}

TEST_CASE("dense and empty extremes") {
    std::vector<Entry> dense;
    for (Index r = 0; r < 6; ++r)
        for (Index c = 0; c < 6; ++c) dense.push_back({r, c});
    const auto m = SparseMatrix::from_coo(6, 6, dense);
    for (const Count occ : occupancy_histogram(m, {3, 3}).samples) CHECK(occ == 9);

    const auto empty = SparseMatrix::from_coo(6, 6, {});
    for (const Count occ : occupancy_histogram(empty, {3, 3}).samples) CHECK(occ == 0);
}

TEST_CASE("size_to_shape expands along K first") {
    // role B: operand is K x N
    CHECK(size_to_shape(1000, OperandRole::B, 100, 50) == TileShape{100, 10});
    CHECK(size_to_shape(50, OperandRole::B, 100, 7) == TileShape{50, 1});
    CHECK(size_to_shape(1'000'000, OperandRole::B, 100, 50) == TileShape{100, 50});
    // role A: operand is M x K, so K lives on columns
    CHECK(size_to_shape(1000, OperandRole::A, 50, 100) == TileShape{10, 100});
    CHECK(size_to_shape(50, OperandRole::A, 7, 100) == TileShape{1, 50});
    CHECK_THROWS_AS(size_to_shape(0, OperandRole::A, 10, 10), ContractError);
}

TEST_CASE("overbooking rate counts tiles above capacity") {
    const auto id4 = SparseMatrix::from_coo(4, 4, identity_entries(4));
    CHECK(overbooking_rate(id4, {2, 2}, 1) == doctest::Approx(0.5));
    CHECK(overbooking_rate(id4, {2, 2}, 4) == doctest::Approx(0.0));

    std::vector<Entry> dense;
    for (Index r = 0; r < 4; ++r)
        for (Index c = 0; c < 4; ++c) dense.push_back({r, c});
    const auto d = SparseMatrix::from_coo(4, 4, dense);
    CHECK(overbooking_rate(d, {2, 2}, 3) == doctest::Approx(1.0));
}

TEST_CASE("ladder doubles from capacity and ends at the full size") {
    CHECK(default_ladder(32, 8, 25) == std::vector<Count>{32, 64, 128, 200});
    // capacity beyond the whole matrix: one rung, clamped later by size_to_shape
    CHECK(default_ladder(100, 8, 8) == std::vector<Count>{100});
    CHECK(default_ladder(64, 8, 8) == std::vector<Count>{64});
}

TEST_CASE("prescient picks the documented sizes on structured inputs") {
    std::vector<Entry> dense;
    for (Index r = 0; r < 8; ++r)
        for (Index c = 0; c < 8; ++c) dense.push_back({r, c});
    const auto d = SparseMatrix::from_coo(8, 8, dense);
    CHECK(prescient_tile_size(d, 16, OperandRole::A).size() == 16);

    const auto id = SparseMatrix::from_coo(16, 16, identity_entries(16));
    // capacity covers the worst-case diagonal count of the full matrix
    CHECK(prescient_tile_size(id, 16, OperandRole::A) == TileShape{16, 16});
    // capacity 4: a 4x16 tile holds at most 4 diagonal entries, 8x16 holds 8
    CHECK(prescient_tile_size(id, 4, OperandRole::A) == TileShape{4, 16});
}

TEST_CASE("prescient equals a brute force over the ladder") {
    for (Seed seed = 1; seed <= 5; ++seed) {
        const auto m = generate(parse_generator_spec(
            "uniform:64x64:density=0.1,seed=" + std::to_string(seed)));
        const Count capacity = 32;
        // brute force: largest rung whose exhaustive max occupancy fits
        TileShape best{1, 1};
        bool found = false;
        for (const Count rung : default_ladder(capacity, 64, 64)) {
            const TileShape shape = size_to_shape(rung, OperandRole::A, 64, 64);
            const auto occ = occupancy_histogram(m, shape).samples;
            const Count max_occ = *std::max_element(occ.begin(), occ.end());
            if (max_occ <= capacity) {
                best = shape;
                found = true;
            }
        }
        REQUIRE(found);
        CHECK(prescient_tile_size(m, capacity, OperandRole::A) == best);
    }
}
