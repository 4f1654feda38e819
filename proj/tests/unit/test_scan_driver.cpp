#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "tailsim/scan_driver.hpp"

using namespace tailsim;

namespace {

std::vector<Index> iota_tile(Count n) {
    std::vector<Index> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), Index{0});
    return v;
}

}  // namespace

TEST_CASE("idiom names round trip") {
    CHECK(to_string(BufferIdiom::Buffet) == std::string("buffet"));
    CHECK(to_string(BufferIdiom::Tailor) == std::string("tailor"));
    CHECK(parse_buffer_idiom("buffet") == BufferIdiom::Buffet);
    CHECK(parse_buffer_idiom("tailor") == BufferIdiom::Tailor);
    CHECK_THROWS_AS(parse_buffer_idiom("sideways"), ConfigError);
}

TEST_CASE("streaming beats drop-and-refill on an oversized tile") {
    // 6 elements through 4 slots (2 streaming), 2 traversals.
    const auto tailor = scan_tile(BufferIdiom::Tailor, 4, 2, 6, 2);
    CHECK(tailor.loads == 1);
    CHECK(tailor.overbooked_loads == 1);
    CHECK(tailor.tile_elements == 6);
    CHECK(tailor.first_fetch == 6);
    CHECK(tailor.refetch == 4);
    CHECK(tailor.supplies() == 10);
    CHECK(tailor.reads == 12);
    CHECK(tailor.reuse_hits == 6);
    CHECK(tailor.bumped == 4);  // only capacity - fifo_region stay pinned

    const auto buffet = scan_tile(BufferIdiom::Buffet, 4, 2, 6, 2);
    CHECK(buffet.first_fetch == 6);
    CHECK(buffet.refetch == 6);
    CHECK(buffet.supplies() == 12);  // every traversal re-supplies the tile
    CHECK(buffet.reads == 12);
    CHECK(buffet.reuse_hits == 4);
    CHECK(buffet.bumped == 6);  // nothing survives a drop-and-refill
}

TEST_CASE("a fitting tile is supplied once and always reused") {
    for (const auto idiom : {BufferIdiom::Buffet, BufferIdiom::Tailor}) {
        const auto c = scan_tile(idiom, 4, 2, 3, 5);
        CAPTURE(to_string(idiom));
        CHECK(c.loads == 1);
        CHECK(c.overbooked_loads == 0);
        CHECK(c.bumped == 0);
        CHECK(c.first_fetch == 3);
        CHECK(c.refetch == 0);
        CHECK(c.reads == 15);
        CHECK(c.reuse_hits == 15);
    }
}

TEST_CASE("supply counts follow the closed forms over a parameter grid") {
    for (Count capacity = 1; capacity <= 6; ++capacity) {
        for (Count fifo = 1; fifo <= capacity; ++fifo) {
            for (Count occupancy = capacity + 1; occupancy <= 2 * capacity + 3; ++occupancy) {
                for (Count traversals = 1; traversals <= 4; ++traversals) {
                    CAPTURE(capacity);
                    CAPTURE(fifo);
                    CAPTURE(occupancy);
                    CAPTURE(traversals);
                    const auto t =
                        scan_tile(BufferIdiom::Tailor, capacity, fifo, occupancy, traversals);
                    CHECK(t.supplies() ==
                          occupancy + (traversals - 1) * (occupancy - capacity + fifo));
                    CHECK(t.reuse_hits ==
                          capacity + (traversals - 1) * (capacity - fifo));
                    CHECK(t.reads == traversals * occupancy);
                    CHECK(t.bumped == occupancy - (capacity - fifo));

                    const auto b =
                        scan_tile(BufferIdiom::Buffet, capacity, fifo, occupancy, traversals);
                    CHECK(b.supplies() == traversals * occupancy);
                    CHECK(b.reuse_hits == capacity);
                    CHECK(b.reads == traversals * occupancy);
                    CHECK(b.bumped == occupancy);
                }
            }
        }
    }
}

TEST_CASE("batched traversals match literal repetition, then keep composing") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const auto idiom = rng() % 2 == 0 ? BufferIdiom::Buffet : BufferIdiom::Tailor;
        const Count capacity = 1 + static_cast<Count>(rng() % 8);
        const Count fifo = 1 + static_cast<Count>(rng() % static_cast<std::uint64_t>(capacity));
        const Count occupancy = static_cast<Count>(rng() % (2 * static_cast<std::uint64_t>(capacity) + 4));
        const Count n = static_cast<Count>(rng() % 6);
        CAPTURE(to_string(idiom));
        CAPTURE(capacity);
        CAPTURE(fifo);
        CAPTURE(occupancy);
        CAPTURE(n);

        TileScanDriver repeat(idiom, capacity, fifo);
        repeat.begin_tile(iota_tile(occupancy));
        repeat.scan_repeat(n);

        TileScanDriver sequential(idiom, capacity, fifo);
        sequential.begin_tile(iota_tile(occupancy));
        for (Count i = 0; i < n; ++i) sequential.scan();

        REQUIRE(repeat.counters() == sequential.counters());

        // A literal traversal after the batch still lands on the same counters.
        if (occupancy > 0) {
            repeat.scan();
            sequential.scan();
            REQUIRE(repeat.counters() == sequential.counters());
        }
        repeat.end_tile();
        sequential.end_tile();
        REQUIRE(repeat.counters() == sequential.counters());
    }
}

TEST_CASE("freeing everything mid-tile refetches the head of the tile") {
    TileScanDriver d(BufferIdiom::Tailor, 4, 2);
    d.begin_tile(iota_tile(6));
    d.scan();
    CHECK(d.counters().first_fetch == 6);
    CHECK(d.counters().refetch == 0);

    // The streamed state cannot survive a partial free.
    CHECK_THROWS_WITH_AS(
        d.shrink_and_backfill(2),
        "partial shrink while overbooked leaves incoherent positions; free everything",
        ContractError);

    d.shrink_and_backfill(4);
    CHECK(d.counters().refetch == 4);  // positions 0..3 come back immediately

    d.scan();
    const auto& c = d.counters();
    CHECK(c.refetch == 6);  // the tail streams again
    CHECK(c.reads == 12);
    CHECK(c.reuse_hits == 8);
    d.end_tile();
}

TEST_CASE("tailor positions are absolute even when the tile fits") {
    TileScanDriver d(BufferIdiom::Tailor, 4, 2);
    d.begin_tile(iota_tile(3));
    d.scan();
    CHECK_THROWS_WITH_AS(d.shrink_and_backfill(1),
                         "tailor scan positions are absolute; partial shrink unsupported",
                         ContractError);
    d.shrink_and_backfill(3);
    CHECK(d.counters().refetch == 3);
    d.scan();
    CHECK(d.counters().reuse_hits == 6);  // both traversals fully reused
    d.end_tile();
}

TEST_CASE("the buffet window slides forward over the tile") {
    TileScanDriver d(BufferIdiom::Buffet, 4, 1);
    d.begin_tile(iota_tile(6));
    CHECK(d.counters().first_fetch == 4);
    d.shrink_and_backfill(2);  // window now covers positions 2..5
    CHECK(d.counters().first_fetch == 6);
    CHECK(d.counters().refetch == 0);
    d.scan();
    const auto& c = d.counters();
    CHECK(c.refetch == 6);  // the scan starts at 0, so the window thrashes back
    CHECK(c.reads == 6);
    CHECK(c.reuse_hits == 0);
    d.end_tile();
}

TEST_CASE("tile lifecycle contracts") {
    TileScanDriver d(BufferIdiom::Buffet, 4, 1);
    CHECK_THROWS_AS(d.scan(), ContractError);
    CHECK_THROWS_AS(d.scan_repeat(2), ContractError);
    CHECK_THROWS_AS(d.end_tile(), ContractError);
    CHECK_THROWS_AS(d.shrink_and_backfill(0), ContractError);

    d.begin_tile(iota_tile(2));
    CHECK(d.tile_open());
    CHECK_THROWS_AS(d.begin_tile(iota_tile(1)), ContractError);
    d.end_tile();
    CHECK_FALSE(d.tile_open());

    d.begin_tile({});
    CHECK(d.counters().loads == 2);
    d.scan();
    CHECK(d.counters().reads == 0);
    d.end_tile();
}

TEST_CASE("counters accumulate across consecutive tiles") {
    TileScanDriver d(BufferIdiom::Tailor, 4, 2);
    d.begin_tile(iota_tile(6));
    d.scan();
    d.end_tile();
    d.begin_tile(iota_tile(3));
    d.scan();
    d.end_tile();
    const auto& c = d.counters();
    CHECK(c.loads == 2);
    CHECK(c.overbooked_loads == 1);
    CHECK(c.tile_elements == 9);
    CHECK(c.first_fetch == 9);
    CHECK(c.reads == 9);
}

TEST_CASE("the trace records parent refetches alongside buffer traffic") {
    TileScanDriver d(BufferIdiom::Buffet, 2, 1);
    d.set_tracing(true);
    d.begin_tile({10, 11, 12});
    d.scan();
    d.scan();
    d.end_tile();

    Count refetch_events = 0;
    for (const auto& e : d.trace())
        if (e.op == BufferOp::ParentRefetch) ++refetch_events;
    CHECK(refetch_events == d.counters().refetch);
    CHECK(d.counters().refetch > 0);
}
