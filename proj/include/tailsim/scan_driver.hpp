#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailsim/eddo.hpp"
#include "tailsim/types.hpp"

namespace tailsim {

enum class BufferIdiom { Buffet, Tailor };

const char* to_string(BufferIdiom idiom);
BufferIdiom parse_buffer_idiom(const std::string& text);

struct ScanCounters {
    Count loads = 0;             // tiles loaded
    Count overbooked_loads = 0;  // loads whose tile exceeds capacity
    Count tile_elements = 0;     // sum of tile sizes over loads
    Count first_fetch = 0;       // parent supplies of elements new to the current load
    Count refetch = 0;           // parent re-supplies within a load
    Count reads = 0;             // reads served to the child
    Count reuse_hits = 0;        // reads served from data resident before the traversal began
    Count bumped = 0;            // per load, elements the buffer cannot keep resident

    Count supplies() const { return first_fetch + refetch; }

    bool operator==(const ScanCounters&) const = default;
};

// Feeds one tile at a time through a buffet or a tailor and replays in-order
// scans over it, standing in for the parent supplier and the child consumer
// at once. A read that stalls triggers the matching re-supply discipline:
// the tailor streams the missing span through its fifo window with
// overwriting fills; the buffet drops its whole window and re-fills from the
// stalled position. Counters accumulate across tiles.
class TileScanDriver {
public:
    TileScanDriver(BufferIdiom idiom, Count capacity, Count fifo_region);

    // Loads a tile: fills until the buffer is full or the tile is exhausted.
    void begin_tile(const std::vector<Index>& elements);

    // One full in-order traversal of the open tile.
    void scan();

    // `n` traversals. Counter-equivalent to calling scan() n times; repeats
    // are batched arithmetically once the per-traversal pattern stabilizes
    // (after the first traversal the machine state is periodic).
    void scan_repeat(Count n);

    // Frees `num` slots mid-tile, then re-supplies from the lowest
    // non-resident position until the tile is resident or the buffer is
    // full again. The tailor only supports freeing everything while
    // overbooked (survivor positions would be incoherent otherwise).
    void shrink_and_backfill(Count num);

    // Frees everything and closes the tile.
    void end_tile();

    const ScanCounters& counters() const { return counters_; }
    bool tile_open() const { return open_; }
    Count capacity() const { return capacity_; }
    BufferIdiom idiom() const { return idiom_; }

    void set_tracing(bool on);
    const std::vector<BufferEvent>& trace() const;

private:
    void count_supply(Index pos);
    void supply_fill(Index pos);
    void supply_owfill(Index pos);
    void advance_stream();
    void backfill_forward(Index next);
    void read_tailor(Index pos);
    void read_buffet(Index pos);

    BufferIdiom idiom_;
    Count capacity_ = 0;
    Count fifo_region_ = 0;
    std::optional<Buffet> buffet_;
    std::optional<Tailor> tailor_;
    ScanCounters counters_;

    bool open_ = false;
    std::vector<Index> elements_;
    std::vector<std::uint8_t> supplied_once_;
    std::vector<Count> supplied_stamp_;
    Count stamp_ = 0;
    Index stream_pos_ = 0;   // tailor: next tile position to stream
    Index window_base_ = 0;  // buffet: tile position held at offset 0
};

// Loads a tile of `occupancy` elements once, scans it `traversals` times,
// closes it, and returns the counters. Ground truth for the re-fetch
// arithmetic of both idioms.
ScanCounters scan_tile(BufferIdiom idiom, Count capacity, Count fifo_region, Count occupancy,
                       Count traversals);

}  // namespace tailsim
