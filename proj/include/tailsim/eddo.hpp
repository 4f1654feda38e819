#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "tailsim/types.hpp"

namespace tailsim {

enum class BufferOp { Fill, OWFill, Read, Update, Shrink, ParentRefetch };
enum class BufferMode { Buffet, Overbooked };

const char* to_string(BufferOp op);
const char* to_string(BufferMode mode);

// One completed buffer operation. `element` is the element identifier (-1
// when the op carries none), `index` the op's index argument (for fills, the
// assigned position; for shrinks, the count), `offset` the resolved buffer
// offset (-1 when none). `mode` and `fifo_offset` are captured when the
// event is recorded.
struct BufferEvent {
    BufferOp op = BufferOp::Fill;
    Index element = -1;
    Index index = -1;
    Index offset = -1;
    BufferMode mode = BufferMode::Buffet;
    Index fifo_offset = 0;

    bool operator==(const BufferEvent&) const = default;
};

// "Fill,7,0,0,buffet,0" - one line per event, fields in declaration order.
std::string to_line(const BufferEvent& e);
std::string trace_to_string(const std::vector<BufferEvent>& trace);

struct ReadResult {
    Index offset = 0;
    Index element = -1;

    bool operator==(const ReadResult&) const = default;
};

// Credit-synchronized queue storage: fill appends at the tail, shrink frees
// from the head, reads and updates address live slots relative to the head.
// Fill with zero credits is a contract violation (the channel would block);
// reading an index that has not arrived yet is a stall, reported as nullopt.
class Buffet {
public:
    explicit Buffet(Count capacity);

    Count capacity() const { return capacity_; }
    Count occupancy() const { return static_cast<Count>(slots_.size()); }
    Count credits() const { return capacity_ - occupancy(); }
    BufferMode mode() const { return BufferMode::Buffet; }

    // Appends `element`; returns the offset it landed at.
    Index fill(Index element);

    // nullopt when the index is beyond current occupancy (data not arrived).
    std::optional<ReadResult> read(Index index);
    std::optional<Index> update(Index index, Index element);

    // Frees `num` slots from the head, releasing `num` credits.
    void shrink(Count num);

    void set_tracing(bool on) { tracing_ = on; }
    const std::vector<BufferEvent>& trace() const { return trace_; }

    // Driver hook: records that the parent re-supplied an element.
    void note_parent_refetch(Index element, Index index);

private:
    friend class Tailor;

    void emit(BufferOp op, Index element, Index index, Index offset, BufferMode mode,
              Index fifo_offset);

    Count capacity_ = 0;
    std::deque<Index> slots_;
    bool tracing_ = false;
    std::vector<BufferEvent> trace_;
};

// A buffet extended with overwriting fills so a tile larger than the buffer
// can stream through it.
//
// Buffet mode: behaves exactly as the embedded buffet (identical traces).
//
// Overbooked mode, entered by the first overwriting fill against a full
// buffer: the tail `fifo_region` slots become a streaming window and their
// occupants are evicted (they were already consumed by an in-order scan);
// the head capacity - fifo_region slots stay buffet-managed and keep direct
// index addressing. Overwriting fills replace the oldest streamed element
// once the window is full. No credits are released while overbooked, so
// ordinary fills stay blocked.
//
// fifo_offset is derived state: (tile index of the oldest resident streamed
// element) - fifo_head, recomputed after every overwriting fill. In-order
// replacement advances it by one; when the resident window realigns with the
// region head (the wrap that replaces the last element of the tile) it
// returns to zero. Reads never change it.
//
// Streamed reads resolve through the fixed-head form
//   offset = fifo_head + ((index - fifo_offset - fifo_head) mod fifo_region)
// which is exact whenever the window holds consecutive stream positions
// (every in-order scan); residency itself is tracked per index, so hits,
// misses and traffic are exact regardless.
//
// A shrink while overbooked drops the machine back to buffet mode and
// discards streaming metadata; the caller backfills (see TileScanDriver).
class Tailor {
public:
    Tailor(Count capacity, Count fifo_region);

    Count capacity() const { return core_.capacity(); }
    Count fifo_region() const { return fifo_region_; }
    Index fifo_head() const { return capacity() - fifo_region_; }
    BufferMode mode() const { return mode_; }
    Index fifo_offset() const { return fifo_offset_; }

    // Reserved streaming slots count as occupied: credits stay zero while
    // overbooked.
    Count occupancy() const;
    Count credits() const { return capacity() - occupancy(); }

    Index fill(Index element);
    std::optional<ReadResult> read(Index index);
    std::optional<Index> update(Index index, Index element);
    void shrink(Count num);

    // Streams `element` carrying tile position `index` through the window.
    // Requires a full buffer (first call flips to overbooked mode) and an
    // index at or beyond fifo_head. Returns the resolved offset written.
    Index owfill(Index element, Index index);

    // Fixed-head offset for a resident index; nullopt when not resident.
    std::optional<Index> resolve_offset(Index index) const;

    void set_tracing(bool on) { core_.set_tracing(on); }
    const std::vector<BufferEvent>& trace() const { return core_.trace(); }
    void note_parent_refetch(Index element, Index index);

private:
    struct StreamSlot {
        Index index;
        Index element;
    };

    Buffet core_;
    Count fifo_region_ = 0;
    BufferMode mode_ = BufferMode::Buffet;
    std::deque<StreamSlot> window_;
    Index fifo_offset_ = 0;
};

}  // namespace tailsim
