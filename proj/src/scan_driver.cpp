#include "tailsim/scan_driver.hpp"

#include <algorithm>
#include <numeric>

namespace tailsim {

const char* to_string(BufferIdiom idiom) {
    return idiom == BufferIdiom::Buffet ? "buffet" : "tailor";
}

BufferIdiom parse_buffer_idiom(const std::string& text) {
    if (text == "buffet") return BufferIdiom::Buffet;
    if (text == "tailor") return BufferIdiom::Tailor;
    throw ConfigError("unknown buffer idiom '" + text + "' (expected buffet or tailor)");
}

TileScanDriver::TileScanDriver(BufferIdiom idiom, Count capacity, Count fifo_region)
    : idiom_(idiom), capacity_(capacity), fifo_region_(fifo_region) {
    if (idiom == BufferIdiom::Buffet) {
        buffet_.emplace(capacity);
    } else {
        tailor_.emplace(capacity, fifo_region);
    }
}

void TileScanDriver::set_tracing(bool on) {
    if (buffet_) buffet_->set_tracing(on);
    if (tailor_) tailor_->set_tracing(on);
}

const std::vector<BufferEvent>& TileScanDriver::trace() const {
    return buffet_ ? buffet_->trace() : tailor_->trace();
}

void TileScanDriver::count_supply(Index pos) {
    const Index element = elements_[static_cast<std::size_t>(pos)];
    if (supplied_once_[static_cast<std::size_t>(pos)]) {
        ++counters_.refetch;
        if (buffet_) buffet_->note_parent_refetch(element, pos);
        if (tailor_) tailor_->note_parent_refetch(element, pos);
    } else {
        ++counters_.first_fetch;
        supplied_once_[static_cast<std::size_t>(pos)] = 1;
    }
    supplied_stamp_[static_cast<std::size_t>(pos)] = stamp_;
}

void TileScanDriver::supply_fill(Index pos) {
    count_supply(pos);
    const Index element = elements_[static_cast<std::size_t>(pos)];
    if (buffet_) {
        buffet_->fill(element);
    } else {
        tailor_->fill(element);
    }
}

void TileScanDriver::supply_owfill(Index pos) {
    count_supply(pos);
    tailor_->owfill(elements_[static_cast<std::size_t>(pos)], pos);
}

void TileScanDriver::advance_stream() {
    ++stream_pos_;
    if (stream_pos_ >= static_cast<Index>(elements_.size()))
        stream_pos_ = tailor_->fifo_head();
}

void TileScanDriver::begin_tile(const std::vector<Index>& elements) {
    if (open_) throw ContractError("begin_tile while a tile is open");
    open_ = true;
    elements_ = elements;
    const Count size = static_cast<Count>(elements_.size());
    supplied_once_.assign(elements_.size(), 0);
    supplied_stamp_.assign(elements_.size(), 0);
    stamp_ = 0;
    window_base_ = 0;

    ++counters_.loads;
    counters_.tile_elements += size;
    if (size > capacity_) {
        ++counters_.overbooked_loads;
        counters_.bumped += idiom_ == BufferIdiom::Buffet
                                ? size
                                : size - (capacity_ - fifo_region_);
    }

    const Count resident = std::min(size, capacity_);
    for (Index pos = 0; pos < resident; ++pos) supply_fill(pos);
    stream_pos_ = resident;
}

void TileScanDriver::read_tailor(Index pos) {
    auto hit = tailor_->read(pos);
    const bool resident_before =
        hit.has_value() && supplied_stamp_[static_cast<std::size_t>(pos)] != stamp_;
    if (!hit) {
        // Stream forward (wrapping into the fifo window) until pos arrives.
        while (!tailor_->resolve_offset(pos)) {
            supply_owfill(stream_pos_);
            advance_stream();
        }
        hit = tailor_->read(pos);
        if (!hit) throw ContractError("streamed element not resident after supply");
    }
    ++counters_.reads;
    if (resident_before) ++counters_.reuse_hits;
}

void TileScanDriver::read_buffet(Index pos) {
    Index idx = pos - window_base_;
    const bool resident = idx >= 0 && idx < buffet_->occupancy();
    const bool resident_before =
        resident && supplied_stamp_[static_cast<std::size_t>(pos)] != stamp_;
    if (!resident) {
        // No overwriting fills: drop the window and re-fill from pos.
        buffet_->shrink(buffet_->occupancy());
        window_base_ = pos;
        const Index end =
            std::min<Index>(pos + capacity_, static_cast<Index>(elements_.size()));
        for (Index p = pos; p < end; ++p) supply_fill(p);
        idx = 0;
    }
    if (!buffet_->read(idx)) throw ContractError("re-filled element not resident");
    ++counters_.reads;
    if (resident_before) ++counters_.reuse_hits;
}

void TileScanDriver::scan() {
    if (!open_) throw ContractError("scan without an open tile");
    ++stamp_;
    const Index size = static_cast<Index>(elements_.size());
    for (Index pos = 0; pos < size; ++pos) {
        if (idiom_ == BufferIdiom::Tailor) {
            read_tailor(pos);
        } else {
            read_buffet(pos);
        }
    }
}

void TileScanDriver::scan_repeat(Count n) {
    if (!open_) throw ContractError("scan without an open tile");
    if (n <= 0) return;
    const Count size = static_cast<Count>(elements_.size());
    const bool all_resident =
        idiom_ == BufferIdiom::Buffet
            ? (window_base_ == 0 && buffet_->occupancy() == size)
            : (tailor_->mode() == BufferMode::Buffet && tailor_->occupancy() == size);
    if (all_resident) {
        // Pure hit traversals: no supplies, every read sees data resident
        // before the traversal began.
        stamp_ += n;
        counters_.reads += n * size;
        counters_.reuse_hits += n * size;
        return;
    }
    scan();
    if (--n == 0) return;
    const ScanCounters before = counters_;
    scan();
    --n;
    // From the second traversal on, the buffer state at traversal start is
    // identical, so each repeat moves the counters by the same delta.
    counters_.first_fetch += (counters_.first_fetch - before.first_fetch) * n;
    counters_.refetch += (counters_.refetch - before.refetch) * n;
    counters_.reads += (counters_.reads - before.reads) * n;
    counters_.reuse_hits += (counters_.reuse_hits - before.reuse_hits) * n;
    stamp_ += n;
}

void TileScanDriver::backfill_forward(Index next) {
    const Index size = static_cast<Index>(elements_.size());
    const Count credits = buffet_ ? buffet_->credits() : tailor_->credits();
    for (Count i = 0; i < credits && next < size; ++i) supply_fill(next++);
}

void TileScanDriver::shrink_and_backfill(Count num) {
    if (!open_) throw ContractError("shrink without an open tile");
    if (idiom_ == BufferIdiom::Buffet) {
        const Count occ = buffet_->occupancy();
        buffet_->shrink(num);
        const Index next = window_base_ + occ;
        window_base_ += num;
        backfill_forward(next);
        return;
    }
    if (tailor_->mode() == BufferMode::Overbooked) {
        if (num != tailor_->occupancy())
            throw ContractError(
                "partial shrink while overbooked leaves incoherent positions; free everything");
        tailor_->shrink(num);
        // Everything is gone: restart residency from position 0; what does
        // not fit streams on the next scan.
        window_base_ = 0;
        backfill_forward(0);
        stream_pos_ = tailor_->occupancy();
        return;
    }
    if (num != tailor_->occupancy())
        throw ContractError("tailor scan positions are absolute; partial shrink unsupported");
    tailor_->shrink(num);
    backfill_forward(0);
    stream_pos_ = tailor_->occupancy();
}

void TileScanDriver::end_tile() {
    if (!open_) throw ContractError("end_tile without an open tile");
    if (buffet_) {
        buffet_->shrink(buffet_->occupancy());
    } else {
        tailor_->shrink(tailor_->occupancy());
    }
    open_ = false;
    elements_.clear();
    supplied_once_.clear();
    supplied_stamp_.clear();
}

ScanCounters scan_tile(BufferIdiom idiom, Count capacity, Count fifo_region, Count occupancy,
                       Count traversals) {
    TileScanDriver driver(idiom, capacity, fifo_region);
    std::vector<Index> elements(static_cast<std::size_t>(occupancy));
    std::iota(elements.begin(), elements.end(), Index{0});
    driver.begin_tile(elements);
    for (Count t = 0; t < traversals; ++t) driver.scan();
    driver.end_tile();
    return driver.counters();
}

}  // namespace tailsim
