#include "tailsim/eddo.hpp"

#include <algorithm>
#include <sstream>

namespace tailsim {

const char* to_string(BufferOp op) {
    switch (op) {
        case BufferOp::Fill: return "Fill";
        case BufferOp::OWFill: return "OWFill";
        case BufferOp::Read: return "Read";
        case BufferOp::Update: return "Update";
        case BufferOp::Shrink: return "Shrink";
        case BufferOp::ParentRefetch: return "ParentRefetch";
    }
    return "?";
}

const char* to_string(BufferMode mode) {
    return mode == BufferMode::Buffet ? "buffet" : "overbooked";
}

std::string to_line(const BufferEvent& e) {
    std::ostringstream out;
    out << to_string(e.op) << ',' << e.element << ',' << e.index << ',' << e.offset << ','
        << to_string(e.mode) << ',' << e.fifo_offset;
    return out.str();
}

std::string trace_to_string(const std::vector<BufferEvent>& trace) {
    std::string out;
    for (const auto& e : trace) {
        out += to_line(e);
        out += '\n';
    }
    return out;
}

Buffet::Buffet(Count capacity) : capacity_(capacity) {
    if (capacity < 1) throw ContractError("buffer capacity must be at least 1");
}

void Buffet::emit(BufferOp op, Index element, Index index, Index offset, BufferMode mode,
                  Index fifo_offset) {
    if (tracing_) trace_.push_back({op, element, index, offset, mode, fifo_offset});
}

Index Buffet::fill(Index element) {
    if (credits() == 0) throw ContractError("fill with zero credits: channel would block");
    slots_.push_back(element);
    const Index offset = static_cast<Index>(slots_.size()) - 1;
    emit(BufferOp::Fill, element, offset, offset, BufferMode::Buffet, 0);
    return offset;
}

std::optional<ReadResult> Buffet::read(Index index) {
    if (index < 0) throw ContractError("read with negative index");
    if (index >= occupancy()) return std::nullopt;  // stall: data not arrived
    const Index element = slots_[static_cast<std::size_t>(index)];
    emit(BufferOp::Read, element, index, index, BufferMode::Buffet, 0);
    return ReadResult{index, element};
}

std::optional<Index> Buffet::update(Index index, Index element) {
    if (index < 0) throw ContractError("update with negative index");
    if (index >= occupancy()) return std::nullopt;
    slots_[static_cast<std::size_t>(index)] = element;
    emit(BufferOp::Update, element, index, index, BufferMode::Buffet, 0);
    return index;
}

void Buffet::shrink(Count num) {
    if (num < 0 || num > occupancy()) throw ContractError("shrink count exceeds occupancy");
    slots_.erase(slots_.begin(), slots_.begin() + static_cast<std::ptrdiff_t>(num));
    emit(BufferOp::Shrink, -1, num, -1, BufferMode::Buffet, 0);
}

void Buffet::note_parent_refetch(Index element, Index index) {
    emit(BufferOp::ParentRefetch, element, index, -1, BufferMode::Buffet, 0);
}

namespace {

Index positive_mod(Index x, Index m) {
    return ((x % m) + m) % m;
}

}  // namespace

Tailor::Tailor(Count capacity, Count fifo_region) : core_(capacity), fifo_region_(fifo_region) {
    if (fifo_region < 1 || fifo_region > capacity)
        throw ContractError("fifo region must lie in [1, capacity]");
}

Count Tailor::occupancy() const {
    return mode_ == BufferMode::Buffet ? core_.occupancy() : capacity();
}

Index Tailor::fill(Index element) {
    if (mode_ == BufferMode::Overbooked)
        throw ContractError("fill while overbooked: no credits");
    return core_.fill(element);
}

std::optional<ReadResult> Tailor::read(Index index) {
    if (mode_ == BufferMode::Buffet) return core_.read(index);
    if (index < 0) throw ContractError("read with negative index");
    if (index < fifo_head()) {
        // Buffet-region slots survive the transition untouched.
        const Index element = core_.slots_[static_cast<std::size_t>(index)];
        core_.emit(BufferOp::Read, element, index, index, mode_, fifo_offset_);
        return ReadResult{index, element};
    }
    for (const auto& slot : window_) {
        if (slot.index == index) {
            const Index offset = *resolve_offset(index);
            core_.emit(BufferOp::Read, slot.element, index, offset, mode_, fifo_offset_);
            return ReadResult{offset, slot.element};
        }
    }
    return std::nullopt;  // stall: not resident, parent must stream it
}

std::optional<Index> Tailor::update(Index index, Index element) {
    if (mode_ == BufferMode::Buffet) return core_.update(index, element);
    if (index < 0) throw ContractError("update with negative index");
    if (index < fifo_head()) {
        core_.slots_[static_cast<std::size_t>(index)] = element;
        core_.emit(BufferOp::Update, element, index, index, mode_, fifo_offset_);
        return index;
    }
    for (auto& slot : window_) {
        if (slot.index == index) {
            slot.element = element;
            const Index offset = *resolve_offset(index);
            core_.emit(BufferOp::Update, element, index, offset, mode_, fifo_offset_);
            return offset;
        }
    }
    return std::nullopt;
}

void Tailor::shrink(Count num) {
    if (mode_ == BufferMode::Buffet) {
        core_.shrink(num);
        return;
    }
    if (num < 0 || num > occupancy()) throw ContractError("shrink count exceeds occupancy");
    // Logical content, head first: buffet region then the streamed window in
    // age order. Dropping from the head ends streaming; survivors fall back
    // to buffet management and the window metadata is discarded.
    std::deque<Index> content = core_.slots_;
    for (const auto& slot : window_) content.push_back(slot.element);
    const Count drop = std::min<Count>(num, static_cast<Count>(content.size()));
    content.erase(content.begin(), content.begin() + static_cast<std::ptrdiff_t>(drop));
    core_.slots_ = std::move(content);
    core_.emit(BufferOp::Shrink, -1, num, -1, mode_, fifo_offset_);
    mode_ = BufferMode::Buffet;
    window_.clear();
    fifo_offset_ = 0;
}

Index Tailor::owfill(Index element, Index index) {
    if (mode_ == BufferMode::Buffet) {
        if (core_.occupancy() != capacity())
            throw ContractError("overwriting fill requires a full buffer");
        // Transition: the tail fifo_region slots become the streaming
        // window; their occupants have already been consumed in order.
        core_.slots_.resize(static_cast<std::size_t>(fifo_head()));
        mode_ = BufferMode::Overbooked;
    }
    if (index < fifo_head())
        throw ContractError("streamed index falls inside the buffet-managed region");
    for (const auto& slot : window_) {
        if (slot.index == index) throw ContractError("streamed index already resident");
    }
    if (static_cast<Count>(window_.size()) == fifo_region_) window_.pop_front();
    window_.push_back({index, element});
    fifo_offset_ = window_.front().index - fifo_head();
    const Index offset = *resolve_offset(index);
    core_.emit(BufferOp::OWFill, element, index, offset, mode_, fifo_offset_);
    return offset;
}

std::optional<Index> Tailor::resolve_offset(Index index) const {
    if (mode_ == BufferMode::Buffet)
        return index < core_.occupancy() ? std::optional<Index>(index) : std::nullopt;
    if (index < fifo_head()) return index;
    for (const auto& slot : window_) {
        if (slot.index == index)
            return fifo_head() + positive_mod(index - fifo_offset_ - fifo_head(), fifo_region_);
    }
    return std::nullopt;
}

void Tailor::note_parent_refetch(Index element, Index index) {
    core_.emit(BufferOp::ParentRefetch, element, index, -1, mode_, fifo_offset_);
}

}  // namespace tailsim
