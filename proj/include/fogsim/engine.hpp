// Deterministic discrete-event kernel: a virtual clock plus an event queue
// ordered by (fire_at, sequence). Ties between equal timestamps are broken
// by insertion order, so handlers see events first-come first-served.

#pragma once

#include "fogsim/errors.hpp"
#include "fogsim/sim_time.hpp"

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

namespace fogsim {

enum class EventKind : std::uint8_t { TupleEmit, TransferArrive, ServiceComplete, SimEnd };

inline std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::TupleEmit: return "TupleEmit";
    case EventKind::TransferArrive: return "TransferArrive";
    case EventKind::ServiceComplete: return "ServiceComplete";
    case EventKind::SimEnd: return "SimEnd";
    }
    return "?";
}

// -1 marks an unused field.
struct EventPayload {
    std::int64_t tuple = -1;
    std::int32_t device = -1;
    std::int32_t module = -1;
    std::int32_t target = -1; // handler-defined (instance, server or edge index)
};

struct SimEvent {
    SimTime fire_at;
    std::uint64_t sequence = 0;
    EventKind kind = EventKind::SimEnd;
    EventPayload payload;
};

class EventQueue {
public:
    void push(SimEvent ev) { heap_.push(std::move(ev)); }

    [[nodiscard]] const SimEvent& top() const { return heap_.top(); }

    SimEvent pop() {
        SimEvent ev = heap_.top();
        heap_.pop();
        return ev;
    }

    [[nodiscard]] bool empty() const { return heap_.empty(); }
    [[nodiscard]] std::size_t size() const { return heap_.size(); }

    // Copy of the pending events in pop order; used for in-flight accounting.
    [[nodiscard]] std::vector<SimEvent> snapshot() const {
        auto copy = heap_;
        std::vector<SimEvent> out;
        out.reserve(copy.size());
        while (!copy.empty()) {
            out.push_back(copy.top());
            copy.pop();
        }
        return out;
    }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.sequence > b.sequence;
        }
    };
    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
};

class Engine {
public:
    [[nodiscard]] SimTime now() const { return clock_; }
    [[nodiscard]] std::size_t pending() const { return queue_.size(); }
    [[nodiscard]] std::uint64_t processed() const { return processed_; }
    [[nodiscard]] const EventQueue& queue() const { return queue_; }

    // Trace sink: one `time_us,kind,device_id,module_id,tuple_id` line per
    // processed event. Pass nullptr to disable.
    void set_trace(std::ostream* os) { trace_ = os; }

    std::uint64_t schedule(SimTime fire_at, EventKind kind, EventPayload payload = {}) {
        if (fire_at < clock_) {
            throw SchedulingInPast("event at " + std::to_string(fire_at.us()) + "us scheduled with clock at " +
                                   std::to_string(clock_.us()) + "us");
        }
        const auto seq = next_sequence_++;
        queue_.push(SimEvent{fire_at, seq, kind, payload});
        return seq;
    }

    std::uint64_t schedule_in(SimTime delay, EventKind kind, EventPayload payload = {}) {
        if (delay < SimTime{}) throw SchedulingInPast("negative delay " + std::to_string(delay.us()) + "us");
        return schedule(clock_ + delay, kind, payload);
    }

    // Processes every event with fire_at <= end (inclusive) in order, calling
    // handler(const SimEvent&) for each. Handlers may schedule further events.
    // The clock finishes at `end`.
    template <typename Handler>
    SimTime run_until(SimTime end, Handler&& handler) {
        if (end < clock_) throw SchedulingInPast("run_until target precedes the clock");
        while (!queue_.empty() && queue_.top().fire_at <= end) {
            SimEvent ev = queue_.pop();
            clock_ = ev.fire_at;
            ++processed_;
            if (trace_ != nullptr) {
                *trace_ << ev.fire_at.us() << ',' << to_string(ev.kind) << ',' << ev.payload.device << ','
                        << ev.payload.module << ',' << ev.payload.tuple << '\n';
            }
            handler(ev);
        }
        clock_ = end;
        return clock_;
    }

    SimTime run_until(SimTime end) {
        return run_until(end, [](const SimEvent&) {});
    }

private:
    SimTime clock_;
    std::uint64_t next_sequence_ = 0;
    std::uint64_t processed_ = 0;
    EventQueue queue_;
    std::ostream* trace_ = nullptr;
};

} // namespace fogsim
