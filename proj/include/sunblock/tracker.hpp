#pragma once

// Sliding-window trackers behind detection_filter and scan_filter.
//
// A window of length W at time `now` holds the events with timestamp in
// (now - W, now]. A note fires when it takes the live count from below
// `threshold` to at least `threshold`. While the count stays at or above the
// threshold nothing further fires; once eviction drops it below, the next
// crossing fires again.

#include <sunblock/packet.hpp>
#include <sunblock/time.hpp>

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <utility>

namespace sunblock {

struct NoteResult {
    std::size_t live = 0;
    bool fired = false;
};

inline NoteResult crossing(std::size_t before, std::size_t after, std::size_t threshold) {
    return {after, before < threshold && after >= threshold};
}

class EventWindow {
public:
    NoteResult note(Timestamp now, Duration window, std::size_t threshold) {
        evict(now, window);
        const std::size_t before = events_.size();
        events_.push_back(now);
        return crossing(before, events_.size(), threshold);
    }

    std::size_t live(Timestamp now, Duration window) {
        evict(now, window);
        return events_.size();
    }

    bool idle(Timestamp now, Duration window) { return live(now, window) == 0; }

private:
    void evict(Timestamp now, Duration window) {
        while (!events_.empty() && events_.front() <= now - window) events_.pop_front();
    }

    std::deque<Timestamp> events_;
};

class DistinctWindow {
public:
    NoteResult note(std::uint64_t value, Timestamp now, Duration window, std::size_t threshold) {
        evict(now, window);
        const std::size_t before = last_seen_.size();
        last_seen_[value] = now;
        entries_.emplace_back(now, value);
        return crossing(before, last_seen_.size(), threshold);
    }

    std::size_t live(Timestamp now, Duration window) {
        evict(now, window);
        return last_seen_.size();
    }

    bool idle(Timestamp now, Duration window) {
        evict(now, window);
        return entries_.empty();
    }

private:
    void evict(Timestamp now, Duration window) {
        while (!entries_.empty() && entries_.front().first <= now - window) {
            auto [ts, value] = entries_.front();
            entries_.pop_front();
            auto it = last_seen_.find(value);
            if (it != last_seen_.end() && it->second == ts) last_seen_.erase(it);
        }
    }

    std::deque<std::pair<Timestamp, std::uint64_t>> entries_;
    std::unordered_map<std::uint64_t, Timestamp> last_seen_;
};

// Trackers keyed by (sid, tracked address). Owned by one rule session.
class TrackerTable {
public:
    NoteResult note_event(std::uint32_t sid, Ipv4Addr key, Timestamp now, Duration window, std::size_t threshold) {
        return events_[slot(sid, key)].note(now, window, threshold);
    }

    NoteResult note_distinct(std::uint32_t sid, Ipv4Addr key, std::uint64_t value, Timestamp now, Duration window,
                             std::size_t threshold) {
        return distinct_[slot(sid, key)].note(value, now, window, threshold);
    }

    std::size_t size() const { return events_.size() + distinct_.size(); }

    void clear() {
        events_.clear();
        distinct_.clear();
    }

    // Drops trackers whose window has drained; they are indistinguishable
    // from fresh ones. `window_of` maps sid to its window.
    template <class WindowOf>
    void prune(Timestamp now, WindowOf&& window_of) {
        std::erase_if(events_, [&](auto& kv) { return kv.second.idle(now, window_of(sid_of(kv.first))); });
        std::erase_if(distinct_, [&](auto& kv) { return kv.second.idle(now, window_of(sid_of(kv.first))); });
    }

private:
    static std::uint64_t slot(std::uint32_t sid, Ipv4Addr key) { return std::uint64_t{sid} << 32 | key.value(); }
    static std::uint32_t sid_of(std::uint64_t slot) { return static_cast<std::uint32_t>(slot >> 32); }

    std::unordered_map<std::uint64_t, EventWindow> events_;
    std::unordered_map<std::uint64_t, DistinctWindow> distinct_;
};

}  // namespace sunblock
