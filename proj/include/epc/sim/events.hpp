#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace epc {

enum class Channel : std::uint8_t { A = 0, B = 1 };

/// One registered detection: channel and integer picoseconds since run start.
struct DetectionEvent {
    Channel channel;
    std::int64_t time_ps;
};

/// Consumer of generated events. Chunks arrive per channel with nondecreasing
/// times, both within a chunk and across successive chunks of the same channel;
/// the two channels' flush frontiers advance together.
class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void on_events(Channel channel, std::span<const std::int64_t> times_ps) = 0;
    virtual void on_finish() {}
};

/// Collects everything in memory (fine at test scales; big runs should stream).
class VectorSink final : public EventSink {
public:
    void on_events(Channel channel, std::span<const std::int64_t> times_ps) override {
        auto& v = channel == Channel::A ? a : b;
        v.insert(v.end(), times_ps.begin(), times_ps.end());
    }
    std::vector<std::int64_t> a, b;
};

/// Fans one event stream out to several consumers.
class TeeSink final : public EventSink {
public:
    explicit TeeSink(std::vector<EventSink*> sinks) : sinks_(std::move(sinks)) {}
    void on_events(Channel channel, std::span<const std::int64_t> times_ps) override {
        for (auto* s : sinks_) s->on_events(channel, times_ps);
    }
    void on_finish() override {
        for (auto* s : sinks_) s->on_finish();
    }

private:
    std::vector<EventSink*> sinks_;
};

} // namespace epc
