#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epc/sim/events.hpp"

namespace epc {

/// Counts bridging events to metrics: per-channel singles, matched coincidences,
/// and the accidental estimate R_MA * R_MB * dt * T.
struct CountsRecord {
    std::uint64_t singles_a = 0;
    std::uint64_t singles_b = 0;
    std::uint64_t coincidences = 0;
    double duration_s = 0.0;
    double window_s = 0.0;
    std::int64_t offset_ps = 0;
    double accidental_estimate = 0.0;

    double singles_a_hz() const { return duration_s > 0 ? singles_a / duration_s : 0.0; }
    double singles_b_hz() const { return duration_s > 0 ? singles_b / duration_s : 0.0; }
    double coincidence_hz() const { return duration_s > 0 ? coincidences / duration_s : 0.0; }
};

/// Streaming greedy pairer: an A event matches the earliest unconsumed B event with
/// 2|t_B - t_A - offset| <= window (exact integer comparison); each event is consumed
/// at most once. Push order per channel must be nondecreasing in time.
class CoincidenceCounter final : public EventSink {
public:
    CoincidenceCounter(double window_s, std::int64_t offset_ps, double duration_s);

    void on_events(Channel channel, std::span<const std::int64_t> times_ps) override;
    void on_finish() override;

    /// Valid after on_finish().
    CountsRecord record() const;

private:
    void drain(bool final_pass);
    void compact(std::vector<std::int64_t>& buf, std::size_t& head);

    std::vector<std::int64_t> a_, b_;
    std::size_t a_head_ = 0, b_head_ = 0;
    // far past, but with headroom so the doubled window arithmetic cannot overflow
    std::int64_t last_a_ = INT64_MIN / 4, last_b_ = INT64_MIN / 4;
    std::int64_t window_ps_ = 0;
    std::int64_t offset_ps_ = 0;
    double window_s_ = 0.0;
    double duration_s_ = 0.0;
    std::uint64_t singles_a_ = 0, singles_b_ = 0, coincidences_ = 0;
};

/// One-shot counting of two full in-memory streams; validates that both are sorted.
CountsRecord count_coincidences(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                double window_s, std::int64_t offset_ps, double duration_s);

} // namespace epc
