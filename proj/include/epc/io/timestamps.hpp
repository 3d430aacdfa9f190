#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <string>

#include "epc/sim/events.hpp"

namespace epc {

/// Streaming writer for the timestamp CSV format: header `channel,time_ps`,
/// channel A or B, nonnegative integer picoseconds, rows sorted by time
/// (channel A first on ties). Usable directly as a simulation sink; the two
/// channel streams are merged on the fly.
class TimestampCsvWriter final : public EventSink {
public:
    explicit TimestampCsvWriter(std::ostream& os);

    void on_events(Channel channel, std::span<const std::int64_t> times_ps) override;
    void on_finish() override;

private:
    void emit(Channel channel, std::int64_t t);
    void merge(bool final_pass);

    std::ostream& os_;
    std::deque<std::int64_t> a_, b_;
    std::int64_t high_a_ = INT64_MIN / 4, high_b_ = INT64_MIN / 4;
};

struct TimestampStats {
    std::uint64_t rows_a = 0;
    std::uint64_t rows_b = 0;
    std::int64_t last_time_ps = 0;
};

/// Streams a timestamp CSV into an event sink in bounded chunks. Malformed rows and
/// time-order violations raise DataError with the 1-based line number.
TimestampStats read_timestamps(std::istream& is, EventSink& sink, std::size_t chunk_rows = 65536);
TimestampStats read_timestamps_file(const std::string& path, EventSink& sink,
                                    std::size_t chunk_rows = 65536);

} // namespace epc
