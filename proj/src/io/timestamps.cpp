#include "epc/io/timestamps.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <vector>

#include "epc/errors.hpp"

namespace epc {

TimestampCsvWriter::TimestampCsvWriter(std::ostream& os) : os_(os) {
    os_ << "# epc detection events; time unit: picoseconds since run start\n";
    os_ << "channel,time_ps\n";
}

void TimestampCsvWriter::emit(Channel channel, std::int64_t t) {
    os_ << (channel == Channel::A ? "A," : "B,") << t << '\n';
}

void TimestampCsvWriter::on_events(Channel channel, std::span<const std::int64_t> times_ps) {
    if (times_ps.empty()) return;
    auto& q = channel == Channel::A ? a_ : b_;
    auto& high = channel == Channel::A ? high_a_ : high_b_;
    q.insert(q.end(), times_ps.begin(), times_ps.end());
    high = times_ps.back();
    merge(false);
}

void TimestampCsvWriter::on_finish() {
    merge(true);
    os_.flush();
}

void TimestampCsvWriter::merge(bool final_pass) {
    // A row may be written once the other channel's stream has provably passed it;
    // ties order channel A first.
    for (;;) {
        if (!a_.empty() && (final_pass || a_.front() <= high_b_) &&
            (b_.empty() || a_.front() <= b_.front())) {
            emit(Channel::A, a_.front());
            a_.pop_front();
            continue;
        }
        if (!b_.empty() && (final_pass || b_.front() < high_a_) &&
            (a_.empty() || b_.front() < a_.front())) {
            emit(Channel::B, b_.front());
            b_.pop_front();
            continue;
        }
        return;
    }
}

namespace {

struct ChunkBuffers {
    std::vector<std::int64_t> a, b;
};

void flush_chunks(ChunkBuffers& buf, EventSink& sink) {
    if (!buf.a.empty()) {
        sink.on_events(Channel::A, buf.a);
        buf.a.clear();
    }
    if (!buf.b.empty()) {
        sink.on_events(Channel::B, buf.b);
        buf.b.clear();
    }
}

} // namespace

TimestampStats read_timestamps(std::istream& is, EventSink& sink, std::size_t chunk_rows) {
    TimestampStats stats;
    ChunkBuffers buf;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::int64_t last_time = INT64_MIN;

    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line == "channel,time_ps") continue;
        }
        if (line.size() < 3 || (line[0] != 'A' && line[0] != 'B') || line[1] != ',')
            throw DataError("timestamps line " + std::to_string(lineno) +
                            ": expected 'A,<time_ps>' or 'B,<time_ps>'");
        std::int64_t t = 0;
        const char* begin = line.data() + 2;
        const char* end = line.data() + line.size();
        const auto [ptr, ec] = std::from_chars(begin, end, t);
        if (ec != std::errc() || ptr != end)
            throw DataError("timestamps line " + std::to_string(lineno) + ": bad time field '" +
                            std::string(begin, end) + "'");
        if (t < 0)
            throw DataError("timestamps line " + std::to_string(lineno) + ": negative time");
        if (t < last_time)
            throw DataError("timestamps line " + std::to_string(lineno) +
                            ": rows are not sorted by time");
        last_time = t;
        stats.last_time_ps = t;
        if (line[0] == 'A') {
            buf.a.push_back(t);
            ++stats.rows_a;
        } else {
            buf.b.push_back(t);
            ++stats.rows_b;
        }
        if (buf.a.size() + buf.b.size() >= chunk_rows) flush_chunks(buf, sink);
    }
    if (is.bad()) throw DataError("timestamps: read failure at line " + std::to_string(lineno));
    flush_chunks(buf, sink);
    sink.on_finish();
    return stats;
}

TimestampStats read_timestamps_file(const std::string& path, EventSink& sink,
                                    std::size_t chunk_rows) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open: " + path);
    try {
        return read_timestamps(is, sink, chunk_rows);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

} // namespace epc
