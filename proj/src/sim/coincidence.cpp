#include "epc/sim/coincidence.hpp"

#include <cmath>

#include "epc/errors.hpp"
#include "epc/kernels/kernels.hpp"

namespace epc {

CoincidenceCounter::CoincidenceCounter(double window_s, std::int64_t offset_ps, double duration_s)
    : window_ps_(static_cast<std::int64_t>(std::llround(window_s * 1e12))),
      offset_ps_(offset_ps),
      window_s_(window_s),
      duration_s_(duration_s) {
    if (window_s < 0.0) throw std::invalid_argument("coincidence window must be nonnegative");
}

void CoincidenceCounter::on_events(Channel channel, std::span<const std::int64_t> times_ps) {
    if (times_ps.empty()) return;
    if (!kernels::is_sorted_i64(times_ps.data(), times_ps.size()))
        throw DataError("event stream is not sorted by time");
    auto& buf = channel == Channel::A ? a_ : b_;
    auto& last = channel == Channel::A ? last_a_ : last_b_;
    if (times_ps.front() < last) throw DataError("event stream is not sorted across chunks");
    last = times_ps.back();
    buf.insert(buf.end(), times_ps.begin(), times_ps.end());
    (channel == Channel::A ? singles_a_ : singles_b_) += times_ps.size();
    drain(false);
}

void CoincidenceCounter::on_finish() {
    drain(true);
}

void CoincidenceCounter::compact(std::vector<std::int64_t>& buf, std::size_t& head) {
    if (head > 4096 && head * 2 > buf.size()) {
        buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(head));
        head = 0;
    }
}

void CoincidenceCounter::drain(bool final_pass) {
    // exact integer acceptance test: 2|t_b - t_a - offset| <= window
    const std::int64_t w = window_ps_;
    while (a_head_ < a_.size()) {
        const std::int64_t ta = a_[a_head_];
        while (b_head_ < b_.size() && 2 * (b_[b_head_] - ta - offset_ps_) < -w) ++b_head_;
        if (b_head_ < b_.size()) {
            if (2 * (b_[b_head_] - ta - offset_ps_) <= w) {
                ++coincidences_;
                ++b_head_;
            }
            // else: earliest unconsumed B is already beyond the window; A stays unmatched
            ++a_head_;
            continue;
        }
        // B buffer exhausted: this A is decidable only if no future B can reach its window
        if (final_pass || 2 * (last_b_ - ta - offset_ps_) > w) {
            ++a_head_;
            continue;
        }
        break;
    }
    if (a_head_ == a_.size() && !final_pass) {
        // keep the B buffer pruned against the earliest possible future A
        while (b_head_ < b_.size() && 2 * (b_[b_head_] - last_a_ - offset_ps_) < -w) ++b_head_;
    }
    compact(a_, a_head_);
    compact(b_, b_head_);
}

CountsRecord CoincidenceCounter::record() const {
    CountsRecord rec;
    rec.singles_a = singles_a_;
    rec.singles_b = singles_b_;
    rec.coincidences = coincidences_;
    rec.duration_s = duration_s_;
    rec.window_s = window_s_;
    rec.offset_ps = offset_ps_;
    if (duration_s_ > 0.0)
        rec.accidental_estimate = static_cast<double>(singles_a_) * static_cast<double>(singles_b_) *
                                  window_s_ / duration_s_;
    return rec;
}

CountsRecord count_coincidences(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                double window_s, std::int64_t offset_ps, double duration_s) {
    CoincidenceCounter counter(window_s, offset_ps, duration_s);
    if (!a.empty()) counter.on_events(Channel::A, a);
    if (!b.empty()) counter.on_events(Channel::B, b);
    counter.on_finish();
    return counter.record();
}

} // namespace epc
