#include "epc/sim/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epc/errors.hpp"
#include "epc/kernels/kernels.hpp"

namespace epc {

double DelayHistogram::expected_floor_per_bin() const {
    if (duration_s <= 0.0) return 0.0;
    const double ra = static_cast<double>(singles_a) / duration_s;
    const double rb = static_cast<double>(singles_b) / duration_s;
    return ra * rb * (static_cast<double>(bin_width_ps) * 1e-12) * duration_s;
}

DelayHistogrammer::DelayHistogrammer(std::int64_t bin_width_ps, std::int64_t range_ps,
                                     double duration_s) {
    if (bin_width_ps <= 0) throw std::invalid_argument("histogram bin width must be positive");
    if (range_ps <= 0) throw std::invalid_argument("histogram range must be positive");
    const std::int64_t nbins = (2 * range_ps + bin_width_ps - 1) / bin_width_ps;
    hist_.bin_width_ps = bin_width_ps;
    hist_.lo_ps = -range_ps;
    hist_.bins.assign(static_cast<std::size_t>(nbins), 0);
    hist_.duration_s = duration_s;
    hi_ps_ = hist_.lo_ps + nbins * bin_width_ps;
}

void DelayHistogrammer::on_events(Channel channel, std::span<const std::int64_t> times_ps) {
    if (times_ps.empty()) return;
    if (!kernels::is_sorted_i64(times_ps.data(), times_ps.size()))
        throw DataError("event stream is not sorted by time");
    auto& buf = channel == Channel::A ? a_ : b_;
    auto& last = channel == Channel::A ? last_a_ : last_b_;
    if (times_ps.front() < last) throw DataError("event stream is not sorted across chunks");
    last = times_ps.back();
    buf.insert(buf.end(), times_ps.begin(), times_ps.end());
    (channel == Channel::A ? hist_.singles_a : hist_.singles_b) += times_ps.size();
    drain(false);
}

void DelayHistogrammer::on_finish() {
    drain(true);
    hist_.pair_count = 0;
    for (std::uint64_t c : hist_.bins) hist_.pair_count += c;
}

void DelayHistogrammer::drain(bool final_pass) {
    const std::size_t nbins = hist_.bins.size();
    while (a_head_ < a_.size()) {
        const std::int64_t ta = a_[a_head_];
        // an A is decidable once no future B can still land below its upper edge
        if (!final_pass && last_b_ < ta + hi_ps_) break;
        while (b_head_ < b_.size() && b_[b_head_] - ta < hist_.lo_ps) ++b_head_;
        const auto window_end = std::upper_bound(b_.begin() + static_cast<std::ptrdiff_t>(b_head_),
                                                 b_.end(), ta + hi_ps_ - 1);
        const std::size_t count = static_cast<std::size_t>(
            window_end - (b_.begin() + static_cast<std::ptrdiff_t>(b_head_)));
        if (count > 0)
            kernels::bin_delays(b_.data() + b_head_, count, ta, hist_.lo_ps, hist_.bin_width_ps,
                                hist_.bins.data(), nbins);
        ++a_head_;
    }
    if (a_head_ == a_.size() && !final_pass) {
        while (b_head_ < b_.size() && b_[b_head_] - last_a_ < hist_.lo_ps) ++b_head_;
    }
    if (a_head_ > 4096 && a_head_ * 2 > a_.size()) {
        a_.erase(a_.begin(), a_.begin() + static_cast<std::ptrdiff_t>(a_head_));
        a_head_ = 0;
    }
    if (b_head_ > 4096 && b_head_ * 2 > b_.size()) {
        b_.erase(b_.begin(), b_.begin() + static_cast<std::ptrdiff_t>(b_head_));
        b_head_ = 0;
    }
}

DelayHistogram delay_histogram(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                               std::int64_t bin_width_ps, std::int64_t range_ps,
                               double duration_s) {
    DelayHistogrammer h(bin_width_ps, range_ps, duration_s);
    if (!a.empty()) h.on_events(Channel::A, a);
    if (!b.empty()) h.on_events(Channel::B, b);
    h.on_finish();
    return h.histogram();
}

namespace {

// Rebin so the peak carries enough counts that its half level is not dominated by
// Poisson noise; the outermost-crossing FWHM below is then stable.
DelayHistogram rebinned_for_peak(const DelayHistogram& in) {
    std::uint64_t max_bin = 0;
    for (auto c : in.bins) max_bin = std::max(max_bin, c);
    std::size_t factor = 1;
    while (max_bin * factor < 400 && factor * 16 < in.bins.size()) factor *= 2;
    if (factor == 1) return in;
    DelayHistogram out;
    out.bin_width_ps = in.bin_width_ps * static_cast<std::int64_t>(factor);
    out.lo_ps = in.lo_ps;
    out.duration_s = in.duration_s;
    out.singles_a = in.singles_a;
    out.singles_b = in.singles_b;
    out.pair_count = in.pair_count;
    out.bins.assign((in.bins.size() + factor - 1) / factor, 0);
    for (std::size_t i = 0; i < in.bins.size(); ++i) out.bins[i / factor] += in.bins[i];
    return out;
}

} // namespace

FwhmEstimate estimate_fwhm(const DelayHistogram& input) {
    FwhmEstimate est;
    if (input.bins.empty()) return est;
    const DelayHistogram hist = rebinned_for_peak(input);

    std::vector<std::uint64_t> sorted(hist.bins);
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    est.floor_per_bin = static_cast<double>(sorted[sorted.size() / 2]);

    std::size_t peak = 0;
    for (std::size_t i = 1; i < hist.bins.size(); ++i)
        if (hist.bins[i] > hist.bins[peak]) peak = i;
    est.peak_delay_ps = hist.bin_center_ps(peak);
    // local mean around the argmax; a bare max rides its own Poisson fluctuation
    // upward and drags the measured width down
    {
        double sum = 0.0;
        int n = 0;
        for (std::size_t i = peak > 0 ? peak - 1 : 0;
             i <= std::min(peak + 1, hist.bins.size() - 1); ++i, ++n)
            sum += static_cast<double>(hist.bins[i]);
        est.peak_count = sum / n;
    }
    if (est.peak_count <= est.floor_per_bin) return est;

    const double half = est.floor_per_bin + 0.5 * (est.peak_count - est.floor_per_bin);
    const double w = static_cast<double>(hist.bin_width_ps);

    auto value = [&](std::size_t i) { return static_cast<double>(hist.bins[i]); };

    // width between the outermost half-level crossings; immune to noisy dips
    // inside the peak, and the flat floor sits well below the half level
    double left = hist.bin_center_ps(0) - 0.5 * w;
    for (std::size_t i = 0; i <= peak; ++i) {
        if (value(i) > half) {
            if (i > 0) {
                const double frac = (value(i) - half) / std::max(value(i) - value(i - 1), 1e-300);
                left = hist.bin_center_ps(i) - frac * w;
            }
            break;
        }
    }
    double right = hist.bin_center_ps(hist.bins.size() - 1) + 0.5 * w;
    for (std::size_t i = hist.bins.size(); i-- > peak;) {
        if (value(i) > half) {
            if (i + 1 < hist.bins.size()) {
                const double frac = (value(i) - half) / std::max(value(i) - value(i + 1), 1e-300);
                right = hist.bin_center_ps(i) + frac * w;
            }
            break;
        }
    }
    est.fwhm_ps = right - left;
    est.ok = est.fwhm_ps > 0.0;
    return est;
}

} // namespace epc
