#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epc/sim/events.hpp"

namespace epc {

/// Histogram of all A-B arrival delays (t_B - t_A) within a symmetric range.
/// Bin i covers [lo_ps + i*w, lo_ps + (i+1)*w).
struct DelayHistogram {
    std::int64_t bin_width_ps = 0;
    std::int64_t lo_ps = 0;
    std::vector<std::uint64_t> bins;
    std::uint64_t pair_count = 0;    // sum of bins
    std::uint64_t singles_a = 0;
    std::uint64_t singles_b = 0;
    double duration_s = 0.0;

    double bin_center_ps(std::size_t i) const {
        return static_cast<double>(lo_ps) + (static_cast<double>(i) + 0.5) * bin_width_ps;
    }
    /// Expected flat accidental level per bin, R_MA * R_MB * w * T.
    double expected_floor_per_bin() const;
};

/// Streaming histogrammer over the same chunked event interface as the counter.
/// Pairs are not one-to-one matched: every B within range of an A is binned.
class DelayHistogrammer final : public EventSink {
public:
    DelayHistogrammer(std::int64_t bin_width_ps, std::int64_t range_ps, double duration_s);

    void on_events(Channel channel, std::span<const std::int64_t> times_ps) override;
    void on_finish() override;

    /// Valid after on_finish().
    const DelayHistogram& histogram() const { return hist_; }

private:
    void drain(bool final_pass);

    DelayHistogram hist_;
    std::vector<std::int64_t> a_, b_;
    std::size_t a_head_ = 0, b_head_ = 0;
    std::int64_t last_a_ = INT64_MIN / 4, last_b_ = INT64_MIN / 4;
    std::int64_t hi_ps_ = 0;  // lo + nbins * width
};

DelayHistogram delay_histogram(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                               std::int64_t bin_width_ps, std::int64_t range_ps, double duration_s);

struct FwhmEstimate {
    bool ok = false;
    double fwhm_ps = 0.0;
    double peak_delay_ps = 0.0;
    double peak_count = 0.0;
    double floor_per_bin = 0.0;  // median bin level used as the background
};

/// Peak width at half maximum above the flat background (median bin level),
/// with linear interpolation at the half crossings.
FwhmEstimate estimate_fwhm(const DelayHistogram& hist);

} // namespace epc
