#pragma once

#include <span>

#include "epc/io/config_file.hpp"
#include "epc/io/reports.hpp"

namespace epc {

/// Runs one event-level simulation per analyzer setting (derived per-setting seeds)
/// and returns the coincidence count table. Counts are optionally corrected by each
/// setting's own accidental estimate.
BasisCounts simulate_setting_counts(const ExperimentConfig& base,
                                    std::span<const SettingKey> settings,
                                    double setting_duration_s, std::uint64_t stream_tag,
                                    bool subtract_accidentals);

/// The full characterization pipeline behind `epc metrics`: a 16-setting linear
/// scan for the direct metrics, a no-analyzer run for heralding, the PC search for
/// SV extremes, and a 16-setting QST scan reconstructed by MLE. Every number comes
/// from simulated detection events of the configured source.
MetricsReport characterize_source(const RunConfig& config);

} // namespace epc
