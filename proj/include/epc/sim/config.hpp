#pragma once

#include <cstdint>
#include <optional>

#include "epc/analytic.hpp"
#include "epc/quantum/state.hpp"

namespace epc {

struct FiberParams {
    double length_km = 0.0;
    double dispersion_ps_per_km_nm = 17.0;  // single-mode silica near 1550 nm
};

/// Full description of one simulated acquisition: source state and rates, per-arm
/// channels and detectors, coincidence logic, duration and seed.
struct ExperimentConfig {
    SourceStateModel state;
    RateSet rates;
    DetectorParams detector_a;
    DetectorParams detector_b;
    FiberParams fiber_a;
    FiberParams fiber_b;
    double source_bandwidth_nm = 0.0;  // spectral FWHM; 0 disables dispersion spread
    std::optional<PolarizationAxis> analyzer_a;  // absent = no polarizer, all photons pass
    std::optional<PolarizationAxis> analyzer_b;
    double duration_s = 1.0;
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError
    std::int64_t duration_ps() const;
};

} // namespace epc
