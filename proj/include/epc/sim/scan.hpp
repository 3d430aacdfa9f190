#pragma once

#include <string>
#include <vector>

#include "epc/sim/coincidence.hpp"
#include "epc/sim/config.hpp"

namespace epc {

/// One scan dimension: a named numeric parameter of ExperimentConfig and its values.
struct ScanAxis {
    std::string parameter;
    std::vector<double> values;
};

struct ScanResult {
    ScanAxis axis1, axis2;
    std::vector<CountsRecord> cells;  // row-major: cells[i1 * axis2.values.size() + i2]

    const CountsRecord& at(std::size_t i1, std::size_t i2) const {
        return cells[i1 * axis2.values.size() + i2];
    }
};

/// Scannable parameter names; unknown names raise ConfigError.
std::vector<std::string> scan_parameter_names();

/// Applies one named parameter to a config (used per grid point).
void apply_scan_parameter(ExperimentConfig& config, const std::string& parameter, double value);

/// Seed for grid point (i1, i2), derived from the base seed so every cell owns an
/// independent deterministic stream.
std::uint64_t scan_point_seed(std::uint64_t base_seed, std::size_t i1, std::size_t i2);

/// simulate + count per grid point; points execute concurrently (each owns its
/// derived seed and config copy, so results are scheduling-independent).
ScanResult scan_grid(const ExperimentConfig& base, const ScanAxis& axis1, const ScanAxis& axis2);

} // namespace epc
