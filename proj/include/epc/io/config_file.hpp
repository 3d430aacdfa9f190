#pragma once

#include <iosfwd>
#include <string>

#include "epc/sim/config.hpp"
#include "epc/sim/scan.hpp"

namespace epc {

/// Everything a command run needs: the experiment plus command-specific sections.
/// Parsed from the hierarchical key-value config format (strict schema; unknown
/// keys are rejected with their line number).
struct RunConfig {
    ExperimentConfig experiment;

    struct Scan {
        bool present = false;
        ScanAxis axis1, axis2;
    } scan;

    struct Histogram {
        std::int64_t bin_ps = 100;
        std::int64_t range_ps = 10000;
    } histogram;

    struct Metrics {
        double setting_duration_s = 1.0;  // per analyzer setting of the direct scan
        bool subtract_accidentals = false;
    } metrics;

    struct Tomography {
        double setting_duration_s = 1.0;  // per QST projection setting
    } tomography;

    std::string output_dir;   // optional; CLI flag and EPC_OUT_DIR can override
    std::string config_hash;  // FNV-1a of the raw config bytes (provenance)
};

RunConfig parse_run_config(std::istream& is, const std::string& name_for_errors);
RunConfig load_run_config(const std::string& path);

/// The schema text (key, unit, meaning), printable via `epc config-help`.
std::string config_schema_help();

} // namespace epc
