#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "epc/analytic.hpp"
#include "epc/metrics/direct.hpp"
#include "epc/sim/coincidence.hpp"
#include "epc/sim/histogram.hpp"
#include "epc/sim/scan.hpp"
#include "epc/tomography/tomography.hpp"

namespace epc {

/// All scalar metrics of one source characterization, direct and QST, with the
/// acquisition provenance needed to reproduce them.
struct MetricsReport {
    std::string source_label = "source";

    struct Direct {
        HeraldingEstimate heralding;
        double visibility_hv = 0.0;
        double visibility_da = 0.0;
        double qber = 0.0;
        double entropy_a_bits = 0.0;
        double entropy_b_bits = 0.0;
        double sv_max = 0.0;
        double sv_min = 0.0;
    } direct;

    struct Qst {
        QstMetrics metrics;
        double log_likelihood = 0.0;
        int iterations = 0;
        bool converged = true;
    } qst;

    struct Provenance {
        std::string config_hash;
        std::uint64_t seed = 0;
        double setting_duration_s = 0.0;
        double tomography_duration_s = 0.0;
        bool accidentals_subtracted = false;
    } provenance;
};

std::string metrics_report_to_json(const MetricsReport& report);

/// Aligned text table in the column order p, S, Y_A, V_HV, V_DA, QBER, H_A, H_B,
/// SV_max, SV_min.
std::string metrics_report_table(const MetricsReport& report);

std::string counts_record_to_json(const CountsRecord& rec);
std::string mle_result_to_json(const MLEResult& result, const QstMetrics& metrics);

/// Per-axis same/cross entropy terms plus the total, all in bits.
std::string entropy_report_to_json(const EntropyReport& report);

/// CSV with `delay_ps,counts` rows (bin centers).
void write_histogram_csv(std::ostream& os, const DelayHistogram& hist);

/// One CSV per observable; first row/column carry the axis values.
void write_scan_csv(std::ostream& os, const ScanResult& scan, const std::string& observable);

} // namespace epc
