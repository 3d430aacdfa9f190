#include "epc/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "epc/metrics/direct.hpp"
#include "epc/sim/generator.hpp"
#include "epc/sim/rng.hpp"
#include "epc/tomography/tomography.hpp"

namespace epc {

namespace {

// stream tags separating the pipeline's independent simulation batches
enum : std::uint64_t {
    kDirectScanTag = 0x6d657472,   // direct linear scan
    kQstScanTag = 0x71737463,      // QST projection scan
    kHeraldingTag = 0x6865726c,    // no-analyzer run
};

CountsRecord run_setting(const ExperimentConfig& base, std::optional<PolarizationAxis> a,
                         std::optional<PolarizationAxis> b, double duration_s,
                         std::uint64_t seed) {
    ExperimentConfig cfg = base;
    cfg.analyzer_a = a;
    cfg.analyzer_b = b;
    cfg.duration_s = duration_s;
    cfg.seed = seed;
    CoincidenceCounter counter(cfg.rates.window_s, 0, cfg.duration_s);
    simulate(cfg, counter);
    return counter.record();
}

} // namespace

BasisCounts simulate_setting_counts(const ExperimentConfig& base,
                                    std::span<const SettingKey> settings,
                                    double setting_duration_s, std::uint64_t stream_tag,
                                    bool subtract_accidentals) {
    BasisCounts counts;
    std::size_t idx = 0;
    for (const auto& key : settings) {
        const CountsRecord rec = run_setting(base, key.first, key.second, setting_duration_s,
                                             Rng::derive(base.seed, stream_tag, idx));
        double c = static_cast<double>(rec.coincidences);
        if (subtract_accidentals) c = std::max(0.0, c - rec.accidental_estimate);
        counts.set(key.first, key.second, c, setting_duration_s);
        ++idx;
    }
    return counts;
}

MetricsReport characterize_source(const RunConfig& config) {
    const ExperimentConfig& exp = config.experiment;
    MetricsReport report;
    report.provenance.config_hash = config.config_hash;
    report.provenance.seed = exp.seed;
    report.provenance.setting_duration_s = config.metrics.setting_duration_s;
    report.provenance.tomography_duration_s = config.tomography.setting_duration_s;
    report.provenance.accidentals_subtracted = config.metrics.subtract_accidentals;

    // direct block: 16-setting linear scan
    std::vector<SettingKey> linear_settings;
    for (PolarizationAxis a : {PolarizationAxis::H, PolarizationAxis::V, PolarizationAxis::D,
                               PolarizationAxis::A})
        for (PolarizationAxis b : {PolarizationAxis::H, PolarizationAxis::V, PolarizationAxis::D,
                                   PolarizationAxis::A})
            linear_settings.push_back({a, b});
    const BasisCounts direct = simulate_setting_counts(exp, linear_settings,
                                                       config.metrics.setting_duration_s,
                                                       kDirectScanTag,
                                                       config.metrics.subtract_accidentals);

    report.direct.visibility_hv = average_visibility(direct, LinearBasis::HV);
    report.direct.visibility_da = average_visibility(direct, LinearBasis::DA);
    report.direct.qber = qber(direct, exp.state.bell_kind);
    report.direct.entropy_a_bits = coincidence_entropies(direct, Side::A).total;
    report.direct.entropy_b_bits = coincidence_entropies(direct, Side::B).total;

    // heralding from a no-analyzer acquisition, with the model's total efficiencies
    {
        const CountsRecord open = run_setting(exp, std::nullopt, std::nullopt,
                                              config.metrics.setting_duration_s,
                                              Rng::derive(exp.seed, kHeraldingTag));
        const double ga = exp.rates.transmissivity_a;
        const double gb = exp.rates.transmissivity_b;
        const double eta_ta =
            ga * total_efficiency(exp.detector_a.eta_q, exp.rates.total_rate_hz * ga,
                                  exp.detector_a.dead_time_s);
        const double eta_tb =
            gb * total_efficiency(exp.detector_b.eta_q, exp.rates.total_rate_hz * gb,
                                  exp.detector_b.dead_time_s);
        report.direct.heralding =
            heralding_probability(open.coincidence_hz(), open.singles_a_hz(), open.singles_b_hz(),
                                  open.window_s, eta_ta, eta_tb);
    }

    // single-photon visibility extremes over the PC search grid
    const SvExtremes sv = sv_extremize(exp.state, Side::A);
    report.direct.sv_max = sv.sv_max;
    report.direct.sv_min = sv.sv_min;

    // QST block: canonical 16-setting scan, reconstructed by MLE
    const auto qst_settings = canonical_tomography_settings();
    const BasisCounts qst_counts = simulate_setting_counts(exp, qst_settings,
                                                           config.tomography.setting_duration_s,
                                                           kQstScanTag, false);
    const MLEResult mle = mle_reconstruct(qst_counts);
    report.qst.metrics = qst_metrics(mle.rho);
    report.qst.log_likelihood = mle.log_likelihood;
    report.qst.iterations = mle.iterations;
    report.qst.converged = mle.converged;
    return report;
}

} // namespace epc
