#include "epc/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace epc {

void DetectorParams::validate() const {
    if (!(eta_q >= 0.0 && eta_q <= 1.0))
        throw std::invalid_argument("detector eta_q must be in [0, 1]");
    if (dead_time_s < 0.0) throw std::invalid_argument("detector dead time must be nonnegative");
    if (dark_rate_hz < 0.0) throw std::invalid_argument("detector dark rate must be nonnegative");
    if (!(afterpulse_prob >= 0.0 && afterpulse_prob < 1.0))
        throw std::invalid_argument("afterpulse probability must be in [0, 1)");
    if (afterpulse_tau_s < 0.0) throw std::invalid_argument("afterpulse tau must be nonnegative");
    if (afterpulse_prob > 0.0 && afterpulse_tau_s <= 0.0)
        throw std::invalid_argument("afterpulse tau must be positive when afterpulsing is enabled");
    if (jitter_sigma_s < 0.0) throw std::invalid_argument("jitter sigma must be nonnegative");
}

void RateSet::validate() const {
    if (pair_rate_hz < 0.0 || total_rate_hz < 0.0)
        throw std::invalid_argument("rates must be nonnegative");
    if (pair_rate_hz > total_rate_hz)
        throw std::invalid_argument("pair rate R_C cannot exceed total rate R");
    if (!(transmissivity_a >= 0.0 && transmissivity_a <= 1.0) ||
        !(transmissivity_b >= 0.0 && transmissivity_b <= 1.0))
        throw std::invalid_argument("transmissivities must be in [0, 1]");
    if (window_s < 0.0) throw std::invalid_argument("coincidence window must be nonnegative");
}

double RateSet::heralding() const {
    if (total_rate_hz <= 0.0) throw std::invalid_argument("heralding undefined for R = 0");
    return pair_rate_hz / total_rate_hz;
}

double total_efficiency(double eta_q, double incident_rate_hz, double dead_time_s) {
    if (!(eta_q >= 0.0 && eta_q <= 1.0) || incident_rate_hz < 0.0 || dead_time_s < 0.0)
        throw std::invalid_argument("total_efficiency: arguments must be nonnegative, eta_q <= 1");
    return eta_q / (1.0 + incident_rate_hz * eta_q * dead_time_s);
}

double expected_coincidence_rate(const RateSet& rates, const DetectorParams& det_a,
                                 const DetectorParams& det_b) {
    rates.validate();
    det_a.validate();
    det_b.validate();
    const double r = rates.total_rate_hz;
    const double ga = rates.transmissivity_a;
    const double gb = rates.transmissivity_b;
    const double den_a = 1.0 + r * ga * det_a.dead_time_s * det_a.eta_q;
    const double den_b = 1.0 + r * gb * det_b.dead_time_s * det_b.eta_q;
    return rates.pair_rate_hz * det_a.eta_q * det_b.eta_q * ga * gb / (den_a * den_b);
}

double false_coincidence_rate(double singles_a_hz, double singles_b_hz, double window_s) {
    if (singles_a_hz < 0.0 || singles_b_hz < 0.0 || window_s < 0.0)
        throw std::invalid_argument("false_coincidence_rate: inputs must be nonnegative");
    return singles_a_hz * singles_b_hz * window_s;
}

HeraldingEstimate heralding_probability(double measured_coinc_hz, double singles_a_hz,
                                        double singles_b_hz, double window_s,
                                        double eta_total_a, double eta_total_b) {
    if (!(eta_total_a > 0.0 && eta_total_a <= 1.0) || !(eta_total_b > 0.0 && eta_total_b <= 1.0))
        throw std::invalid_argument("heralding_probability: efficiencies must lie in (0, 1]");
    if (singles_a_hz <= 0.0 || singles_b_hz <= 0.0)
        throw std::invalid_argument("heralding_probability: singles rates must be positive");
    if (measured_coinc_hz < 0.0 || window_s < 0.0)
        throw std::invalid_argument("heralding_probability: inputs must be nonnegative");
    const double accidentals = singles_a_hz * singles_b_hz * window_s;
    const double num = measured_coinc_hz - accidentals;
    const double den = std::sqrt(eta_total_a * eta_total_b) * std::sqrt(singles_a_hz * singles_b_hz);
    HeraldingEstimate est;
    est.h = num / den;
    est.below_accidentals = num < 0.0;
    return est;
}

double snr(double true_coinc_hz, double false_coinc_hz) {
    if (false_coinc_hz <= 0.0)
        throw std::invalid_argument("snr: false-coincidence rate must be positive");
    if (true_coinc_hz < 0.0) throw std::invalid_argument("snr: true rate must be nonnegative");
    return true_coinc_hz / false_coinc_hz;
}

double dispersion_broadening_ps(double dispersion_ps_per_km_nm, double length_km,
                                double bandwidth_nm) {
    if (dispersion_ps_per_km_nm < 0.0 || length_km < 0.0 || bandwidth_nm < 0.0)
        throw std::invalid_argument("dispersion_broadening: inputs must be nonnegative");
    return dispersion_ps_per_km_nm * length_km * bandwidth_nm;
}

double qber_from_visibility(double v) {
    if (!(v >= -1.0 && v <= 1.0))
        throw std::invalid_argument("qber_from_visibility: V must be in [-1, 1]");
    return (1.0 - v) / 2.0;
}

double attenuation_db_to_transmissivity(double db) {
    return std::pow(10.0, -db / 10.0);
}

} // namespace epc
