#pragma once

#include <cstdint>

namespace epc {

/// Single-photon detector parameters. All times in seconds, rates in Hz.
struct DetectorParams {
    double eta_q = 1.0;            // quantum efficiency, [0, 1]
    double dead_time_s = 0.0;      // non-paralyzable dead time T_d
    double dark_rate_hz = 0.0;
    double afterpulse_prob = 0.0;  // per registered event, < 1
    double afterpulse_tau_s = 0.0; // mean exponential afterpulse delay
    double jitter_sigma_s = 0.0;   // Gaussian timing jitter std-dev

    void validate() const;  // throws std::invalid_argument
};

/// Source and channel rate description. R_C is the pair rate, R the total photon
/// rate per arm (paired + unpaired); heralding h = R_C / R.
struct RateSet {
    double pair_rate_hz = 0.0;   // R_C
    double total_rate_hz = 0.0;  // R
    double transmissivity_a = 1.0;
    double transmissivity_b = 1.0;
    double window_s = 0.0;       // coincidence window Delta_t

    void validate() const;
    double heralding() const;  // R_C / R; throws if R == 0
};

/// Total detector efficiency under dead-time saturation: eta_Q / (1 + R eta_Q T_d).
double total_efficiency(double eta_q, double incident_rate_hz, double dead_time_s);

/// Expected measured coincidence rate:
/// R_C eta_QA eta_QB gA gB / [(1 + R gA T_d_A eta_QA)(1 + R gB T_d_B eta_QB)].
double expected_coincidence_rate(const RateSet& rates, const DetectorParams& det_a,
                                 const DetectorParams& det_b);

/// Accidental-coincidence estimate R_MA * R_MB * Delta_t.
double false_coincidence_rate(double singles_a_hz, double singles_b_hz, double window_s);

struct HeraldingEstimate {
    double h = 0.0;
    bool below_accidentals = false;  // measured coincidences fell below the accidental estimate
};

/// h = (R_MC - R_M1 R_M2 dt) / (sqrt(eta_T1 eta_T2) sqrt(R_M1 R_M2)).
/// Negative estimates are returned as-is with the diagnostic flag set.
HeraldingEstimate heralding_probability(double measured_coinc_hz, double singles_a_hz,
                                        double singles_b_hz, double window_s,
                                        double eta_total_a, double eta_total_b);

double snr(double true_coinc_hz, double false_coinc_hz);

/// FWHM arrival-delay spread D * L * dLambda added by a fiber, in ps.
double dispersion_broadening_ps(double dispersion_ps_per_km_nm, double length_km,
                                double bandwidth_nm);

/// QBER = (1 - V) / 2 for V in [-1, 1].
double qber_from_visibility(double v);

/// Attenuation in dB to transmissivity, gamma = 10^(-dB/10).
double attenuation_db_to_transmissivity(double db);

} // namespace epc
