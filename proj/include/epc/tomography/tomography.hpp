#pragma once

#include <cstdint>
#include <vector>

#include "epc/counts.hpp"
#include "epc/quantum/state.hpp"

namespace epc {

/// The canonical 16-setting protocol {H,V,D,R} x {H,V,D,R}.
std::vector<SettingKey> canonical_tomography_settings();

/// Overcomplete 36-setting protocol {H,V,D,A,R,L}^2.
std::vector<SettingKey> full_tomography_settings();

/// Requires every canonical setting to be present (extra settings are welcome and used).
void validate_tomography_counts(const BasisCounts& counts);

/// counts ~ Poisson(shots * Tr(rho P_a x P_b)) per setting, deterministic per seed.
BasisCounts sample_projection_counts(const DensityMatrix& rho,
                                     const std::vector<SettingKey>& settings, double shots,
                                     std::uint64_t seed);

/// Exact expectations shots * p_s (no sampling); for noiseless pipelines.
BasisCounts expected_projection_counts(const DensityMatrix& rho,
                                       const std::vector<SettingKey>& settings, double shots);

/// Canonical-protocol convenience wrapper around sample_projection_counts.
BasisCounts simulate_tomography(const DensityMatrix& rho, double shots_per_setting,
                                std::uint64_t seed);

/// Algebraic reconstruction: solves the linear system relating the Hermitian state
/// coordinates to measured setting frequencies. Unit trace, Hermitian; PSD is NOT
/// guaranteed under finite-count noise.
Mat4 linear_inversion(const BasisCounts& counts);

struct MleOptions {
    int max_iter = 10000;
    double tol = 1e-10;  // relative likelihood-change and parameter-step threshold
};

struct MLEResult {
    DensityMatrix rho;           // PSD, trace-1 by construction
    double log_likelihood = 0.0; // Poisson log-likelihood up to counts-only constants
    int iterations = 0;
    bool converged = false;
    Mat4 linear_inversion_rho;   // unconstrained estimate kept for diagnostics
    std::vector<double> likelihood_trace;  // accepted iterates, nondecreasing
};

/// Maximum-likelihood reconstruction over the Cholesky-style parameterization
/// rho = T T† / Tr(T T†) (16 real parameters, T lower-triangular), maximizing the
/// independent-Poisson likelihood of the observed counts by BFGS with backtracking,
/// seeded from the PSD-projected linear inversion.
MLEResult mle_reconstruct(const BasisCounts& counts, const MleOptions& options = {});

struct QstMetrics {
    double purity = 0.0;
    double von_neumann_bits = 0.0;
    double renyi2_a_nats = 0.0;
    double renyi2_b_nats = 0.0;
    double bell_fidelity = 0.0;  // max over the four Bell states of <bell|rho|bell>
    BellKind nearest_bell = BellKind::PhiPlus;
};

QstMetrics qst_metrics(const DensityMatrix& rho);

} // namespace epc
