#pragma once

#include <array>
#include <string>
#include <vector>

#include "epc/counts.hpp"
#include "epc/quantum/state.hpp"

namespace epc {

/// Eq.-style visibility V_j = (N_jj - N_jk) / (N_jj + N_jk), k the orthogonal
/// partner of j. Counts are taken as rates so unequal setting durations are fair.
double visibility(const BasisCounts& counts, PolarizationAxis j);

enum class LinearBasis { HV, DA };

/// Mean of V_j and V_k over the basis; sign convention expects phi+ correlations.
double average_visibility(const BasisCounts& counts, LinearBasis basis);

struct CurveFit {
    double visibility = 0.0;
    double offset = 0.0;      // fitted C0
    double amplitude = 0.0;   // fitted sinusoid amplitude in 2*theta
    double phase_deg = 0.0;
    bool degenerate = false;  // flat data; visibility forced to 0
};

/// Least-squares fit of C(theta) = C0 (1 + V cos(2(theta - theta0))) to
/// (angle_deg, counts) samples; the rotating analyzer angle is detected as the
/// column that varies. Needs >= 8 points.
CurveFit visibility_curve(const std::vector<std::array<double, 3>>& settings);

/// Ratio of wrong- to total-correlation coincidences over the HV and DA bases,
/// with correct/incorrect assignment following the expected Bell state.
double qber(const BasisCounts& counts, BellKind expected_state);

/// Per-axis terms of the one-sided coincidence entropy.
struct EntropyReport {
    Side side = Side::A;
    std::array<double, 4> h_same{};   // indexed by {H, V, D, A}
    std::array<double, 4> h_cross{};
    double total = 0.0;               // sum of all eight terms, <= 8
};

/// One-sided coincidence entropies: for each j in {H,V,D,A} on the chosen side,
/// H_same_j = 1 - H2(p_jj, p_jk) and H_cross_j = H2(p_jl, p_jm), probabilities
/// normalized within each pair; the scanned analyzer is the other side's.
EntropyReport coincidence_entropies(const BasisCounts& counts, Side side);

/// Singles counts versus a rotating linear polarizer in one arm.
struct SinglesScan {
    Side arm = Side::A;
    std::vector<std::array<double, 2>> samples;  // (polarizer_angle_deg, singles_count)
    std::string pc_setting;                      // identifier of the PC unitary used

    void validate() const;  // >= 4 distinct angles spanning >= 180 degrees
};

/// (max - min)/(max + min) of the fitted 2theta-sinusoid over the scan.
double single_photon_visibility(const SinglesScan& scan);

/// A polarization-controller setting in the search grid: the rotation taking the
/// arm state's Bloch vector to the given direction.
struct PcSetting {
    std::array<double, 3> direction{0.0, 0.0, 1.0};
    int index = -1;
};

struct SvExtremes {
    double sv_max = 0.0;
    double sv_min = 0.0;
    PcSetting argmax;
    PcSetting argmin;
};

/// Extremal single-photon visibility over a deterministic Fibonacci-sphere grid of
/// PC rotations applied before the rotating linear polarizer. SV for a setting is
/// the in-plane (linear) component of the rotated Bloch vector.
SvExtremes sv_extremize(const SourceStateModel& source, Side arm, std::size_t grid_points = 400);

/// Same search against an explicit reduced state (used by tests and reports).
SvExtremes sv_extremize_reduced(const Mat2& reduced, std::size_t grid_points = 400);

} // namespace epc
