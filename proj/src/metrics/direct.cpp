#include "epc/metrics/direct.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "epc/errors.hpp"

namespace epc {

namespace {

double binary_entropy_bits(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

constexpr std::array<PolarizationAxis, 4> kLinearAxes = {
    PolarizationAxis::H, PolarizationAxis::V, PolarizationAxis::D, PolarizationAxis::A};

// linear polarizations rotated +-45 degrees from j
std::pair<PolarizationAxis, PolarizationAxis> cross_pair(PolarizationAxis j) {
    switch (j) {
        case PolarizationAxis::H:
        case PolarizationAxis::V: return {PolarizationAxis::D, PolarizationAxis::A};
        default: return {PolarizationAxis::H, PolarizationAxis::V};
    }
}

double rate_of(const BasisCounts& counts, PolarizationAxis a, PolarizationAxis b) {
    return counts.at(a, b).rate_hz();
}

struct Lsq2ThetaFit {
    double c0 = 0.0, a = 0.0, b = 0.0;  // y = c0 + a cos(2t) + b sin(2t)
    bool ok = false;
};

Lsq2ThetaFit fit_2theta(const std::vector<std::array<double, 2>>& pts) {
    // normal equations for the 3-parameter linear model
    double s[3][3] = {};
    double r[3] = {};
    for (const auto& p : pts) {
        const double t = 2.0 * p[0] * M_PI / 180.0;
        const double basis[3] = {1.0, std::cos(t), std::sin(t)};
        for (int i = 0; i < 3; ++i) {
            r[i] += basis[i] * p[1];
            for (int j = 0; j < 3; ++j) s[i][j] += basis[i] * basis[j];
        }
    }
    // Gaussian elimination with partial pivoting
    int piv[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(s[piv[row]][col]) > std::abs(s[piv[best]][col])) best = row;
        std::swap(piv[col], piv[best]);
        const double d = s[piv[col]][col];
        if (std::abs(d) < 1e-12) return {};
        for (int row = col + 1; row < 3; ++row) {
            const double f = s[piv[row]][col] / d;
            for (int j = col; j < 3; ++j) s[piv[row]][j] -= f * s[piv[col]][j];
            r[piv[row]] -= f * r[piv[col]];
        }
    }
    double x[3];
    for (int col = 2; col >= 0; --col) {
        double v = r[piv[col]];
        for (int j = col + 1; j < 3; ++j) v -= s[piv[col]][j] * x[j];
        x[col] = v / s[piv[col]][col];
    }
    return {x[0], x[1], x[2], true};
}

} // namespace

double visibility(const BasisCounts& counts, PolarizationAxis j) {
    const PolarizationAxis k = orthogonal_axis(j);
    const double n_jj = rate_of(counts, j, j);
    const double n_jk = rate_of(counts, j, k);
    const double den = n_jj + n_jk;
    if (den <= 0.0)
        throw DataError("visibility undefined: zero total counts for axis " + axis_name(j));
    return (n_jj - n_jk) / den;
}

double average_visibility(const BasisCounts& counts, LinearBasis basis) {
    const PolarizationAxis j =
        basis == LinearBasis::HV ? PolarizationAxis::H : PolarizationAxis::D;
    const PolarizationAxis k = orthogonal_axis(j);
    return 0.5 * (visibility(counts, j) + visibility(counts, k));
}

CurveFit visibility_curve(const std::vector<std::array<double, 3>>& settings) {
    if (settings.size() < 8)
        throw std::invalid_argument("visibility_curve: need at least 8 points");
    double lo[2] = {settings[0][0], settings[0][1]};
    double hi[2] = {settings[0][0], settings[0][1]};
    for (const auto& s : settings)
        for (int c = 0; c < 2; ++c) {
            lo[c] = std::min(lo[c], s[c]);
            hi[c] = std::max(hi[c], s[c]);
        }
    const bool varies_a = hi[0] - lo[0] > 1e-9;
    const bool varies_b = hi[1] - lo[1] > 1e-9;
    if (varies_a && varies_b)
        throw std::invalid_argument("visibility_curve: both analyzer angles vary");
    const int col = varies_a ? 0 : 1;

    std::vector<std::array<double, 2>> pts;
    pts.reserve(settings.size());
    for (const auto& s : settings) pts.push_back({s[col], s[2]});

    CurveFit fit;
    const Lsq2ThetaFit f = fit_2theta(pts);
    if (!f.ok || f.c0 <= 0.0) {
        fit.degenerate = true;
        return fit;
    }
    fit.offset = f.c0;
    fit.amplitude = std::sqrt(f.a * f.a + f.b * f.b);
    fit.phase_deg = 0.5 * std::atan2(f.b, f.a) * 180.0 / M_PI;
    if (fit.amplitude < 1e-9 * std::max(1.0, f.c0)) {
        fit.degenerate = true;
        fit.visibility = 0.0;
        return fit;
    }
    fit.visibility = fit.amplitude / fit.offset;
    return fit;
}

double qber(const BasisCounts& counts, BellKind expected_state) {
    const bool hv_correlated =
        expected_state == BellKind::PhiPlus || expected_state == BellKind::PhiMinus;
    const bool da_correlated =
        expected_state == BellKind::PhiPlus || expected_state == BellKind::PsiPlus;

    double correct = 0.0, incorrect = 0.0;
    auto add_basis = [&](PolarizationAxis j, bool correlated) {
        const PolarizationAxis k = orthogonal_axis(j);
        const double same = rate_of(counts, j, j) + rate_of(counts, k, k);
        const double cross = rate_of(counts, j, k) + rate_of(counts, k, j);
        correct += correlated ? same : cross;
        incorrect += correlated ? cross : same;
    };
    add_basis(PolarizationAxis::H, hv_correlated);
    add_basis(PolarizationAxis::D, da_correlated);

    const double total = correct + incorrect;
    if (total <= 0.0) throw DataError("qber undefined: zero total counts");
    return incorrect / total;
}

EntropyReport coincidence_entropies(const BasisCounts& counts, Side side) {
    // verify the full 16-setting linear table up front, reporting every absent pair
    std::string missing;
    for (PolarizationAxis j : kLinearAxes)
        for (PolarizationAxis x : kLinearAxes) {
            const PolarizationAxis first = side == Side::A ? j : x;
            const PolarizationAxis second = side == Side::A ? x : j;
            if (!counts.has(first, second))
                missing += " (" + axis_name(first) + "," + axis_name(second) + ")";
        }
    if (!missing.empty())
        throw DataError("coincidence_entropies: missing settings:" + missing);

    auto rate = [&](PolarizationAxis j, PolarizationAxis x) {
        // j indexes the chosen side's analyzer, x scans the other side
        return side == Side::A ? rate_of(counts, j, x) : rate_of(counts, x, j);
    };

    EntropyReport rep;
    rep.side = side;
    for (std::size_t idx = 0; idx < 4; ++idx) {
        const PolarizationAxis j = kLinearAxes[idx];
        const PolarizationAxis k = orthogonal_axis(j);
        const auto [l, m] = cross_pair(j);
        const double n_same = rate(j, j) + rate(j, k);
        const double n_cross = rate(j, l) + rate(j, m);
        if (n_same <= 0.0 || n_cross <= 0.0)
            throw DataError("coincidence_entropies: zero pair total for axis " + axis_name(j));
        rep.h_same[idx] = 1.0 - binary_entropy_bits(rate(j, j) / n_same);
        rep.h_cross[idx] = binary_entropy_bits(rate(j, l) / n_cross);
        rep.total += rep.h_same[idx] + rep.h_cross[idx];
    }
    return rep;
}

void SinglesScan::validate() const {
    std::set<double> distinct;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& s : samples) {
        distinct.insert(s[0]);
        if (first) {
            lo = hi = s[0];
            first = false;
        } else {
            lo = std::min(lo, s[0]);
            hi = std::max(hi, s[0]);
        }
    }
    if (distinct.size() < 4)
        throw DataError("singles scan needs at least 4 distinct polarizer angles");
    if (hi - lo < 180.0 - 1e-9)
        throw DataError("singles scan must span at least 180 degrees");
}

double single_photon_visibility(const SinglesScan& scan) {
    scan.validate();
    double total = 0.0;
    for (const auto& s : scan.samples) total += s[1];
    if (total <= 0.0) throw DataError("single_photon_visibility: zero total counts");
    const Lsq2ThetaFit f = fit_2theta(scan.samples);
    if (!f.ok || f.c0 <= 0.0) return 0.0;
    return std::sqrt(f.a * f.a + f.b * f.b) / f.c0;
}

SvExtremes sv_extremize_reduced(const Mat2& reduced, std::size_t grid_points) {
    if (grid_points < 1) throw std::invalid_argument("sv_extremize: empty search grid");
    const auto r = bloch_vector(reduced);
    const double dop = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);

    SvExtremes ext;
    ext.sv_max = -1.0;
    ext.sv_min = 2.0;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < grid_points; ++i) {
        // Fibonacci sphere of candidate directions for the rotated Bloch vector;
        // a linear polarizer sees only the x-z (linear) components.
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / grid_points;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(i);
        const double x = rho * std::cos(phi);
        const double y = rho * std::sin(phi);
        const double sv = dop * std::sqrt(x * x + z * z);
        if (sv > ext.sv_max) {
            ext.sv_max = sv;
            ext.argmax = PcSetting{{x, y, z}, static_cast<int>(i)};
        }
        if (sv < ext.sv_min) {
            ext.sv_min = sv;
            ext.argmin = PcSetting{{x, y, z}, static_cast<int>(i)};
        }
    }
    return ext;
}

SvExtremes sv_extremize(const SourceStateModel& source, Side arm, std::size_t grid_points) {
    const DensityMatrix rho = source.to_density_matrix();
    return sv_extremize_reduced(partial_trace(rho, arm), grid_points);
}

} // namespace epc
