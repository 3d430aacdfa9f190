#include "epc/tomography/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epc/errors.hpp"
#include "epc/sim/rng.hpp"

namespace epc {

namespace {

constexpr std::array<PolarizationAxis, 4> kCanonicalAxes = {
    PolarizationAxis::H, PolarizationAxis::V, PolarizationAxis::D, PolarizationAxis::R};

// Hermitian operator basis spanning 4x4 Hermitian matrices with real coordinates:
// 4 diagonal units, then (E_rc + E_cr) and i(E_rc - E_cr) for r < c.
std::array<Mat4, 16> hermitian_basis() {
    std::array<Mat4, 16> g{};
    std::size_t k = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        g[k](i, i) = Cx{1.0, 0.0};
        ++k;
    }
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = r + 1; c < 4; ++c) {
            g[k](r, c) = Cx{1.0, 0.0};
            g[k](c, r) = Cx{1.0, 0.0};
            ++k;
            g[k](r, c) = Cx{0.0, 1.0};
            g[k](c, r) = Cx{0.0, -1.0};
            ++k;
        }
    return g;
}

double real_trace_product(const Mat4& a, const Mat4& b) {
    double s = 0.0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) s += (a(r, c) * b(c, r)).real();
    return s;
}

Mat4 setting_projector(const SettingKey& key) {
    return kron(axis_projector(key.first), axis_projector(key.second));
}

// Solve the square real system m x = rhs in place; n <= 16.
std::vector<double> solve_dense(std::vector<double> m, std::vector<double> rhs, std::size_t n) {
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(m[piv[row] * n + col]) > std::abs(m[piv[best] * n + col])) best = row;
        std::swap(piv[col], piv[best]);
        const double d = m[piv[col] * n + col];
        if (std::abs(d) < 1e-10)
            throw DataError("linear_inversion: singular design matrix (degenerate settings)");
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = m[piv[row] * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) m[piv[row] * n + j] -= f * m[piv[col] * n + j];
            rhs[piv[row]] -= f * rhs[piv[col]];
        }
    }
    std::vector<double> x(n);
    for (std::size_t col = n; col-- > 0;) {
        double v = rhs[piv[col]];
        for (std::size_t j = col + 1; j < n; ++j) v -= m[piv[col] * n + j] * x[j];
        x[col] = v / m[piv[col] * n + col];
    }
    return x;
}

struct Setting {
    Mat4 projector;
    double counts = 0.0;
    double duration = 1.0;
};

std::vector<Setting> collect_settings(const BasisCounts& counts) {
    validate_tomography_counts(counts);
    std::vector<Setting> out;
    out.reserve(counts.size());
    for (const auto& [key, sc] : counts.table())
        out.push_back({setting_projector(key), sc.counts, sc.duration_s});
    return out;
}

// ---- MLE internals --------------------------------------------------------

// parameter layout: 4 real diagonals, then (re, im) pairs for the strictly-lower
// entries scanned row-major
constexpr std::array<std::pair<int, int>, 6> kLowerEntries = {
    std::make_pair(1, 0), std::make_pair(2, 0), std::make_pair(2, 1),
    std::make_pair(3, 0), std::make_pair(3, 1), std::make_pair(3, 2)};

Mat4 params_to_t(const std::array<double, 16>& th) {
    Mat4 t;
    for (int i = 0; i < 4; ++i) t(i, i) = Cx{th[i], 0.0};
    for (std::size_t k = 0; k < kLowerEntries.size(); ++k) {
        const auto [r, c] = kLowerEntries[k];
        t(r, c) = Cx{th[4 + 2 * k], th[5 + 2 * k]};
    }
    return t;
}

std::array<double, 16> t_to_params(const Mat4& t) {
    std::array<double, 16> th{};
    for (int i = 0; i < 4; ++i) th[i] = t(i, i).real();
    for (std::size_t k = 0; k < kLowerEntries.size(); ++k) {
        const auto [r, c] = kLowerEntries[k];
        th[4 + 2 * k] = t(r, c).real();
        th[5 + 2 * k] = t(r, c).imag();
    }
    return th;
}

struct Objective {
    const std::vector<Setting>& settings;
    double total_counts;

    // negative profiled Poisson log-likelihood (intensity maximized analytically):
    // F = -(sum_s n_s ln p_s - N ln(sum_s d_s p_s))
    double value(const std::array<double, 16>& th) const {
        const Mat4 t = params_to_t(th);
        const Mat4 a = t * t.adjoint();
        const double tau = a.trace().real();
        if (!(tau > 0.0)) return 1e100;
        double f = 0.0;
        double d_sum = 0.0;
        for (const auto& s : settings) {
            const double p = std::max(real_trace_product(a, s.projector) / tau, 1e-300);
            f += s.counts * std::log(p);
            d_sum += s.duration * p;
        }
        f -= total_counts * std::log(d_sum);
        return -f;
    }

    double value_and_gradient(const std::array<double, 16>& th,
                              std::array<double, 16>& grad) const {
        const Mat4 t = params_to_t(th);
        const Mat4 tdag = t.adjoint();
        const Mat4 a = t * tdag;
        const double tau = a.trace().real();
        grad.fill(0.0);
        if (!(tau > 0.0)) return 1e100;

        const std::size_t ns = settings.size();
        std::vector<double> p(ns);
        std::vector<Mat4> m(ns);  // M_s = T† Π_s, so that da_s/dθ = 2 Re tr(E M_s)
        double f = 0.0;
        double d_sum = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            m[s] = tdag * settings[s].projector;
            p[s] = std::max(real_trace_product(a, settings[s].projector) / tau, 1e-300);
            f += settings[s].counts * std::log(p[s]);
            d_sum += settings[s].duration * p[s];
        }
        f -= total_counts * std::log(d_sum);

        // weight per setting: dF/dp_s (note overall negation at the end)
        std::vector<double> w(ns);
        for (std::size_t s = 0; s < ns; ++s)
            w[s] = settings[s].counts / p[s] - total_counts * settings[s].duration / d_sum;

        auto accumulate = [&](std::size_t param, int r, int c, bool imaginary) {
            // E has a single entry at (r,c): 1 or i. tr(E M) = M(c,r) (times i for the
            // imaginary direction); da = 2 Re tr(E M); dtau analogous with M = T†.
            double g = 0.0;
            const double dtau = imaginary ? 2.0 * t(r, c).imag() : 2.0 * t(r, c).real();
            for (std::size_t s = 0; s < ns; ++s) {
                const Cx trem = m[s](c, r);
                const double da = imaginary ? -2.0 * trem.imag() : 2.0 * trem.real();
                const double dp = (da - p[s] * dtau) / tau;
                g += w[s] * dp;
            }
            grad[param] = -g;
        };

        for (int i = 0; i < 4; ++i) accumulate(i, i, i, false);
        for (std::size_t k = 0; k < kLowerEntries.size(); ++k) {
            const auto [r, c] = kLowerEntries[k];
            accumulate(4 + 2 * k, r, c, false);
            accumulate(5 + 2 * k, r, c, true);
        }
        return -f;
    }
};

Mat4 psd_projected(const Mat4& herm) {
    const auto es = hermitian_eigensystem(herm);
    Mat4 out;
    double tr = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double lk = std::max(es.values[k], 0.0);
        tr += lk;
        if (lk == 0.0) continue;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                out(i, j) += lk * es.vectors(i, k) * std::conj(es.vectors(j, k));
    }
    if (tr <= 0.0) return Mat4::identity() * Cx{0.25, 0.0};
    return out * Cx{1.0 / tr, 0.0};
}

} // namespace

std::vector<SettingKey> canonical_tomography_settings() {
    std::vector<SettingKey> keys;
    keys.reserve(16);
    for (PolarizationAxis a : kCanonicalAxes)
        for (PolarizationAxis b : kCanonicalAxes) keys.push_back({a, b});
    return keys;
}

std::vector<SettingKey> full_tomography_settings() {
    std::vector<SettingKey> keys;
    keys.reserve(36);
    for (PolarizationAxis a : kAllAxes)
        for (PolarizationAxis b : kAllAxes) keys.push_back({a, b});
    return keys;
}

void validate_tomography_counts(const BasisCounts& counts) {
    std::string missing;
    for (const auto& key : canonical_tomography_settings())
        if (!counts.has(key.first, key.second))
            missing += " (" + axis_name(key.first) + "," + axis_name(key.second) + ")";
    if (!missing.empty())
        throw DataError("tomography counts: missing canonical settings:" + missing);
}

BasisCounts sample_projection_counts(const DensityMatrix& rho,
                                     const std::vector<SettingKey>& settings, double shots,
                                     std::uint64_t seed) {
    if (!(shots > 0.0)) throw std::invalid_argument("shots must be positive");
    Rng rng(Rng::derive(seed, 0x746f6d6fULL));  // "tomo"
    BasisCounts counts;
    for (const auto& key : settings) {
        const double p = coincidence_probability(rho, key.first, key.second);
        counts.set(key.first, key.second, static_cast<double>(rng.poisson(shots * p)), 1.0);
    }
    return counts;
}

BasisCounts expected_projection_counts(const DensityMatrix& rho,
                                       const std::vector<SettingKey>& settings, double shots) {
    if (!(shots > 0.0)) throw std::invalid_argument("shots must be positive");
    BasisCounts counts;
    for (const auto& key : settings)
        counts.set(key.first, key.second, shots * coincidence_probability(rho, key.first, key.second),
                   1.0);
    return counts;
}

BasisCounts simulate_tomography(const DensityMatrix& rho, double shots_per_setting,
                                std::uint64_t seed) {
    return sample_projection_counts(rho, canonical_tomography_settings(), shots_per_setting, seed);
}

Mat4 linear_inversion(const BasisCounts& counts) {
    validate_tomography_counts(counts);

    // normalize rates by the total flux of the complete HV basis block
    double flux = 0.0;
    for (PolarizationAxis a : {PolarizationAxis::H, PolarizationAxis::V})
        for (PolarizationAxis b : {PolarizationAxis::H, PolarizationAxis::V})
            flux += counts.at(a, b).rate_hz();
    if (!(flux > 0.0)) throw DataError("linear_inversion: zero total counts in the HV block");

    const auto g = hermitian_basis();
    const std::size_t ns = counts.size();
    std::vector<double> design(ns * 16);
    std::vector<double> freq(ns);
    std::size_t row = 0;
    for (const auto& [key, sc] : counts.table()) {
        const Mat4 proj = setting_projector(key);
        for (std::size_t k = 0; k < 16; ++k) design[row * 16 + k] = real_trace_product(g[k], proj);
        freq[row] = sc.rate_hz() / flux;
        ++row;
    }

    std::vector<double> x;
    if (ns == 16) {
        x = solve_dense(design, freq, 16);
    } else {
        // overdetermined: normal equations
        std::vector<double> ata(16 * 16, 0.0);
        std::vector<double> atb(16, 0.0);
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t i = 0; i < 16; ++i) {
                atb[i] += design[s * 16 + i] * freq[s];
                for (std::size_t j = 0; j < 16; ++j)
                    ata[i * 16 + j] += design[s * 16 + i] * design[s * 16 + j];
            }
        x = solve_dense(ata, atb, 16);
    }

    Mat4 rho;
    for (std::size_t k = 0; k < 16; ++k) rho += g[k] * Cx{x[k], 0.0};
    return hermitized(rho);
}

MLEResult mle_reconstruct(const BasisCounts& counts, const MleOptions& options) {
    const std::vector<Setting> settings = collect_settings(counts);
    double total = 0.0;
    for (const auto& s : settings) total += s.counts;
    if (!(total > 0.0)) throw DataError("mle_reconstruct: all-zero counts");

    const Mat4 lin = linear_inversion(counts);

    // seed: PSD projection of the inversion, blended with a trace of white noise so
    // the Cholesky start is strictly positive definite
    Mat4 seed_rho = psd_projected(lin) * Cx{1.0 - 1e-6, 0.0};
    for (std::size_t i = 0; i < 4; ++i) seed_rho(i, i) += Cx{1e-6 / 4.0, 0.0};
    std::array<double, 16> x = t_to_params(cholesky_lower(seed_rho));

    const Objective obj{settings, total};
    std::array<double, 16> grad{}, grad_new{};
    double f = obj.value_and_gradient(x, grad);

    // The likelihood surface is known only to relative accuracy ~eps, so parameter
    // steps below sqrt(eps) are indistinguishable from noise; flooring the step
    // threshold there keeps stiff near-pure reconstructions from spinning forever.
    const double step_tol = std::max(options.tol, 1.5e-8);

    // BFGS on the 16 Cholesky parameters
    std::array<double, 256> h{};  // inverse-Hessian approximation, row-major 16x16
    for (int i = 0; i < 16; ++i) h[i * 16 + i] = 1.0;

    MLEResult result{DensityMatrix::from_matrix(Mat4::identity() * Cx{0.25, 0.0}),
                     0.0, 0, false, lin, {}};
    result.likelihood_trace.push_back(-f);

    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        std::array<double, 16> dir{};
        for (int i = 0; i < 16; ++i) {
            double v = 0.0;
            for (int j = 0; j < 16; ++j) v -= h[i * 16 + j] * grad[j];
            dir[i] = v;
        }
        double slope = 0.0;
        for (int i = 0; i < 16; ++i) slope += dir[i] * grad[i];
        if (slope >= 0.0) {
            // lost positive definiteness; re-steepest-descent
            for (int i = 0; i < 16; ++i) dir[i] = -grad[i];
            slope = 0.0;
            for (int i = 0; i < 16; ++i) slope -= grad[i] * grad[i];
            std::fill(h.begin(), h.end(), 0.0);
            for (int i = 0; i < 16; ++i) h[i * 16 + i] = 1.0;
        }

        double alpha = 1.0;
        std::array<double, 16> x_new{};
        double f_new = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int i = 0; i < 16; ++i) x_new[i] = x[i] + alpha * dir[i];
            f_new = obj.value(x_new);
            if (f_new <= f + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // no decrease down to alpha ~ 2^-60: the iterate is flat to machine
            // precision, i.e. zero step and zero improvement
            result.converged = true;
            break;
        }

        f_new = obj.value_and_gradient(x_new, grad_new);

        double step_inf = 0.0, x_inf = 0.0;
        for (int i = 0; i < 16; ++i) {
            step_inf = std::max(step_inf, std::abs(x_new[i] - x[i]));
            x_inf = std::max(x_inf, std::abs(x_new[i]));
        }
        const double df = f - f_new;

        // BFGS update
        std::array<double, 16> s{}, y{};
        double sy = 0.0;
        for (int i = 0; i < 16; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = grad_new[i] - grad[i];
            sy += s[i] * y[i];
        }
        if (sy > 1e-14) {
            std::array<double, 16> hy{};
            for (int i = 0; i < 16; ++i) {
                double v = 0.0;
                for (int j = 0; j < 16; ++j) v += h[i * 16 + j] * y[j];
                hy[i] = v;
            }
            double yhy = 0.0;
            for (int i = 0; i < 16; ++i) yhy += y[i] * hy[i];
            const double c1 = (sy + yhy) / (sy * sy);
            for (int i = 0; i < 16; ++i)
                for (int j = 0; j < 16; ++j)
                    h[i * 16 + j] += c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }

        x = x_new;
        std::swap(grad, grad_new);
        f = f_new;
        result.likelihood_trace.push_back(-f);

        if (df <= options.tol * (1.0 + std::abs(f)) && step_inf <= step_tol * (1.0 + x_inf)) {
            result.converged = true;
            ++iter;
            break;
        }
    }

    const Mat4 t = params_to_t(x);
    Mat4 a = t * t.adjoint();
    a *= Cx{1.0 / a.trace().real(), 0.0};
    result.rho = DensityMatrix::from_matrix(hermitized(a));
    result.log_likelihood = -f;
    result.iterations = iter;
    return result;
}

QstMetrics qst_metrics(const DensityMatrix& rho) {
    QstMetrics q;
    q.purity = purity(rho);
    q.von_neumann_bits = von_neumann_entropy_bits(rho);
    q.renyi2_a_nats = renyi2_entropy_nats(rho, Side::A);
    q.renyi2_b_nats = renyi2_entropy_nats(rho, Side::B);
    q.bell_fidelity = -1.0;
    for (BellKind kind : kAllBellKinds) {
        const double f = fidelity(bell_state(kind), rho);
        if (f > q.bell_fidelity) {
            q.bell_fidelity = f;
            q.nearest_bell = kind;
        }
    }
    return q;
}

} // namespace epc
