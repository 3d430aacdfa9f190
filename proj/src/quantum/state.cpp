#include "epc/quantum/state.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace epc {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPsdTol = -1e-10;

std::array<Cx, 4> bell_ket(BellKind kind) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (kind) {
        case BellKind::PhiPlus: return {Cx{s}, Cx{}, Cx{}, Cx{s}};
        case BellKind::PhiMinus: return {Cx{s}, Cx{}, Cx{}, Cx{-s}};
        case BellKind::PsiPlus: return {Cx{}, Cx{s}, Cx{s}, Cx{}};
        case BellKind::PsiMinus: return {Cx{}, Cx{s}, Cx{-s}, Cx{}};
    }
    return {};
}

double clamped_eigenvalue(double lambda) {
    if (lambda < kPsdTol)
        throw std::invalid_argument("density matrix eigenvalue below -1e-10: " + std::to_string(lambda));
    return lambda < 0.0 ? 0.0 : lambda;
}

// sqrt(rho) through the eigensystem, negative round-off clamped to zero
Mat4 matrix_sqrt_psd(const DensityMatrix& rho) {
    const auto es = hermitian_eigensystem(rho.matrix());
    Mat4 s;
    for (std::size_t k = 0; k < 4; ++k) {
        const double lk = std::sqrt(clamped_eigenvalue(es.values[k]));
        if (lk == 0.0) continue;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                s(i, j) += lk * es.vectors(i, k) * std::conj(es.vectors(j, k));
    }
    return s;
}

} // namespace

std::string bell_name(BellKind kind) {
    switch (kind) {
        case BellKind::PhiPlus: return "phi+";
        case BellKind::PhiMinus: return "phi-";
        case BellKind::PsiPlus: return "psi+";
        case BellKind::PsiMinus: return "psi-";
    }
    return "?";
}

DensityMatrix DensityMatrix::from_matrix(const Mat4& m) {
    if (hermiticity_defect(m) > kHermitianTol)
        throw std::invalid_argument("density matrix is not Hermitian within 1e-12");
    if (std::abs(m.trace() - Cx{1.0, 0.0}) > kTraceTol)
        throw std::invalid_argument("density matrix trace differs from 1 by more than 1e-12");
    const auto es = hermitian_eigensystem(m);
    if (es.values[0] < kPsdTol)
        throw std::invalid_argument("density matrix is not positive semidefinite (min eigenvalue " +
                                    std::to_string(es.values[0]) + ")");
    return DensityMatrix(hermitized(m));
}

std::array<double, 4> DensityMatrix::spectrum() const {
    const auto es = hermitian_eigensystem(m_);
    std::array<double, 4> out{};
    for (std::size_t k = 0; k < 4; ++k) out[k] = clamped_eigenvalue(es.values[k]);
    return out;
}

DensityMatrix bell_state(BellKind kind) {
    const auto k = bell_ket(kind);
    Mat4 m;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) m(r, c) = k[r] * std::conj(k[c]);
    return DensityMatrix::from_matrix(m);
}

DensityMatrix werner(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("werner: p must be in [0, 1]");
    Mat4 m = bell_state(BellKind::PhiPlus).matrix() * Cx{p, 0.0};
    for (std::size_t i = 0; i < 4; ++i) m(i, i) += Cx{(1.0 - p) / 4.0, 0.0};
    return DensityMatrix::from_matrix(m);
}

DensityMatrix mix(std::span<const DensityMatrix> states, std::span<const double> weights) {
    if (states.empty() || states.size() != weights.size())
        throw std::invalid_argument("mix: need equal, nonzero numbers of states and weights");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("mix: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("mix: weights must sum to 1");
    Mat4 m;
    for (std::size_t i = 0; i < states.size(); ++i) m += states[i].matrix() * Cx{weights[i], 0.0};
    return DensityMatrix::from_matrix(m);
}

double joint_pass_probability(const DensityMatrix& rho, const Mat2& proj_a, const Mat2& proj_b) {
    const Mat4 op = kron(proj_a, proj_b);
    Cx t{};
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) t += rho.element(r, c) * op(c, r);
    double p = t.real();
    if (p < 0.0 && p > -1e-10) p = 0.0;
    if (p > 1.0 && p < 1.0 + 1e-10) p = 1.0;
    return p;
}

double coincidence_probability(const DensityMatrix& rho, PolarizationAxis axis_a,
                               PolarizationAxis axis_b) {
    return joint_pass_probability(rho, axis_projector(axis_a), axis_projector(axis_b));
}

Mat2 partial_trace(const DensityMatrix& rho, Side keep) {
    Mat2 out;
    if (keep == Side::A) {
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                out(i, j) = rho.element(i * 2 + 0, j * 2 + 0) + rho.element(i * 2 + 1, j * 2 + 1);
    } else {
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t l = 0; l < 2; ++l)
                out(k, l) = rho.element(0 * 2 + k, 0 * 2 + l) + rho.element(1 * 2 + k, 1 * 2 + l);
    }
    return out;
}

double purity(const DensityMatrix& rho) {
    const Mat4& m = rho.matrix();
    double s = 0.0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) s += (m(r, c) * m(c, r)).real();
    return s;
}

double von_neumann_entropy_bits(const DensityMatrix& rho) {
    double s = 0.0;
    for (double lambda : rho.spectrum())
        if (lambda > 0.0) s -= lambda * std::log2(lambda);
    return s;
}

double renyi2_entropy_nats(const DensityMatrix& rho, Side side) {
    const Mat2 reduced = partial_trace(rho, side);
    double tr2 = 0.0;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) tr2 += (reduced(r, c) * reduced(c, r)).real();
    return -std::log(tr2);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const Mat4 sr = matrix_sqrt_psd(rho);
    const Mat4 inner = sr * sigma.matrix() * sr;
    const auto es = hermitian_eigensystem(inner);
    double tr_sqrt = 0.0;
    for (double v : es.values) tr_sqrt += std::sqrt(std::max(v, 0.0));
    const double f = tr_sqrt * tr_sqrt;
    return std::min(1.0, std::max(0.0, f));
}

std::array<double, 3> bloch_vector(const Mat2& rho) {
    return {
        2.0 * rho(0, 1).real(),
        -2.0 * rho(0, 1).imag(),
        (rho(0, 0) - rho(1, 1)).real(),
    };
}

Mat2 state_from_bloch(const std::array<double, 3>& b) {
    const double n = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    if (n > 1.0 + 1e-9) throw std::invalid_argument("state_from_bloch: |b| > 1");
    Mat2 m;
    m(0, 0) = Cx{0.5 * (1.0 + b[2]), 0.0};
    m(1, 1) = Cx{0.5 * (1.0 - b[2]), 0.0};
    m(0, 1) = Cx{0.5 * b[0], -0.5 * b[1]};
    m(1, 0) = std::conj(m(0, 1));
    return m;
}

Mat2 bloch_rotation(const std::array<double, 3>& axis, double angle_rad) {
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (n == 0.0) throw std::invalid_argument("bloch_rotation: zero axis");
    const double c = std::cos(0.5 * angle_rad);
    const double s = std::sin(0.5 * angle_rad);
    const double nx = axis[0] / n, ny = axis[1] / n, nz = axis[2] / n;
    Mat2 u;
    u(0, 0) = Cx{c, -s * nz};
    u(0, 1) = Cx{-s * ny, -s * nx};
    u(1, 0) = Cx{s * ny, -s * nx};
    u(1, 1) = Cx{c, s * nz};
    return u;
}

void SourceStateModel::validate() const {
    auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in01(bell_fraction) || !in01(depolarized_fraction) || !in01(impurity_fraction))
        throw std::invalid_argument("source state fractions must each lie in [0, 1]");
    if (std::abs(bell_fraction + depolarized_fraction + impurity_fraction - 1.0) > 1e-9)
        throw std::invalid_argument("source state fractions must sum to 1");
    auto norm = [](const std::array<double, 3>& b) {
        return std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    };
    if (norm(impurity_bloch_a) > 1.0 + 1e-9 || norm(impurity_bloch_b) > 1.0 + 1e-9)
        throw std::invalid_argument("impurity Bloch vectors must have norm <= 1");
}

DensityMatrix SourceStateModel::to_density_matrix() const {
    validate();
    Mat4 m = bell_state(bell_kind).matrix() * Cx{bell_fraction, 0.0};
    for (std::size_t i = 0; i < 4; ++i) m(i, i) += Cx{depolarized_fraction / 4.0, 0.0};
    if (impurity_fraction > 0.0) {
        const Mat4 product = kron(state_from_bloch(impurity_bloch_a), state_from_bloch(impurity_bloch_b));
        m += product * Cx{impurity_fraction, 0.0};
    }
    if (rotation_angle_a_rad != 0.0 || rotation_angle_b_rad != 0.0) {
        const Mat2 ua = bloch_rotation(rotation_axis_a, rotation_angle_a_rad);
        const Mat2 ub = bloch_rotation(rotation_axis_b, rotation_angle_b_rad);
        const Mat4 u = kron(ua, ub);
        m = u * m * u.adjoint();
    }
    return DensityMatrix::from_matrix(m);
}

std::string density_matrix_to_json(const DensityMatrix& rho, int indent) {
    nlohmann::json j;
    j["basis"] = {"HH", "HV", "VH", "VV"};
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < 4; ++r) {
        auto row = nlohmann::json::array();
        for (std::size_t c = 0; c < 4; ++c)
            row.push_back({rho.element(r, c).real(), rho.element(r, c).imag()});
        rows.push_back(row);
    }
    j["elements"] = rows;
    return j.dump(indent);
}

DensityMatrix density_matrix_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.contains("elements")) throw std::invalid_argument("density matrix JSON: missing 'elements'");
    Mat4 m;
    const auto& rows = j.at("elements");
    if (rows.size() != 4) throw std::invalid_argument("density matrix JSON: need 4 rows");
    for (std::size_t r = 0; r < 4; ++r) {
        if (rows[r].size() != 4) throw std::invalid_argument("density matrix JSON: need 4 columns");
        for (std::size_t c = 0; c < 4; ++c)
            m(r, c) = Cx{rows[r][c][0].get<double>(), rows[r][c][1].get<double>()};
    }
    return DensityMatrix::from_matrix(m);
}

} // namespace epc
