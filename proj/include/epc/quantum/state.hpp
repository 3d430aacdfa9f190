#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "epc/quantum/axis.hpp"
#include "epc/quantum/linalg.hpp"

namespace epc {

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
enum class Side { A, B };

constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus};

std::string bell_name(BellKind kind);

/// Two-qubit polarization state. Basis order is fixed as (HH, HV, VH, VV) and all
/// serialization uses this order. Construction validates Hermiticity (1e-12),
/// unit trace (1e-12) and positive semidefiniteness (eigenvalues >= -1e-10).
class DensityMatrix {
public:
    static DensityMatrix from_matrix(const Mat4& m);  // throws std::invalid_argument

    const Mat4& matrix() const { return m_; }
    Cx element(std::size_t r, std::size_t c) const { return m_(r, c); }

    /// Eigenvalues ascending, with values in [-1e-10, 0] clamped to 0. A value below
    /// -1e-10 cannot occur for a validated instance.
    std::array<double, 4> spectrum() const;

private:
    explicit DensityMatrix(const Mat4& m) : m_(m) {}
    Mat4 m_;
};

DensityMatrix bell_state(BellKind kind);

/// p * |phi+><phi+| + (1-p) * I/4. Requires p in [0, 1].
DensityMatrix werner(double p);

/// Convex mixture; weights must be nonnegative and sum to 1 (1e-9 tolerance).
DensityMatrix mix(std::span<const DensityMatrix> states, std::span<const double> weights);

/// Tr(rho * P_a (x) P_b): probability that both photons pass analyzers a and b.
double coincidence_probability(const DensityMatrix& rho, PolarizationAxis axis_a,
                               PolarizationAxis axis_b);

/// Probability with arbitrary single-qubit projectors (identity = no analyzer).
double joint_pass_probability(const DensityMatrix& rho, const Mat2& proj_a, const Mat2& proj_b);

Mat2 partial_trace(const DensityMatrix& rho, Side keep);

/// Tr(rho^2), in [1/4, 1] for a valid two-qubit state.
double purity(const DensityMatrix& rho);

/// -Tr(rho log2 rho), in bits. Eigenvalues in [-1e-10, 0] are clamped to 0.
double von_neumann_entropy_bits(const DensityMatrix& rho);

/// -ln Tr(rho_side^2), in nats; ln 2 for a maximally entangled state.
double renyi2_entropy_nats(const DensityMatrix& rho, Side side);

/// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, in [0, 1].
/// Reduces to <psi|sigma|psi> when rho = |psi><psi|.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Bloch vector (x, y, z) of a single-qubit state, b_i = Tr(rho sigma_i).
std::array<double, 3> bloch_vector(const Mat2& rho);

/// Single-qubit state (I + b.sigma)/2; |b| <= 1 required.
Mat2 state_from_bloch(const std::array<double, 3>& b);

/// Bloch-sphere rotation by angle_rad around unit axis: U = cos(a/2) I - i sin(a/2) n.sigma.
Mat2 bloch_rotation(const std::array<double, 3>& axis, double angle_rad);

/// Tunable source model: a Bell state mixed with white noise and an unentangled
/// product impurity, conjugated by a local unitary on each arm (uncompensated fiber
/// rotation / polarization-controller setting).
struct SourceStateModel {
    BellKind bell_kind = BellKind::PhiPlus;
    double bell_fraction = 1.0;
    double depolarized_fraction = 0.0;
    double impurity_fraction = 0.0;
    std::array<double, 3> impurity_bloch_a{0.0, 0.0, 0.0};
    std::array<double, 3> impurity_bloch_b{0.0, 0.0, 0.0};
    std::array<double, 3> rotation_axis_a{0.0, 1.0, 0.0};
    double rotation_angle_a_rad = 0.0;
    std::array<double, 3> rotation_axis_b{0.0, 1.0, 0.0};
    double rotation_angle_b_rad = 0.0;

    void validate() const;  // throws std::invalid_argument
    DensityMatrix to_density_matrix() const;
};

/// JSON: {"basis": ["HH","HV","VH","VV"], "elements": 4x4 array of [re, im]}.
std::string density_matrix_to_json(const DensityMatrix& rho, int indent = -1);
DensityMatrix density_matrix_from_json(const std::string& text);

} // namespace epc
