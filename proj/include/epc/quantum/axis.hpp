#pragma once

#include <array>
#include <optional>
#include <string>

#include "epc/quantum/linalg.hpp"

namespace epc {

/// Polarization analyzer axes. H/V and D/A are the linear bases (D = +45deg, A = -45deg);
/// R/L are the circular pair, R = (|H> + i|V>)/sqrt(2).
enum class PolarizationAxis { H, V, D, A, R, L };

constexpr std::array<PolarizationAxis, 6> kAllAxes = {
    PolarizationAxis::H, PolarizationAxis::V, PolarizationAxis::D,
    PolarizationAxis::A, PolarizationAxis::R, PolarizationAxis::L,
};

/// Unit-norm single-qubit state vector of the axis, in the (H, V) basis.
std::array<Cx, 2> axis_ket(PolarizationAxis axis);

/// Rank-one projector |axis><axis|.
Mat2 axis_projector(PolarizationAxis axis);

/// The orthonormal partner: H<->V, D<->A, R<->L.
PolarizationAxis orthogonal_axis(PolarizationAxis axis);

/// Projector of a linear polarizer at angle theta from H (degrees); theta=45 is D.
Mat2 linear_polarizer_projector(double angle_deg);

std::string axis_name(PolarizationAxis axis);
std::optional<PolarizationAxis> parse_axis(const std::string& name);

} // namespace epc
