#include "epc/quantum/axis.hpp"

#include <cmath>

namespace epc {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

std::array<Cx, 2> axis_ket(PolarizationAxis axis) {
    switch (axis) {
        case PolarizationAxis::H: return {Cx{1.0, 0.0}, Cx{0.0, 0.0}};
        case PolarizationAxis::V: return {Cx{0.0, 0.0}, Cx{1.0, 0.0}};
        case PolarizationAxis::D: return {Cx{kInvSqrt2, 0.0}, Cx{kInvSqrt2, 0.0}};
        case PolarizationAxis::A: return {Cx{kInvSqrt2, 0.0}, Cx{-kInvSqrt2, 0.0}};
        case PolarizationAxis::R: return {Cx{kInvSqrt2, 0.0}, Cx{0.0, kInvSqrt2}};
        case PolarizationAxis::L: return {Cx{kInvSqrt2, 0.0}, Cx{0.0, -kInvSqrt2}};
    }
    return {};
}

Mat2 axis_projector(PolarizationAxis axis) {
    const auto k = axis_ket(axis);
    Mat2 p;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) p(r, c) = k[r] * std::conj(k[c]);
    return p;
}

PolarizationAxis orthogonal_axis(PolarizationAxis axis) {
    switch (axis) {
        case PolarizationAxis::H: return PolarizationAxis::V;
        case PolarizationAxis::V: return PolarizationAxis::H;
        case PolarizationAxis::D: return PolarizationAxis::A;
        case PolarizationAxis::A: return PolarizationAxis::D;
        case PolarizationAxis::R: return PolarizationAxis::L;
        case PolarizationAxis::L: return PolarizationAxis::R;
    }
    return PolarizationAxis::H;
}

Mat2 linear_polarizer_projector(double angle_deg) {
    const double th = angle_deg * M_PI / 180.0;
    const std::array<Cx, 2> k = {Cx{std::cos(th), 0.0}, Cx{std::sin(th), 0.0}};
    Mat2 p;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) p(r, c) = k[r] * std::conj(k[c]);
    return p;
}

std::string axis_name(PolarizationAxis axis) {
    switch (axis) {
        case PolarizationAxis::H: return "H";
        case PolarizationAxis::V: return "V";
        case PolarizationAxis::D: return "D";
        case PolarizationAxis::A: return "A";
        case PolarizationAxis::R: return "R";
        case PolarizationAxis::L: return "L";
    }
    return "?";
}

std::optional<PolarizationAxis> parse_axis(const std::string& name) {
    if (name == "H" || name == "h") return PolarizationAxis::H;
    if (name == "V" || name == "v") return PolarizationAxis::V;
    if (name == "D" || name == "d") return PolarizationAxis::D;
    if (name == "A" || name == "a") return PolarizationAxis::A;
    if (name == "R" || name == "r") return PolarizationAxis::R;
    if (name == "L" || name == "l") return PolarizationAxis::L;
    return std::nullopt;
}

} // namespace epc
