#pragma once

#include <map>
#include <optional>
#include <utility>

#include "epc/quantum/axis.hpp"

namespace epc {

/// Counts accumulated at one pair of analyzer settings.
struct SettingCounts {
    double counts = 0.0;      // real-valued so exact expectations can be carried
    double duration_s = 1.0;  // acquisition time of this setting

    double rate_hz() const { return duration_s > 0.0 ? counts / duration_s : 0.0; }
};

using SettingKey = std::pair<PolarizationAxis, PolarizationAxis>;  // (axis_a, axis_b)

/// Coincidence counts per (Alice analyzer, Bob analyzer) setting. The common table
/// behind both the direct-measurement metrics and the tomography reconstructions.
class BasisCounts {
public:
    void set(PolarizationAxis axis_a, PolarizationAxis axis_b, double counts,
             double duration_s = 1.0);
    bool has(PolarizationAxis axis_a, PolarizationAxis axis_b) const;
    const SettingCounts& at(PolarizationAxis axis_a, PolarizationAxis axis_b) const;  // DataError if absent

    const std::map<SettingKey, SettingCounts>& table() const { return table_; }
    std::size_t size() const { return table_.size(); }

    /// Per-setting accidental subtraction (counts - rate_a*rate_b*dt*duration, floored at 0).
    BasisCounts subtract_accidentals(double singles_a_hz, double singles_b_hz,
                                     double window_s) const;

private:
    std::map<SettingKey, SettingCounts> table_;
};

} // namespace epc
