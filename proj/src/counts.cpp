#include "epc/counts.hpp"

#include <algorithm>

#include "epc/errors.hpp"

namespace epc {

void BasisCounts::set(PolarizationAxis axis_a, PolarizationAxis axis_b, double counts,
                      double duration_s) {
    if (counts < 0.0) throw DataError("negative counts for setting (" + axis_name(axis_a) + "," +
                                      axis_name(axis_b) + ")");
    if (!(duration_s > 0.0)) throw DataError("setting duration must be positive");
    table_[{axis_a, axis_b}] = SettingCounts{counts, duration_s};
}

bool BasisCounts::has(PolarizationAxis axis_a, PolarizationAxis axis_b) const {
    return table_.count({axis_a, axis_b}) != 0;
}

const SettingCounts& BasisCounts::at(PolarizationAxis axis_a, PolarizationAxis axis_b) const {
    const auto it = table_.find({axis_a, axis_b});
    if (it == table_.end())
        throw DataError("missing counts for setting (" + axis_name(axis_a) + "," +
                        axis_name(axis_b) + ")");
    return it->second;
}

BasisCounts BasisCounts::subtract_accidentals(double singles_a_hz, double singles_b_hz,
                                              double window_s) const {
    BasisCounts out;
    const double acc_rate = singles_a_hz * singles_b_hz * window_s;
    for (const auto& [key, sc] : table_) {
        const double corrected = std::max(0.0, sc.counts - acc_rate * sc.duration_s);
        out.set(key.first, key.second, corrected, sc.duration_s);
    }
    return out;
}

} // namespace epc
