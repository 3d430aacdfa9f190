#pragma once

#include <cstdint>

#include "epc/sim/config.hpp"
#include "epc/sim/events.hpp"

namespace epc {

struct RunStats {
    std::uint64_t accepted_a = 0;  // registered events after dead-time filtering
    std::uint64_t accepted_b = 0;
    std::uint64_t emitted_pairs = 0;
    double duration_s = 0.0;
};

/// Event-level Monte Carlo of the source/channel/detector stack.
///
/// Per emitted pair or singleton: Poisson emission; joint polarization outcome at
/// the analyzers from the Born probabilities of the configured state (absent
/// analyzer = always passes); per-arm survival with probability gamma; wavelength
/// detuning from the source spectrum (pair detunings anti-correlated), converted to
/// delay by each arm's own fiber; Gaussian jitter; detection with probability
/// eta_Q; dark counts merged in; afterpulse cascades per registered event;
/// non-paralyzable dead-time filter. Deterministic for a fixed seed.
///
/// Events are generated in time slabs and streamed to the sink, so long runs never
/// hold the full event list in memory.
RunStats simulate(const ExperimentConfig& config, EventSink& sink);

/// Convenience wrapper collecting both channels into vectors.
RunStats simulate_to_vectors(const ExperimentConfig& config, std::vector<std::int64_t>& a,
                             std::vector<std::int64_t>& b);

} // namespace epc
