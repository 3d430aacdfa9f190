#include "epc/sim/scan.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "epc/errors.hpp"
#include "epc/sim/generator.hpp"
#include "epc/sim/rng.hpp"

namespace epc {

namespace {
constexpr std::uint64_t kScanSeedTag = 0x7363616eULL;  // "scan"
}

std::vector<std::string> scan_parameter_names() {
    return {"dead_time_ns", "attenuation_db", "transmissivity", "window_ps",
            "pair_rate_hz", "total_rate_hz",  "eta_q",          "dark_rate_hz",
            "jitter_ps",    "duration_s"};
}

void apply_scan_parameter(ExperimentConfig& config, const std::string& parameter, double value) {
    if (parameter == "dead_time_ns") {
        config.detector_a.dead_time_s = value * 1e-9;
        config.detector_b.dead_time_s = value * 1e-9;
    } else if (parameter == "attenuation_db") {
        const double g = attenuation_db_to_transmissivity(value);
        config.rates.transmissivity_a = g;
        config.rates.transmissivity_b = g;
    } else if (parameter == "transmissivity") {
        config.rates.transmissivity_a = value;
        config.rates.transmissivity_b = value;
    } else if (parameter == "window_ps") {
        config.rates.window_s = value * 1e-12;
    } else if (parameter == "pair_rate_hz") {
        config.rates.pair_rate_hz = value;
    } else if (parameter == "total_rate_hz") {
        config.rates.total_rate_hz = value;
    } else if (parameter == "eta_q") {
        config.detector_a.eta_q = value;
        config.detector_b.eta_q = value;
    } else if (parameter == "dark_rate_hz") {
        config.detector_a.dark_rate_hz = value;
        config.detector_b.dark_rate_hz = value;
    } else if (parameter == "jitter_ps") {
        config.detector_a.jitter_sigma_s = value * 1e-12;
        config.detector_b.jitter_sigma_s = value * 1e-12;
    } else if (parameter == "duration_s") {
        config.duration_s = value;
    } else {
        std::string known;
        for (const auto& n : scan_parameter_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown scan parameter '" + parameter + "' (known: " + known + ")");
    }
}

std::uint64_t scan_point_seed(std::uint64_t base_seed, std::size_t i1, std::size_t i2) {
    return Rng::derive(base_seed, kScanSeedTag + i1, i2);
}

ScanResult scan_grid(const ExperimentConfig& base, const ScanAxis& axis1, const ScanAxis& axis2) {
    if (axis1.values.empty() || axis2.values.empty())
        throw ConfigError("scan axes must each have at least one value");
    // fail fast on unknown names before spawning workers
    {
        ExperimentConfig probe = base;
        apply_scan_parameter(probe, axis1.parameter, axis1.values.front());
        apply_scan_parameter(probe, axis2.parameter, axis2.values.front());
    }

    const std::size_t n1 = axis1.values.size();
    const std::size_t n2 = axis2.values.size();
    ScanResult result;
    result.axis1 = axis1;
    result.axis2 = axis2;
    result.cells.assign(n1 * n2, CountsRecord{});

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n1 * n2 || failed.load()) return;
            const std::size_t i1 = k / n2;
            const std::size_t i2 = k % n2;
            try {
                ExperimentConfig cfg = base;
                apply_scan_parameter(cfg, axis1.parameter, axis1.values[i1]);
                apply_scan_parameter(cfg, axis2.parameter, axis2.values[i2]);
                cfg.seed = scan_point_seed(base.seed, i1, i2);
                CoincidenceCounter counter(cfg.rates.window_s, 0, cfg.duration_s);
                simulate(cfg, counter);
                result.cells[k] = counter.record();
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) error_message = e.what();
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n1 * n2);
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    if (failed.load()) throw ConfigError("scan point failed: " + error_message);
    return result;
}

} // namespace epc
