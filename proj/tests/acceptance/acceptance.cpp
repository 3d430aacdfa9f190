// Acceptance gate: one check per release criterion, each printed as a PASS/FAIL
// line with its measured numbers. Exit code 0 only if every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "epc/analytic.hpp"
#include "epc/io/config_file.hpp"
#include "epc/kernels/kernels.hpp"
#include "epc/metrics/direct.hpp"
#include "epc/pipeline.hpp"
#include "epc/sim/coincidence.hpp"
#include "epc/sim/generator.hpp"
#include "epc/sim/histogram.hpp"
#include "epc/sim/rng.hpp"
#include "epc/sim/scan.hpp"
#include "epc/tomography/tomography.hpp"

namespace fs = std::filesystem;
using namespace epc;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d  %-34s %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

void run(int index, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [pass, detail] = body();
        report(index, name, pass, detail);
    } catch (const std::exception& e) {
        report(index, name, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

constexpr std::array<PolarizationAxis, 4> kLinear = {PolarizationAxis::H, PolarizationAxis::V,
                                                     PolarizationAxis::D, PolarizationAxis::A};

std::vector<SettingKey> linear_settings() {
    std::vector<SettingKey> keys;
    for (auto a : kLinear)
        for (auto b : kLinear) keys.push_back({a, b});
    return keys;
}

// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion_1_saturation_curve() {
    const auto t0 = Clock::now();
    const double eta = 0.25, td = 1e-6;
    const double grid[] = {0.01, 0.1, 1.0, 10.0};
    const double durations[] = {3.0, 0.5, 0.2, 0.1};
    bool pass = true;
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        ExperimentConfig cfg;
        cfg.rates.total_rate_hz = grid[i] / (eta * td);
        cfg.detector_a.eta_q = eta;
        cfg.detector_b.eta_q = eta;
        cfg.detector_a.dead_time_s = td;
        cfg.detector_b.dead_time_s = td;
        cfg.duration_s = durations[i];
        cfg.seed = 4100 + i;
        std::vector<std::int64_t> a, b;
        const RunStats stats = simulate_to_vectors(cfg, a, b);
        const double expected = cfg.rates.total_rate_hz *
                                total_efficiency(eta, cfg.rates.total_rate_hz, td) * cfg.duration_s;
        for (double observed : {double(stats.accepted_a), double(stats.accepted_b)}) {
            const double pull = std::abs(observed - expected) / std::sqrt(expected);
            worst = std::max(worst, pull);
            if (pull > 3.0) pass = false;
        }
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    if (elapsed >= 30.0) pass = false;
    return {pass, fmt("worst pull %.2f sigma (<=3), runtime %.1f s (<30)", worst, elapsed)};
}

std::pair<bool, std::string> criterion_2_coincidence_rate() {
    ExperimentConfig cfg;
    cfg.rates.pair_rate_hz = 1e4;
    cfg.rates.total_rate_hz = 2e4;
    cfg.detector_a.eta_q = 0.25;
    cfg.detector_b.eta_q = 0.25;
    cfg.detector_a.jitter_sigma_s = 5e-11;
    cfg.detector_b.jitter_sigma_s = 5e-11;
    cfg.rates.window_s = 2e-9;
    cfg.duration_s = 30.0;
    cfg.seed = 4200;

    const ScanAxis ax1{"transmissivity", {1.0, 0.8, 0.6}};
    const ScanAxis ax2{"dead_time_ns", {0.0, 100.0}};
    const ScanResult scan = scan_grid(cfg, ax1, ax2);

    bool pass = true;
    double worst = 0.0;
    int cells_pass = 0;
    for (std::size_t i1 = 0; i1 < ax1.values.size(); ++i1)
        for (std::size_t i2 = 0; i2 < ax2.values.size(); ++i2) {
            ExperimentConfig point = cfg;
            apply_scan_parameter(point, ax1.parameter, ax1.values[i1]);
            apply_scan_parameter(point, ax2.parameter, ax2.values[i2]);
            const double expected =
                expected_coincidence_rate(point.rates, point.detector_a, point.detector_b) *
                point.duration_s;
            const double observed = static_cast<double>(scan.at(i1, i2).coincidences);
            const double pull = std::abs(observed - expected) / std::sqrt(expected);
            worst = std::max(worst, pull);
            if (pull <= 3.0) ++cells_pass;
            else pass = false;
        }
    return {pass, fmt("%d/6 grid cells within 3 sigma, worst pull %.2f", cells_pass, worst)};
}

std::pair<bool, std::string> criterion_3_accidental_floor() {
    bool pass = true;
    std::string detail;
    int i = 0;
    for (double window_ns : {0.1, 1.0, 10.0}) {
        ExperimentConfig cfg;
        cfg.rates.total_rate_hz = 1e5;  // unpaired singles only
        cfg.duration_s = 20.0;
        cfg.seed = 4300 + i++;
        std::vector<std::int64_t> a, b;
        simulate_to_vectors(cfg, a, b);
        const double window = window_ns * 1e-9;
        const CountsRecord rec = count_coincidences(a, b, window, 0, cfg.duration_s);
        const double expected = rec.singles_a_hz() * rec.singles_b_hz() * window * cfg.duration_s;
        const double pull = std::abs(double(rec.coincidences) - expected) / std::sqrt(expected);
        if (pull > 5.0) pass = false;
        detail += fmt("%.1fns:%.1fs ", window_ns, pull);
    }
    return {pass, detail + "(pulls, all <=5 sigma)"};
}

std::pair<bool, std::string> criterion_4_desynchronization() {
    ExperimentConfig cfg;
    cfg.rates.pair_rate_hz = 1e6;
    cfg.rates.total_rate_hz = 2e6;
    cfg.detector_a.eta_q = 0.25;
    cfg.detector_b.eta_q = 0.25;
    cfg.detector_a.dead_time_s = 1e-5;  // R*eta*Td = 5 at 0 dB
    cfg.detector_b.dead_time_s = 1e-5;
    cfg.rates.window_s = 2e-9;
    cfg.duration_s = 2.0;
    cfg.seed = 4400;

    std::vector<double> att;
    for (int db = 0; db <= 12; db += 2) att.push_back(db);
    const ScanResult scan = scan_grid(cfg, ScanAxis{"attenuation_db", att}, ScanAxis{"eta_q", {0.25}});

    const double c0 = static_cast<double>(scan.at(0, 0).coincidences);
    const double c1 = static_cast<double>(scan.at(1, 0).coincidences);
    std::size_t best = 0;
    for (std::size_t i = 1; i < att.size(); ++i)
        if (scan.at(i, 0).coincidences > scan.at(best, 0).coincidences) best = i;
    const double cbest = static_cast<double>(scan.at(best, 0).coincidences);
    const bool rising_from_zero = c1 > c0 + 5.0 * std::sqrt(c1 + c0);
    const bool peak_inside = best > 0;
    return {rising_from_zero && peak_inside,
            fmt("coinc 0dB=%.0f 2dB=%.0f peak=%.0f@%.0fdB (rising segment from 0 dB)", c0, c1,
                cbest, att[best])};
}

std::pair<bool, std::string> criterion_5_dispersion_broadening() {
    ExperimentConfig cfg;
    cfg.rates.pair_rate_hz = 1e5;
    cfg.rates.total_rate_hz = 1e5;
    cfg.detector_a.jitter_sigma_s = 42.5e-12;
    cfg.detector_b.jitter_sigma_s = 42.5e-12;
    cfg.duration_s = 4.0;
    cfg.seed = 4500;

    // jitter-limited reference, no fiber
    std::vector<std::int64_t> a, b;
    simulate_to_vectors(cfg, a, b);
    const auto jitter_est = estimate_fwhm(delay_histogram(a, b, 10, 3000, cfg.duration_s));

    // 28 km single-mode spool on one arm of a 60 nm FWHM source
    cfg.source_bandwidth_nm = 60.0;
    cfg.fiber_b.length_km = 28.0;
    cfg.fiber_b.dispersion_ps_per_km_nm = 17.0;
    cfg.seed = 4501;
    std::vector<std::int64_t> a2, b2;
    simulate_to_vectors(cfg, a2, b2);
    const auto disp_est = estimate_fwhm(delay_histogram(a2, b2, 250, 120000, cfg.duration_s));

    const double predicted = dispersion_broadening_ps(17.0, 28.0, 60.0);  // 28,560 ps
    const bool width_ok =
        disp_est.ok && std::abs(disp_est.fwhm_ps - predicted) <= 0.15 * predicted;
    const bool ratio_ok = jitter_est.ok && disp_est.fwhm_ps >= 100.0 * jitter_est.fwhm_ps;
    return {width_ok && ratio_ok,
            fmt("FWHM %.0f ps (predicted %.0f +-15%%), %.0fx the jitter-limited %.0f ps (>=100x)",
                disp_est.fwhm_ps, predicted, disp_est.fwhm_ps / jitter_est.fwhm_ps,
                jitter_est.fwhm_ps)};
}

std::pair<bool, std::string> criterion_6_metric_ideals() {
    const auto phi = bell_state(BellKind::PhiPlus);
    BasisCounts ideal;
    for (const auto& key : linear_settings())
        ideal.set(key.first, key.second, 1e6 * coincidence_probability(phi, key.first, key.second));

    bool pass = true;
    pass &= std::abs(average_visibility(ideal, LinearBasis::HV) - 1.0) < 1e-12;
    pass &= std::abs(average_visibility(ideal, LinearBasis::DA) - 1.0) < 1e-12;
    pass &= std::abs(qber(ideal, BellKind::PhiPlus)) < 1e-12;
    pass &= std::abs(coincidence_entropies(ideal, Side::A).total - 8.0) < 1e-9;
    pass &= std::abs(coincidence_entropies(ideal, Side::B).total - 8.0) < 1e-9;

    const SvExtremes sv = sv_extremize(SourceStateModel{}, Side::A);
    pass &= sv.sv_max < 1e-12 && sv.sv_min < 1e-12;

    const QstMetrics q = qst_metrics(phi);
    pass &= std::abs(q.purity - 1.0) < 1e-12;
    pass &= std::abs(q.von_neumann_bits) < 1e-9;
    pass &= std::abs(q.renyi2_a_nats - std::log(2.0)) < 1e-9;

    // entropy bound over randomized states
    Rng rng(4600);
    double max_entropy = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Mat4 g;
        for (std::size_t k = 0; k < 16; ++k) g.e[k] = Cx{rng.normal(), rng.normal()};
        Mat4 m = g * g.adjoint();
        m *= Cx{1.0 / m.trace().real(), 0.0};
        const auto rho = DensityMatrix::from_matrix(hermitized(m));
        BasisCounts counts;
        for (const auto& key : linear_settings())
            counts.set(key.first, key.second,
                       1e6 * coincidence_probability(rho, key.first, key.second));
        const double h = coincidence_entropies(counts, Side::A).total;
        max_entropy = std::max(max_entropy, h);
        if (h > 8.0 + 1e-12) pass = false;
    }
    return {pass, fmt("ideal V=1 QBER=0 H=8 SV=0 purity=1 S=0 Y=ln2; max H over 1000 random "
                      "states %.4f (<=8)", max_entropy)};
}

std::pair<bool, std::string> criterion_7_qber_visibility() {
    bool pass = true;
    std::string detail = "QBER(p): ";
    int i = 0;
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto rho = werner(p);
        // HV + DA blocks sampled so each setting carries ~1e5 coincidences
        BasisCounts counts;
        Rng rng(4700 + i++);
        for (auto j : kLinear) {
            const PolarizationAxis k = orthogonal_axis(j);
            for (auto second : {j, k}) {
                const double prob = coincidence_probability(rho, j, second);
                counts.set(j, second, static_cast<double>(rng.poisson(4e5 * prob)));
            }
        }
        const double q = qber(counts, BellKind::PhiPlus);
        const double expected = (1.0 - p) / 2.0;
        if (std::abs(q - expected) > 0.01) pass = false;
        detail += fmt("%.3f/%.3f ", q, expected);
    }
    return {pass, detail + "(measured/expected, +-0.01)"};
}

std::pair<bool, std::string> criterion_8_tomography_roundtrip() {
    bool pass = true;
    double min_fid_noiseless = 1.0, min_fid_sampled = 1.0, max_seconds = 0.0;

    std::vector<DensityMatrix> states;
    for (BellKind kind : kAllBellKinds) states.push_back(bell_state(kind));
    states.push_back(werner(0.3));
    states.push_back(werner(0.7));

    int seed = 4800;
    for (const auto& rho : states) {
        const auto exact = expected_projection_counts(rho, canonical_tomography_settings(), 1e5);
        const auto t0 = Clock::now();
        const MLEResult noiseless = mle_reconstruct(exact);
        const auto t1 = Clock::now();
        const MLEResult sampled = mle_reconstruct(simulate_tomography(rho, 1e5, seed++));
        const auto t2 = Clock::now();

        min_fid_noiseless = std::min(min_fid_noiseless, fidelity(noiseless.rho, rho));
        min_fid_sampled = std::min(min_fid_sampled, fidelity(sampled.rho, rho));
        max_seconds = std::max({max_seconds, std::chrono::duration<double>(t1 - t0).count(),
                                std::chrono::duration<double>(t2 - t1).count()});
    }
    pass &= min_fid_noiseless >= 1.0 - 1e-6;
    pass &= min_fid_sampled >= 0.99;
    pass &= max_seconds < 10.0;
    return {pass, fmt("min fidelity: noiseless %.8f (>=1-1e-6), 1e5 shots %.4f (>=0.99), "
                      "slowest %.2f s (<10)", min_fid_noiseless, min_fid_sampled, max_seconds)};
}

std::pair<bool, std::string> criterion_9_preset_ordering() {
    const char* names[] = {"high_entanglement.cfg", "medium_entanglement.cfg",
                           "low_entanglement.cfg"};
    std::vector<double> purity_v, entropy_v, vis_v, qber_v, hsum_v;
    bool consistency = true;
    double worst_se_ratio = 0.0;

    int seed = 4900;
    for (const char* name : names) {
        const RunConfig rc = load_run_config(std::string(EPC_PRESET_DIR) + "/" + name);
        const auto rho = rc.experiment.state.to_density_matrix();

        // direct metrics from a sampled linear table
        const auto lin = sample_projection_counts(rho, linear_settings(), 2e5, seed++);
        vis_v.push_back(average_visibility(lin, LinearBasis::HV));
        qber_v.push_back(qber(lin, rc.experiment.state.bell_kind));
        hsum_v.push_back(coincidence_entropies(lin, Side::A).total);

        // QST from sampled canonical counts; same counts feed both visibility paths
        const auto qst_counts = simulate_tomography(rho, 1e5, seed++);
        const MLEResult mle = mle_reconstruct(qst_counts);
        const QstMetrics q = qst_metrics(mle.rho);
        purity_v.push_back(q.purity);
        entropy_v.push_back(q.von_neumann_bits);

        // direct visibility from the identical simulated counts
        const double v_direct = average_visibility(qst_counts, LinearBasis::HV);
        auto born_vis = [&](PolarizationAxis j) {
            const double a = coincidence_probability(mle.rho, j, j);
            const double b = coincidence_probability(mle.rho, j, orthogonal_axis(j));
            return (a - b) / (a + b);
        };
        const double v_qst = 0.5 * (born_vis(PolarizationAxis::H) + born_vis(PolarizationAxis::V));
        auto se_vis = [&](PolarizationAxis j) {
            const double a = qst_counts.at(j, j).counts;
            const double b = qst_counts.at(j, orthogonal_axis(j)).counts;
            return std::sqrt(4.0 * a * b / std::pow(a + b, 3.0));
        };
        const double se = 0.5 * std::sqrt(std::pow(se_vis(PolarizationAxis::H), 2) +
                                          std::pow(se_vis(PolarizationAxis::V), 2));
        const double ratio = std::abs(v_direct - v_qst) / se;
        worst_se_ratio = std::max(worst_se_ratio, ratio);
        if (ratio > 3.0) consistency = false;
    }

    auto strictly_desc = [](const std::vector<double>& v) {
        return v[0] > v[1] && v[1] > v[2];
    };
    auto strictly_asc = [](const std::vector<double>& v) { return v[0] < v[1] && v[1] < v[2]; };
    const bool ordering = strictly_desc(purity_v) && strictly_asc(entropy_v) &&
                          strictly_desc(vis_v) && strictly_asc(qber_v) && strictly_desc(hsum_v);
    return {ordering && consistency,
            fmt("purity %.2f/%.2f/%.2f desc, S %.2f/%.2f/%.2f asc, V %.2f/%.2f/%.2f desc, "
                "QBER %.2f/%.2f/%.2f asc, H %.2f/%.2f/%.2f desc; QST-direct vis worst %.2f SE (<=3)",
                purity_v[0], purity_v[1], purity_v[2], entropy_v[0], entropy_v[1], entropy_v[2],
                vis_v[0], vis_v[1], vis_v[2], qber_v[0], qber_v[1], qber_v[2], hsum_v[0],
                hsum_v[1], hsum_v[2], worst_se_ratio)};
}

// -- criterion 10: CLI determinism -------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

bool run_cli(const std::string& args, const fs::path& stdout_path) {
    const std::string cmd = std::string(EPC_CLI_PATH) + " " + args + " > " +
                            stdout_path.string() + " 2> /dev/null";
    return std::system(cmd.c_str()) == 0;
}

std::pair<bool, std::string> criterion_10_determinism() {
    const fs::path work = fs::temp_directory_path() / "epc_acceptance_work";
    fs::remove_all(work);
    fs::create_directories(work);

    const fs::path sim_cfg = work / "sim.cfg";
    {
        std::ofstream os(sim_cfg);
        os << "source.pair_rate_hz = 5e4\nsource.total_rate_hz = 1e5\n"
              "source.state.bell_fraction = 0.9\nsource.state.depolarized_fraction = 0.1\n"
              "detector_a.dark_rate_hz = 200\ndetector_b.dark_rate_hz = 150\n"
              "detector_a.jitter_ps = 40\ndetector_b.jitter_ps = 40\n"
              "detector_a.dead_time_ns = 25\ndetector_b.dead_time_ns = 25\n"
              "coincidence.window_ps = 1000\nrun.duration_s = 0.3\nrun.seed = 9\n";
    }
    const fs::path scan_cfg = work / "scan.cfg";
    {
        std::ofstream os(scan_cfg);
        os << "source.pair_rate_hz = 2e4\nsource.total_rate_hz = 5e4\n"
              "coincidence.window_ps = 1500\nrun.duration_s = 0.2\nrun.seed = 11\n"
              "scan.axis1.parameter = dead_time_ns\nscan.axis1.values = 50,500\n"
              "scan.axis2.parameter = attenuation_db\nscan.axis2.values = 0,3\n";
    }
    const fs::path met_cfg = work / "metrics.cfg";
    {
        std::ofstream os(met_cfg);
        os << "source.pair_rate_hz = 1e5\nsource.total_rate_hz = 1e5\n"
              "source.state.bell_fraction = 0.92\nsource.state.depolarized_fraction = 0.08\n"
              "detector_a.jitter_ps = 30\ndetector_b.jitter_ps = 30\n"
              "coincidence.window_ps = 1000\nrun.duration_s = 0.25\nrun.seed = 13\n"
              "metrics.setting_duration_s = 0.25\ntomography.setting_duration_s = 0.25\n";
    }

    struct Case {
        std::string name;
        std::string args;            // {DIR} substituted per round
        std::vector<std::string> outputs;  // produced files to compare, relative to DIR
    };
    const std::vector<Case> cases = {
        {"simulate", "simulate --config " + sim_cfg.string() + " --out-dir {DIR} --out events.csv",
         {"events.csv"}},
        {"analyze", "analyze --in {DIR}/events.csv --window-ps 1000 --hist-bin-ps 100 "
                    "--hist-range-ps 5000 --out-hist {DIR}/hist.csv", {"hist.csv"}},
        {"scan", "scan --config " + scan_cfg.string() + " --out-dir {DIR}",
         {"scan_singles_a.csv", "scan_singles_b.csv", "scan_coincidences.csv"}},
        {"metrics", "metrics --config " + met_cfg.string() + " --out-dir {DIR} --label preset "
                    "--out report.json", {"report.json"}},
        {"tomography", "tomography --config " + met_cfg.string() + " --out-dir {DIR} "
                       "--out-counts qst_counts.csv", {"qst_counts.csv"}},
    };

    for (int round = 0; round < 2; ++round) {
        const fs::path dir = work / ("round" + std::to_string(round));
        fs::create_directories(dir);
        for (const auto& c : cases) {
            std::string args = c.args;
            std::string::size_type pos;
            while ((pos = args.find("{DIR}")) != std::string::npos)
                args.replace(pos, 5, dir.string());
            if (!run_cli(args, dir / (c.name + ".stdout")))
                return {false, c.name + " exited nonzero (round " + std::to_string(round) + ")"};
        }
    }

    for (const auto& c : cases) {
        std::vector<std::string> files = c.outputs;
        files.push_back(c.name + ".stdout");
        for (const auto& f : files) {
            const std::string b0 = slurp(work / "round0" / f);
            const std::string b1 = slurp(work / "round1" / f);
            if (b0.empty() && f != c.name + ".stdout")
                return {false, c.name + ": missing output " + f};
            if (b0 != b1) return {false, c.name + ": " + f + " differs between identical runs"};
        }
    }
    fs::remove_all(work);
    return {true, "5 commands, all outputs byte-identical across repeated runs"};
}

} // namespace

int main() {
    std::printf("acceptance suite (kernels backend: %s)\n",
                kernels::backend_name(kernels::active_backend()).c_str());
    run(1, "saturation curve vs eta/(1+R eta Td)", criterion_1_saturation_curve);
    run(2, "coincidence rate vs closed form", criterion_2_coincidence_rate);
    run(3, "accidental floor R_MA R_MB dt T", criterion_3_accidental_floor);
    run(4, "desynchronization anomaly", criterion_4_desynchronization);
    run(5, "dispersion broadening 28 km x 60 nm", criterion_5_dispersion_broadening);
    run(6, "metric ideals for phi+", criterion_6_metric_ideals);
    run(7, "QBER = (1-V)/2 on Werner states", criterion_7_qber_visibility);
    run(8, "tomography round trip", criterion_8_tomography_roundtrip);
    run(9, "preset ordering + QST/direct agreement", criterion_9_preset_ordering);
    run(10, "CLI determinism", criterion_10_determinism);

    if (g_failures == 0) {
        std::printf("all 10 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
