// epc - entangled photon-pair source characterization toolkit.
// Subcommands: simulate, analyze, scan, metrics, tomography, config-help.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "epc/errors.hpp"
#include "epc/io/config_file.hpp"
#include "epc/io/counts_io.hpp"
#include "epc/io/reports.hpp"
#include "epc/io/timestamps.hpp"
#include "epc/kernels/kernels.hpp"
#include "epc/pipeline.hpp"
#include "epc/sim/generator.hpp"
#include "epc/sim/histogram.hpp"
#include "epc/sim/scan.hpp"
#include "epc/tomography/tomography.hpp"

namespace fs = std::filesystem;
using namespace epc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNoConvergence = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

fs::path resolve_out_dir(const CommonArgs& args, const RunConfig& rc) {
    if (!args.out_dir.empty()) return args.out_dir;
    if (const char* env = std::getenv("EPC_OUT_DIR"); env && *env) return env;
    if (!rc.output_dir.empty()) return rc.output_dir;
    return fs::current_path();
}

RunConfig load_config(CommonArgs& args) {
    RunConfig rc = load_run_config(args.config_path);
    if (args.seed_set) rc.experiment.seed = args.seed;
    return rc;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path.string());
    return os;
}

int cmd_simulate(CommonArgs& args, const std::string& out_name) {
    RunConfig rc = load_config(args);
    const fs::path dir = resolve_out_dir(args, rc);
    fs::create_directories(dir);
    const fs::path out_path = dir / out_name;

    std::ofstream os = open_output(out_path);
    TimestampCsvWriter writer(os);
    CoincidenceCounter counter(rc.experiment.rates.window_s, 0, rc.experiment.duration_s);
    TeeSink tee({&writer, &counter});
    simulate(rc.experiment, tee);
    os.close();

    std::cout << counts_record_to_json(counter.record());
    std::cerr << "events written to " << out_path.string() << "\n";
    return kExitOk;
}

int cmd_analyze(const std::string& in_path, double window_ps, std::int64_t offset_ps,
                bool subtract_accidentals, std::int64_t hist_bin_ps, std::int64_t hist_range_ps,
                const std::string& hist_out, double duration_s) {
    CoincidenceCounter counter(window_ps * 1e-12, offset_ps, 0.0);
    DelayHistogrammer hist(hist_bin_ps, hist_range_ps, 0.0);
    TeeSink tee({&counter, &hist});
    const TimestampStats stats = read_timestamps_file(in_path, tee);

    // duration defaults to the last timestamp when not supplied
    const double duration =
        duration_s > 0.0 ? duration_s : static_cast<double>(stats.last_time_ps) * 1e-12;
    CountsRecord rec = counter.record();
    rec.duration_s = duration;
    if (duration > 0.0)
        rec.accidental_estimate = static_cast<double>(rec.singles_a) *
                                  static_cast<double>(rec.singles_b) * rec.window_s / duration;

    DelayHistogram h = hist.histogram();
    h.duration_s = duration;
    if (subtract_accidentals) {
        const double floor = h.expected_floor_per_bin();
        for (auto& bin : h.bins) {
            const double corrected = static_cast<double>(bin) - floor;
            bin = corrected > 0.0 ? static_cast<std::uint64_t>(std::llround(corrected)) : 0;
        }
    }

    nlohmann::json j = nlohmann::json::parse(counts_record_to_json(rec));
    if (subtract_accidentals)
        j["coincidences_accidental_corrected"] =
            std::max(0.0, static_cast<double>(rec.coincidences) - rec.accidental_estimate);
    const FwhmEstimate fwhm = estimate_fwhm(h);
    if (fwhm.ok) {
        j["histogram_fwhm_ps"] = fwhm.fwhm_ps;
        j["histogram_peak_delay_ps"] = fwhm.peak_delay_ps;
    }
    std::cout << j.dump(2) << "\n";

    if (!hist_out.empty()) {
        std::ofstream os = open_output(hist_out);
        write_histogram_csv(os, h);
        std::cerr << "histogram written to " << hist_out << "\n";
    }
    return kExitOk;
}

int cmd_scan(CommonArgs& args) {
    RunConfig rc = load_config(args);
    if (!rc.scan.present || rc.scan.axis1.parameter.empty() || rc.scan.axis2.parameter.empty())
        throw ConfigError("scan command needs scan.axis1.* and scan.axis2.* in the config");
    const fs::path dir = resolve_out_dir(args, rc);
    fs::create_directories(dir);

    const ScanResult result = scan_grid(rc.experiment, rc.scan.axis1, rc.scan.axis2);
    for (const std::string name : {"singles_a", "singles_b", "coincidences"}) {
        const fs::path path = dir / ("scan_" + name + ".csv");
        std::ofstream os = open_output(path);
        write_scan_csv(os, result, name);
        std::cout << name << " -> scan_" << name << ".csv\n";
        std::cerr << "wrote " << path.string() << "\n";
    }
    return kExitOk;
}

int cmd_metrics(CommonArgs& args, const std::string& label, const std::string& json_out,
                bool subtract_accidentals) {
    RunConfig rc = load_config(args);
    if (subtract_accidentals) rc.metrics.subtract_accidentals = true;
    MetricsReport report = characterize_source(rc);
    report.source_label = label.empty() ? fs::path(args.config_path).stem().string() : label;

    std::cout << metrics_report_table(report);
    std::cout << metrics_report_to_json(report);
    if (!json_out.empty()) {
        const fs::path dir = resolve_out_dir(args, rc);
        fs::create_directories(dir);
        std::ofstream os = open_output(dir / json_out);
        os << metrics_report_to_json(report);
    }
    return report.qst.converged ? kExitOk : kExitNoConvergence;
}

int cmd_tomography(CommonArgs& args, const std::string& counts_path,
                   const std::string& counts_out) {
    BasisCounts counts;
    std::string hash;
    if (!counts_path.empty()) {
        counts = read_counts_csv_file(counts_path);
    } else {
        RunConfig rc = load_config(args);
        hash = rc.config_hash;
        const auto settings = canonical_tomography_settings();
        counts = simulate_setting_counts(rc.experiment, settings,
                                         rc.tomography.setting_duration_s, 0x71737463ULL, false);
        if (!counts_out.empty()) {
            const fs::path dir = resolve_out_dir(args, rc);
            fs::create_directories(dir);
            write_counts_csv_file((dir / counts_out).string(), counts);
            std::cerr << "counts written to " << (dir / counts_out).string() << "\n";
        }
    }
    const MLEResult result = mle_reconstruct(counts);
    std::cout << mle_result_to_json(result, qst_metrics(result.rho));
    return result.converged ? kExitOk : kExitNoConvergence;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"entangled photon-pair source characterization toolkit"};
    app.require_subcommand(1);

    CommonArgs common;

    auto add_common = [&](CLI::App* sub, bool config_required = true) {
        sub->add_option("--config", common.config_path, "experiment config file")
            ->required(config_required);
        sub->add_option("--out-dir", common.out_dir, "output directory (overrides EPC_OUT_DIR)");
        sub->add_option("--seed", common.seed, "override run.seed")
            ->each([&](const std::string&) { common.seed_set = true; });
    };

    auto* sim = app.add_subcommand("simulate", "generate a timestamped event stream");
    add_common(sim);
    std::string sim_out = "events.csv";
    sim->add_option("--out", sim_out, "output timestamp CSV name");

    auto* ana = app.add_subcommand("analyze", "count coincidences and histogram delays");
    std::string ana_in;
    double ana_window_ps = 1000.0;
    std::int64_t ana_offset_ps = 0;
    bool ana_subtract = false;
    std::int64_t ana_bin_ps = 100;
    std::int64_t ana_range_ps = 10000;
    std::string ana_hist_out;
    double ana_duration_s = 0.0;
    ana->add_option("--in", ana_in, "timestamp CSV to analyze")->required();
    ana->add_option("--window-ps", ana_window_ps, "coincidence window");
    ana->add_option("--offset-ps", ana_offset_ps, "channel B time offset");
    ana->add_flag("--subtract-accidentals", ana_subtract,
                  "subtract the accidental floor from the histogram and counts");
    ana->add_option("--hist-bin-ps", ana_bin_ps, "histogram bin width");
    ana->add_option("--hist-range-ps", ana_range_ps, "histogram half range");
    ana->add_option("--out-hist", ana_hist_out, "write the delay histogram CSV here");
    ana->add_option("--duration-s", ana_duration_s,
                    "acquisition duration (default: last timestamp)");

    auto* scan = app.add_subcommand("scan", "simulate a 2-D parameter grid (heat maps)");
    add_common(scan);

    auto* met = app.add_subcommand("metrics", "full direct + QST characterization report");
    add_common(met);
    std::string met_label, met_json_out;
    bool met_subtract = false;
    met->add_option("--label", met_label, "source label for the report table");
    met->add_option("--out", met_json_out, "also write the JSON report to this file");
    met->add_flag("--subtract-accidentals", met_subtract,
                  "correct each setting's counts by its accidental estimate");

    auto* tomo = app.add_subcommand("tomography", "reconstruct the density matrix by MLE");
    add_common(tomo, false);
    std::string tomo_counts_in, tomo_counts_out;
    tomo->add_option("--counts", tomo_counts_in, "tomography counts CSV (skips simulation)");
    tomo->add_option("--out-counts", tomo_counts_out, "write simulated counts CSV here");

    auto* help = app.add_subcommand("config-help", "print the config file schema");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(common, sim_out);
        if (ana->parsed())
            return cmd_analyze(ana_in, ana_window_ps, ana_offset_ps, ana_subtract, ana_bin_ps,
                               ana_range_ps, ana_hist_out, ana_duration_s);
        if (scan->parsed()) return cmd_scan(common);
        if (met->parsed()) return cmd_metrics(common, met_label, met_json_out, met_subtract);
        if (tomo->parsed()) {
            if (tomo_counts_in.empty() && common.config_path.empty())
                throw ConfigError("tomography needs --config or --counts");
            return cmd_tomography(common, tomo_counts_in, tomo_counts_out);
        }
        if (help->parsed()) {
            std::cout << config_schema_help();
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
