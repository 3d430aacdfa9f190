#include "epc/io/reports.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "epc/errors.hpp"
#include "epc/quantum/state.hpp"

namespace epc {

namespace {

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

nlohmann::json density_matrix_json(const DensityMatrix& rho) {
    return nlohmann::json::parse(density_matrix_to_json(rho));
}

} // namespace

std::string metrics_report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["source"] = r.source_label;
    j["direct"] = {
        {"heralding", r.direct.heralding.h},
        {"heralding_below_accidentals", r.direct.heralding.below_accidentals},
        {"visibility_hv", r.direct.visibility_hv},
        {"visibility_da", r.direct.visibility_da},
        {"qber", r.direct.qber},
        {"coincidence_entropy_a_bits", r.direct.entropy_a_bits},
        {"coincidence_entropy_b_bits", r.direct.entropy_b_bits},
        {"sv_max", r.direct.sv_max},
        {"sv_min", r.direct.sv_min},
    };
    j["qst"] = {
        {"purity", r.qst.metrics.purity},
        {"von_neumann_entropy_bits", r.qst.metrics.von_neumann_bits},
        {"renyi2_a_nats", r.qst.metrics.renyi2_a_nats},
        {"renyi2_b_nats", r.qst.metrics.renyi2_b_nats},
        {"bell_fidelity", r.qst.metrics.bell_fidelity},
        {"nearest_bell", bell_name(r.qst.metrics.nearest_bell)},
        {"log_likelihood", r.qst.log_likelihood},
        {"mle_iterations", r.qst.iterations},
        {"mle_converged", r.qst.converged},
    };
    j["provenance"] = {
        {"config_hash", r.provenance.config_hash},
        {"seed", r.provenance.seed},
        {"setting_duration_s", r.provenance.setting_duration_s},
        {"tomography_duration_s", r.provenance.tomography_duration_s},
        {"accidentals_subtracted", r.provenance.accidentals_subtracted},
    };
    return j.dump(2) + "\n";
}

std::string metrics_report_table(const MetricsReport& r) {
    std::ostringstream os;
    // p, S and Y in QST units (bits / nats documented in the JSON block)
    os << "source                 p      S    Y_A   V_HV   V_DA   QBER    H_A    H_B  SVmax  SVmin\n";
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%-20s %5s %6s %6s %6s %6s %6s %6s %6s %6s %6s\n",
                  r.source_label.substr(0, 20).c_str(),
                  fixed(r.qst.metrics.purity, 2).c_str(),
                  fixed(r.qst.metrics.von_neumann_bits, 2).c_str(),
                  fixed(r.qst.metrics.renyi2_a_nats, 2).c_str(),
                  fixed(r.direct.visibility_hv, 2).c_str(),
                  fixed(r.direct.visibility_da, 2).c_str(),
                  fixed(r.direct.qber, 2).c_str(),
                  fixed(r.direct.entropy_a_bits, 2).c_str(),
                  fixed(r.direct.entropy_b_bits, 2).c_str(),
                  fixed(r.direct.sv_max, 2).c_str(),
                  fixed(r.direct.sv_min, 2).c_str());
    os << buf;
    return os.str();
}

std::string counts_record_to_json(const CountsRecord& rec) {
    nlohmann::json j = {
        {"singles_a", rec.singles_a},
        {"singles_b", rec.singles_b},
        {"coincidences", rec.coincidences},
        {"duration_s", rec.duration_s},
        {"window_s", rec.window_s},
        {"offset_ps", rec.offset_ps},
        {"accidental_estimate", rec.accidental_estimate},
        {"singles_a_hz", rec.singles_a_hz()},
        {"singles_b_hz", rec.singles_b_hz()},
        {"coincidence_hz", rec.coincidence_hz()},
    };
    return j.dump(2) + "\n";
}

std::string mle_result_to_json(const MLEResult& result, const QstMetrics& metrics) {
    nlohmann::json j;
    j["density_matrix"] = density_matrix_json(result.rho);
    j["optimizer"] = {
        {"log_likelihood", result.log_likelihood},
        {"iterations", result.iterations},
        {"converged", result.converged},
    };
    {
        nlohmann::json lin = nlohmann::json::array();
        for (std::size_t r = 0; r < 4; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t c = 0; c < 4; ++c)
                row.push_back({result.linear_inversion_rho(r, c).real(),
                               result.linear_inversion_rho(r, c).imag()});
            lin.push_back(row);
        }
        j["linear_inversion"] = lin;
    }
    j["metrics"] = {
        {"purity", metrics.purity},
        {"von_neumann_entropy_bits", metrics.von_neumann_bits},
        {"renyi2_a_nats", metrics.renyi2_a_nats},
        {"renyi2_b_nats", metrics.renyi2_b_nats},
        {"bell_fidelity", metrics.bell_fidelity},
        {"nearest_bell", bell_name(metrics.nearest_bell)},
    };
    return j.dump(2) + "\n";
}

std::string entropy_report_to_json(const EntropyReport& report) {
    static const char* axis_names[] = {"H", "V", "D", "A"};
    nlohmann::json j;
    j["side"] = report.side == Side::A ? "A" : "B";
    for (int i = 0; i < 4; ++i) {
        j["same_basis_bits"][axis_names[i]] = report.h_same[i];
        j["cross_basis_bits"][axis_names[i]] = report.h_cross[i];
    }
    j["total_bits"] = report.total;
    return j.dump(2) + "\n";
}

void write_histogram_csv(std::ostream& os, const DelayHistogram& hist) {
    os << "# delay histogram; bin_width_ps=" << hist.bin_width_ps
       << " pair_count=" << hist.pair_count << " duration_s=" << hist.duration_s << "\n";
    os << "delay_ps,counts\n";
    for (std::size_t i = 0; i < hist.bins.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.1f,%llu\n", hist.bin_center_ps(i),
                      static_cast<unsigned long long>(hist.bins[i]));
        os << buf;
    }
}

void write_scan_csv(std::ostream& os, const ScanResult& scan, const std::string& observable) {
    os << "# scan grid: rows=" << scan.axis1.parameter << " cols=" << scan.axis2.parameter
       << " observable=" << observable << "\n";
    os << scan.axis1.parameter << "\\" << scan.axis2.parameter;
    for (double v : scan.axis2.values) {
        char buf[48];
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        os << buf;
    }
    os << "\n";
    for (std::size_t i1 = 0; i1 < scan.axis1.values.size(); ++i1) {
        char head[48];
        std::snprintf(head, sizeof head, "%.17g", scan.axis1.values[i1]);
        os << head;
        for (std::size_t i2 = 0; i2 < scan.axis2.values.size(); ++i2) {
            const CountsRecord& rec = scan.at(i1, i2);
            std::uint64_t value = 0;
            if (observable == "singles_a") value = rec.singles_a;
            else if (observable == "singles_b") value = rec.singles_b;
            else if (observable == "coincidences") value = rec.coincidences;
            else throw DataError("unknown scan observable: " + observable);
            os << ',' << value;
        }
        os << "\n";
    }
}

} // namespace epc
