#include "epc/io/config_file.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "epc/errors.hpp"

namespace epc {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& v) {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters after number");
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite value");
    return d;
}

std::uint64_t parse_u64(const std::string& v) {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters after integer");
    return x;
}

std::int64_t parse_i64(const std::string& v) {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters after integer");
    return x;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("expected true/false");
}

std::array<double, 3> parse_vec3(const std::string& v) {
    std::array<double, 3> out{};
    std::stringstream ss(v);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) throw std::invalid_argument("expected 3 comma-separated numbers");
        out[i++] = parse_double(trimmed(part));
    }
    if (i != 3) throw std::invalid_argument("expected 3 comma-separated numbers");
    return out;
}

std::vector<double> parse_double_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_double(trimmed(part)));
    if (out.empty()) throw std::invalid_argument("expected a comma-separated number list");
    return out;
}

BellKind parse_bell(const std::string& v) {
    if (v == "phi+") return BellKind::PhiPlus;
    if (v == "phi-") return BellKind::PhiMinus;
    if (v == "psi+") return BellKind::PsiPlus;
    if (v == "psi-") return BellKind::PsiMinus;
    throw std::invalid_argument("expected one of phi+, phi-, psi+, psi-");
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct SchemaEntry {
    std::string unit;
    std::string meaning;
    std::function<void(RunConfig&, const std::string&)> apply;
};

using Schema = std::map<std::string, SchemaEntry>;

Schema build_schema() {
    Schema s;
    auto exp = [](RunConfig& rc) -> ExperimentConfig& { return rc.experiment; };

    s["source.pair_rate_hz"] = {"Hz", "photon pair rate R_C",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).rates.pair_rate_hz = parse_double(v); }};
    s["source.total_rate_hz"] = {"Hz", "total photon rate per arm R",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).rates.total_rate_hz = parse_double(v); }};
    s["source.bandwidth_nm"] = {"nm", "spectral FWHM of the source",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).source_bandwidth_nm = parse_double(v); }};
    s["source.state.bell_kind"] = {"", "target Bell state (phi+, phi-, psi+, psi-)",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).state.bell_kind = parse_bell(v); }};
    s["source.state.bell_fraction"] = {"", "weight of the Bell state",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).state.bell_fraction = parse_double(v); }};
    s["source.state.depolarized_fraction"] = {"", "weight of the maximally mixed state",
        [exp](RunConfig& rc, const std::string& v) {
            exp(rc).state.depolarized_fraction = parse_double(v);
        }};
    s["source.state.impurity_fraction"] = {"", "weight of the unentangled product impurity",
        [exp](RunConfig& rc, const std::string& v) {
            exp(rc).state.impurity_fraction = parse_double(v);
        }};
    s["source.state.impurity_bloch_a"] = {"", "impurity Bloch vector, arm A (x,y,z)",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).state.impurity_bloch_a = parse_vec3(v); }};
    s["source.state.impurity_bloch_b"] = {"", "impurity Bloch vector, arm B (x,y,z)",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).state.impurity_bloch_b = parse_vec3(v); }};
    s["source.state.rotation_a_axis"] = {"", "pre-rotation axis, arm A (x,y,z)",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).state.rotation_axis_a = parse_vec3(v); }};
    s["source.state.rotation_a_deg"] = {"deg", "pre-rotation angle, arm A",
        [exp](RunConfig& rc, const std::string& v) {
            exp(rc).state.rotation_angle_a_rad = parse_double(v) * M_PI / 180.0;
        }};
    s["source.state.rotation_b_axis"] = {"", "pre-rotation axis, arm B (x,y,z)",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).state.rotation_axis_b = parse_vec3(v); }};
    s["source.state.rotation_b_deg"] = {"deg", "pre-rotation angle, arm B",
        [exp](RunConfig& rc, const std::string& v) {
            exp(rc).state.rotation_angle_b_rad = parse_double(v) * M_PI / 180.0;
        }};

    for (const std::string arm : {"a", "b"}) {
        const bool is_a = arm == "a";
        s["channel_" + arm + ".transmissivity"] = {"", "total transmissivity gamma",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).rates.transmissivity_a : exp(rc).rates.transmissivity_b) =
                    parse_double(v);
            }};
        s["channel_" + arm + ".attenuation_db"] = {"dB", "channel attenuation (sets gamma)",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).rates.transmissivity_a : exp(rc).rates.transmissivity_b) =
                    attenuation_db_to_transmissivity(parse_double(v));
            }};
        s["channel_" + arm + ".fiber_km"] = {"km", "fiber length",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).fiber_a : exp(rc).fiber_b).length_km = parse_double(v);
            }};
        s["channel_" + arm + ".dispersion_ps_per_km_nm"] = {"ps/km/nm", "chromatic dispersion",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).fiber_a : exp(rc).fiber_b).dispersion_ps_per_km_nm =
                    parse_double(v);
            }};

        s["detector_" + arm + ".eta_q"] = {"", "quantum efficiency",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).detector_a : exp(rc).detector_b).eta_q = parse_double(v);
            }};
        s["detector_" + arm + ".dead_time_ns"] = {"ns", "non-paralyzable dead time",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).detector_a : exp(rc).detector_b).dead_time_s =
                    parse_double(v) * 1e-9;
            }};
        s["detector_" + arm + ".dark_rate_hz"] = {"Hz", "dark count rate",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).detector_a : exp(rc).detector_b).dark_rate_hz = parse_double(v);
            }};
        s["detector_" + arm + ".afterpulse_prob"] = {"", "afterpulse probability per event",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).detector_a : exp(rc).detector_b).afterpulse_prob = parse_double(v);
            }};
        s["detector_" + arm + ".afterpulse_tau_ns"] = {"ns", "mean afterpulse delay",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).detector_a : exp(rc).detector_b).afterpulse_tau_s =
                    parse_double(v) * 1e-9;
            }};
        s["detector_" + arm + ".jitter_ps"] = {"ps", "Gaussian timing jitter sigma",
            [exp, is_a](RunConfig& rc, const std::string& v) {
                (is_a ? exp(rc).detector_a : exp(rc).detector_b).jitter_sigma_s =
                    parse_double(v) * 1e-12;
            }};
    }

    s["coincidence.window_ps"] = {"ps", "coincidence window Delta_t",
        [exp](RunConfig& rc, const std::string& v) {
            exp(rc).rates.window_s = parse_double(v) * 1e-12;
        }};
    s["analyzer.a"] = {"", "analyzer axis on arm A (H,V,D,A,R,L or none)",
        [exp](RunConfig& rc, const std::string& v) {
            if (v == "none") { exp(rc).analyzer_a.reset(); return; }
            const auto ax = parse_axis(v);
            if (!ax) throw std::invalid_argument("expected H,V,D,A,R,L or none");
            exp(rc).analyzer_a = *ax;
        }};
    s["analyzer.b"] = {"", "analyzer axis on arm B (H,V,D,A,R,L or none)",
        [exp](RunConfig& rc, const std::string& v) {
            if (v == "none") { exp(rc).analyzer_b.reset(); return; }
            const auto ax = parse_axis(v);
            if (!ax) throw std::invalid_argument("expected H,V,D,A,R,L or none");
            exp(rc).analyzer_b = *ax;
        }};
    s["run.duration_s"] = {"s", "simulated wall time",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).duration_s = parse_double(v); }};
    s["run.seed"] = {"", "64-bit deterministic seed",
        [exp](RunConfig& rc, const std::string& v) { exp(rc).seed = parse_u64(v); }};

    for (const std::string ax : {"1", "2"}) {
        const bool first = ax == "1";
        s["scan.axis" + ax + ".parameter"] = {"", "scanned parameter name",
            [first](RunConfig& rc, const std::string& v) {
                rc.scan.present = true;
                (first ? rc.scan.axis1 : rc.scan.axis2).parameter = v;
            }};
        s["scan.axis" + ax + ".values"] = {"", "comma-separated values",
            [first](RunConfig& rc, const std::string& v) {
                rc.scan.present = true;
                (first ? rc.scan.axis1 : rc.scan.axis2).values = parse_double_list(v);
            }};
        s["scan.axis" + ax + ".linspace"] = {"", "start,stop,count uniform values",
            [first](RunConfig& rc, const std::string& v) {
                const auto p = parse_vec3(v);
                const int count = static_cast<int>(p[2]);
                if (count < 1 || p[2] != count)
                    throw std::invalid_argument("linspace count must be a positive integer");
                std::vector<double> vals;
                for (int i = 0; i < count; ++i)
                    vals.push_back(count == 1 ? p[0]
                                              : p[0] + (p[1] - p[0]) * i / (count - 1));
                rc.scan.present = true;
                (first ? rc.scan.axis1 : rc.scan.axis2).values = std::move(vals);
            }};
    }

    s["histogram.bin_ps"] = {"ps", "delay histogram bin width",
        [](RunConfig& rc, const std::string& v) { rc.histogram.bin_ps = parse_i64(v); }};
    s["histogram.range_ps"] = {"ps", "delay histogram half-range",
        [](RunConfig& rc, const std::string& v) { rc.histogram.range_ps = parse_i64(v); }};

    s["metrics.setting_duration_s"] = {"s", "acquisition per analyzer setting",
        [](RunConfig& rc, const std::string& v) {
            rc.metrics.setting_duration_s = parse_double(v);
        }};
    s["metrics.subtract_accidentals"] = {"", "subtract accidental estimate per setting",
        [](RunConfig& rc, const std::string& v) {
            rc.metrics.subtract_accidentals = parse_bool(v);
        }};
    s["tomography.setting_duration_s"] = {"s", "acquisition per QST setting",
        [](RunConfig& rc, const std::string& v) {
            rc.tomography.setting_duration_s = parse_double(v);
        }};
    s["output.directory"] = {"", "output directory (flag/EPC_OUT_DIR override)",
        [](RunConfig& rc, const std::string& v) { rc.output_dir = v; }};
    return s;
}

const Schema& schema() {
    static const Schema s = build_schema();
    return s;
}

} // namespace

RunConfig parse_run_config(std::istream& is, const std::string& name_for_errors) {
    std::string raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    RunConfig rc;
    {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a(raw)));
        rc.config_hash = buf;
    }

    std::istringstream ss(raw);
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        const std::string where = name_for_errors + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trimmed(t.substr(0, eq));
        const std::string value = trimmed(t.substr(eq + 1));
        const auto it = schema().find(key);
        if (it == schema().end())
            throw ConfigError(where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ConfigError(where + ": duplicate key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
        try {
            it->second.apply(rc, value);
        } catch (const std::exception& e) {
            throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
        }
    }
    if (seen.count("channel_a.transmissivity") && seen.count("channel_a.attenuation_db"))
        throw ConfigError(name_for_errors +
                          ": channel_a.transmissivity and channel_a.attenuation_db conflict");
    if (seen.count("channel_b.transmissivity") && seen.count("channel_b.attenuation_db"))
        throw ConfigError(name_for_errors +
                          ": channel_b.transmissivity and channel_b.attenuation_db conflict");
    rc.experiment.validate();
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    return parse_run_config(is, path);
}

std::string config_schema_help() {
    std::ostringstream os;
    os << "Configuration keys (key = value per line, '#' comments):\n";
    for (const auto& [key, entry] : schema()) {
        os << "  " << key;
        if (!entry.unit.empty()) os << " [" << entry.unit << "]";
        os << " - " << entry.meaning << "\n";
    }
    return os.str();
}

} // namespace epc
