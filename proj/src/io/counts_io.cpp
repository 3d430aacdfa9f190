#include "epc/io/counts_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "epc/errors.hpp"

namespace epc {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trimmed(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trimmed(cur));
    return out;
}

} // namespace

void write_counts_csv(std::ostream& os, const BasisCounts& counts) {
    os << "axis_a,axis_b,counts,duration_s\n";
    for (const auto& [key, sc] : counts.table())
        os << axis_name(key.first) << ',' << axis_name(key.second) << ','
           << format_double(sc.counts) << ',' << format_double(sc.duration_s) << '\n';
}

void write_counts_csv_file(const std::string& path, const BasisCounts& counts) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    write_counts_csv(os, counts);
}

BasisCounts read_counts_csv(std::istream& is) {
    BasisCounts counts;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (t == "axis_a,axis_b,counts,duration_s") continue;
            // fall through: headerless files are accepted
        }
        const auto fields = split_csv(t);
        if (fields.size() != 4)
            throw DataError("counts CSV line " + std::to_string(lineno) + ": expected 4 fields");
        const auto axis_a = parse_axis(fields[0]);
        const auto axis_b = parse_axis(fields[1]);
        if (!axis_a || !axis_b)
            throw DataError("counts CSV line " + std::to_string(lineno) + ": bad axis '" +
                            fields[0] + "," + fields[1] + "'");
        try {
            std::size_t pos = 0;
            const double c = std::stod(fields[2], &pos);
            if (pos != fields[2].size()) throw std::invalid_argument("trailing");
            pos = 0;
            const double d = std::stod(fields[3], &pos);
            if (pos != fields[3].size()) throw std::invalid_argument("trailing");
            counts.set(*axis_a, *axis_b, c, d);
        } catch (const DataError&) {
            throw;
        } catch (const std::exception&) {
            throw DataError("counts CSV line " + std::to_string(lineno) + ": bad numeric field");
        }
    }
    return counts;
}

BasisCounts read_counts_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open: " + path);
    try {
        return read_counts_csv(is);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

} // namespace epc
