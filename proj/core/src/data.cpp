#include "pbc/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pbc/errors.hpp"
#include "pbc/rng.hpp"

namespace pbc {

SynthSpec SynthSpec::group(char which, std::uint64_t seed) {
    SynthSpec spec;
    spec.seed = seed;
    switch (which) {
        case '1': spec.group_size = 120; spec.class_mix = {40, 40, 40}; break;
        case '2': spec.group_size = 100; spec.class_mix = {34, 33, 33}; break;
        case '3': spec.group_size = 80; spec.class_mix = {27, 27, 26}; break;
        case '4': spec.group_size = 60; spec.class_mix = {20, 20, 20}; break;
        default: throw InvalidArgument("synthetic group must be one of G1..G4");
    }
    return spec;
}

void SynthSpec::validate() const {
    if (group_size < 3) throw InvalidArgument("group size must be at least 3");
    int total = 0;
    for (int c : class_mix) {
        if (c < 1) throw InvalidArgument("every class needs at least one sample");
        total += c;
    }
    if (total != group_size)
        throw InvalidArgument("class mix must sum to the group size");
}

Dataset generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    Dataset out;
    out.samples = Mat(static_cast<std::size_t>(spec.group_size), 3);
    out.truth_labels = std::vector<int>(static_cast<std::size_t>(spec.group_size));
    out.name = "synthetic";
    std::size_t row = 0;
    for (int cls = 1; cls <= 3; ++cls) {
        for (int c = 0; c < spec.class_mix[static_cast<std::size_t>(cls - 1)];
             ++c, ++row) {
            double x = 0.0, y = 0.0, z = 0.0;
            switch (cls) {
                case 1:
                    x = 1.0 + rng.gaussian();
                    y = 1.0;
                    z = -x + 1.0;
                    break;
                case 2:
                    x = 3.0 + rng.gaussian();
                    y = 1.0;
                    z = x - 1.0;
                    break;
                case 3:
                    x = 2.0 + rng.gaussian();
                    y = 1.0 + rng.gaussian();
                    z = 0.0;
                    break;
            }
            out.samples(row, 0) = x;
            out.samples(row, 1) = y;
            out.samples(row, 2) = z;
            (*out.truth_labels)[row] = cls;
        }
    }
    out.validate();
    return out;
}

namespace {

bool parse_double(const std::string& tok, double& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::stringstream ss(line);
    while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Dataset load_csv(const std::string& path, bool has_labels) {
    std::ifstream in(path);
    if (!in) throw EmptyFile("cannot open '" + path + "'");

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_line(line));
        line_numbers.push_back(lineno);
    }
    if (rows.empty()) throw EmptyFile("'" + path + "' has no data rows");

    // Header: first row with any non-numeric cell.
    std::size_t first_row = 0;
    {
        double tmp;
        const bool numeric = std::all_of(
            rows[0].begin(), rows[0].end(),
            [&](const std::string& t) { return parse_double(t, tmp); });
        if (!numeric) first_row = 1;
    }
    if (first_row >= rows.size())
        throw EmptyFile("'" + path + "' has a header but no data rows");

    const std::size_t width = rows[first_row].size();
    if (has_labels && width < 2)
        throw InvalidArgument("label column requires at least two columns");
    const std::size_t n_features = has_labels ? width - 1 : width;
    const std::size_t m = rows.size() - first_row;

    Dataset out;
    out.samples = Mat(m, n_features);
    if (has_labels) out.truth_labels = std::vector<int>(m);
    out.name = path;

    for (std::size_t r = first_row; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() != width)
            throw RaggedRows("row at line " + std::to_string(line_numbers[r]) +
                             " has " + std::to_string(cells.size()) +
                             " columns, expected " + std::to_string(width));
        const std::size_t i = r - first_row;
        for (std::size_t c = 0; c < n_features; ++c) {
            double v;
            if (!parse_double(cells[c], v))
                throw ParseError(line_numbers[r], c + 1,
                                 "'" + cells[c] + "' is not a number");
            out.samples(i, c) = v;
        }
        if (has_labels) {
            double v;
            if (!parse_double(cells[width - 1], v) || v != std::floor(v))
                throw ParseError(line_numbers[r], width,
                                 "'" + cells[width - 1] +
                                     "' is not an integer label");
            (*out.truth_labels)[i] = static_cast<int>(v);
        }
    }
    out.validate();
    return out;
}

void save_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    char buf[64];
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t c = 0; c < data.dim(); ++c) {
            // 15 significant digits keep the round trip within 1e-12.
            const auto res = std::snprintf(buf, sizeof buf, "%.15g",
                                           data.samples(i, c));
            (void)res;
            if (c) out << ',';
            out << buf;
        }
        if (data.truth_labels) out << ',' << (*data.truth_labels)[i];
        out << '\n';
    }
}

ScaleMethod scale_method_from_string(const std::string& name) {
    if (name == "minmax" || name == "minmax01") return ScaleMethod::MinMax01;
    if (name == "zscore") return ScaleMethod::ZScore;
    if (name == "none") return ScaleMethod::None;
    throw InvalidArgument("unknown scaling '" + name +
                          "'; valid: minmax, zscore, none");
}

std::string to_string(ScaleMethod method) {
    switch (method) {
        case ScaleMethod::MinMax01: return "minmax";
        case ScaleMethod::ZScore: return "zscore";
        case ScaleMethod::None: return "none";
    }
    return "?";
}

Dataset scale_features(const Dataset& data, ScaleMethod method) {
    if (method == ScaleMethod::None) return data;
    if (method == ScaleMethod::ZScore && data.size() < 2)
        throw InvalidArgument("z-score scaling needs at least two samples");
    Dataset out = data;
    const std::size_t m = data.size();
    for (std::size_t c = 0; c < data.dim(); ++c) {
        if (method == ScaleMethod::MinMax01) {
            double lo = data.samples(0, c), hi = lo;
            for (std::size_t i = 1; i < m; ++i) {
                lo = std::min(lo, data.samples(i, c));
                hi = std::max(hi, data.samples(i, c));
            }
            const double span = hi - lo;
            for (std::size_t i = 0; i < m; ++i)
                out.samples(i, c) =
                    span > 0.0 ? (data.samples(i, c) - lo) / span : 0.0;
        } else {
            double mean = 0.0;
            for (std::size_t i = 0; i < m; ++i) mean += data.samples(i, c);
            mean /= static_cast<double>(m);
            double var = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = data.samples(i, c) - mean;
                var += d * d;
            }
            var /= static_cast<double>(m - 1);
            const double sd = std::sqrt(var);
            for (std::size_t i = 0; i < m; ++i)
                out.samples(i, c) = sd > 0.0 ? (data.samples(i, c) - mean) / sd : 0.0;
        }
    }
    return out;
}

}  // namespace pbc
