#include "pbc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pbc/errors.hpp"

namespace pbc {

void RunReport::validate() const {
    for (std::size_t t = 1; t < objective_trace.size(); ++t)
        if (objective_trace[t] > objective_trace[t - 1] + 1e-9)
            throw InvalidArgument("objective trace is not non-increasing");
    auto in_range = [](double v) { return v < 0.0 || (v >= 0.0 && v <= 100.0); };
    if (!in_range(ac) || !in_range(mi))
        throw InvalidArgument("ac/mi must lie in [0, 100]");
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_report(const RunReport& r, const std::string& path) {
    r.validate();
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "schema = " << RunReport::kSchema << '\n';
    out << "preset = " << r.preset << '\n';
    out << "dataset = " << r.dataset << '\n';
    out << "m = " << r.m << '\n';
    out << "n = " << r.n << '\n';
    out << "k = " << r.k << '\n';
    for (const auto& [key, value] : r.params)
        out << "param." << key << " = " << format_double(value) << '\n';
    out << "kernel = " << r.kernel << '\n';
    out << "scaling = " << r.scaling << '\n';
    out << "init = " << r.init << '\n';
    out << "assignment = " << r.assignment << '\n';
    out << "seed = " << r.seed << '\n';
    out << "ac = " << format_double(r.ac) << '\n';
    out << "mi = " << format_double(r.mi) << '\n';
    out << "iterations = " << r.iterations << '\n';
    out << "termination = " << r.termination_reason << '\n';
    out << "converged = " << (r.converged ? 1 : 0) << '\n';
    out << "wall_time_ms = " << r.wall_time_ms << '\n';
    out << "objective_trace =";
    for (double v : r.objective_trace) out << ' ' << format_double(v);
    out << '\n';
    for (const auto& row : r.per_cluster) {
        const std::string prefix = "cluster." + std::to_string(row.cluster);
        out << prefix << ".size = " << row.size << '\n';
        if (row.size > 0) {
            out << prefix << ".mean_dev = " << format_double(row.mean_dev) << '\n';
            out << prefix << ".var_dev = " << format_double(row.var_dev) << '\n';
        }
    }
    out << "labels =";
    for (int v : r.labels) out << ' ' << v;
    out << '\n';
}

RunReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EmptyFile("cannot open '" + path + "'");
    RunReport r;
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
                s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\r' ||
                                  s.back() == '\t'))
                s.pop_back();
        };
        strip(key);
        strip(value);
        kv[key] = value;
    }
    if (kv["schema"] != RunReport::kSchema)
        throw InvalidArgument("unsupported report schema '" + kv["schema"] + "'");

    auto get = [&](const char* key) -> std::string {
        const auto it = kv.find(key);
        return it == kv.end() ? std::string{} : it->second;
    };
    r.preset = get("preset");
    r.dataset = get("dataset");
    r.m = std::stoi(get("m"));
    r.n = std::stoi(get("n"));
    r.k = std::stoi(get("k"));
    r.kernel = get("kernel");
    r.scaling = get("scaling");
    r.init = get("init");
    r.assignment = get("assignment");
    r.seed = std::stoull(get("seed"));
    r.ac = std::stod(get("ac"));
    r.mi = std::stod(get("mi"));
    r.iterations = std::stoi(get("iterations"));
    r.termination_reason = get("termination");
    r.converged = get("converged") == "1";
    r.wall_time_ms = std::stoll(get("wall_time_ms"));
    {
        std::stringstream ss(get("objective_trace"));
        double v;
        while (ss >> v) r.objective_trace.push_back(v);
    }
    {
        std::stringstream ss(get("labels"));
        int v;
        while (ss >> v) r.labels.push_back(v);
    }
    for (const auto& [key, value] : kv) {
        if (key.rfind("param.", 0) == 0) {
            r.params[key.substr(6)] = std::stod(value);
        } else if (key.rfind("cluster.", 0) == 0 &&
                   key.size() > 8 && key.find(".size") != std::string::npos) {
            const int cluster = std::stoi(key.substr(8, key.find(".size") - 8));
            RunReport::ClusterRow row;
            row.cluster = cluster;
            row.size = static_cast<std::size_t>(std::stoull(value));
            const std::string prefix = "cluster." + std::to_string(cluster);
            if (row.size > 0) {
                row.mean_dev = std::stod(kv.at(prefix + ".mean_dev"));
                row.var_dev = std::stod(kv.at(prefix + ".var_dev"));
            }
            r.per_cluster.push_back(row);
        }
    }
    std::sort(r.per_cluster.begin(), r.per_cluster.end(),
              [](const auto& a, const auto& b) { return a.cluster < b.cluster; });
    return r;
}

void write_devstats_csv(const RunReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "method,cluster,size,mean_dev,var_dev\n";
    for (const auto& row : r.per_cluster) {
        out << r.preset << ',' << row.cluster << ',' << row.size << ',';
        if (row.size > 0)
            out << format_double(row.mean_dev) << ','
                << format_double(row.var_dev);
        else
            out << ',';
        out << '\n';
    }
}

}  // namespace pbc
