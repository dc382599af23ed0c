#ifndef PBC_REPORT_HPP
#define PBC_REPORT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pbc {

/// Machine-readable record of one clustering run. Serialized as flat
/// `key = value` lines under a schema version so downstream tooling can
/// diff and re-plot runs.
struct RunReport {
    static constexpr const char* kSchema = "pbc.report.v1";

    std::string preset;
    std::map<std::string, double> params;
    std::string dataset;
    int m = 0, n = 0, k = 0;
    std::string kernel = "linear";
    std::string scaling = "none";
    std::string init = "nng";
    std::string assignment = "simplified";
    std::uint64_t seed = 0;

    double ac = -1.0;  // negative when no ground truth was available
    double mi = -1.0;
    int iterations = 0;
    std::string termination_reason;
    bool converged = false;
    std::int64_t wall_time_ms = 0;
    std::vector<double> objective_trace;

    struct ClusterRow {
        int cluster = 0;
        std::size_t size = 0;
        double mean_dev = 0.0;  // 1-order deviation statistic
        double var_dev = 0.0;   // 2-order deviation statistic
    };
    std::vector<ClusterRow> per_cluster;
    std::vector<int> labels;

    void validate() const;
};

void write_report(const RunReport& report, const std::string& path);
RunReport read_report(const std::string& path);

/// Plot-ready per-cluster deviation statistics with columns exactly
/// `method,cluster,size,mean_dev,var_dev`; empty clusters keep blank stats.
void write_devstats_csv(const RunReport& report, const std::string& path);

}  // namespace pbc

#endif  // PBC_REPORT_HPP
