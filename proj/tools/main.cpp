// Command-line front end: single runs, parameter grids, synthetic data,
// a kmeans baseline, and deviation-statistics extraction from run reports.
//
// Exit codes: 0 success, 2 input error, 3 solver failure, 4 non-convergence.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pbc/data.hpp"
#include "pbc/engine.hpp"
#include "pbc/errors.hpp"
#include "pbc/kernel.hpp"
#include "pbc/kmeans.hpp"
#include "pbc/metrics.hpp"
#include "pbc/report.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitNonConverged = 4;

struct RunOptions {
    std::string data_path;
    bool no_truth = false;
    std::string preset = "rfdpc";
    double c = 0.1;
    double cw = std::nan("");
    double cb = std::nan("");
    double gamma = std::nan("");
    double gamma1 = std::nan("");
    double gamma2 = std::nan("");
    double delta = 0.3;
    double s = -0.2;
    std::string kernel = "linear";
    double mu = 1.0;
    std::string scale = "minmax";
    std::string init = "nng";
    int neighbors = 5;
    std::uint64_t seed = 1;
    int k = 0;
    std::string assignment = "simplified";
    std::string termination = "both";
    int max_iter = 100;
    std::string report_path;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool with_preset) {
    cmd->add_option("--data", o.data_path, "input CSV")->required();
    cmd->add_flag("--no-truth", o.no_truth,
                  "the CSV has no trailing label column");
    if (with_preset)
        cmd->add_option("--preset", o.preset,
                        "kpc, ppc, twsvc, rtwsvc, frtwsvc, ramptwsvc, rfdpc");
    cmd->add_option("--c", o.c, "loss trade-off parameter (default 0.1)");
    cmd->add_option("--cw", o.cw, "within weight (rfdpc; defaults to --c)");
    cmd->add_option("--cb", o.cb, "between weight (rfdpc; defaults to --c)");
    cmd->add_option("--gamma", o.gamma, "rfdpc gamma1 = gamma2");
    cmd->add_option("--gamma1", o.gamma1, "rfdpc mean-statistic weight");
    cmd->add_option("--gamma2", o.gamma2, "rfdpc variance-statistic weight");
    cmd->add_option("--delta", o.delta, "ramp plateau start (default 0.3)");
    cmd->add_option("--s", o.s, "ramp slope offset (default -0.2)");
    cmd->add_option("--kernel", o.kernel, "linear or gaussian");
    cmd->add_option("--mu", o.mu, "gaussian kernel width");
    cmd->add_option("--scale", o.scale, "minmax, zscore or none");
    cmd->add_option("--init", o.init, "nng or random");
    cmd->add_option("--neighbors", o.neighbors, "nng neighbor count");
    cmd->add_option("--seed", o.seed, "seed for random choices");
    cmd->add_option("--k", o.k, "cluster count (default: from truth labels)");
    cmd->add_option("--assignment", o.assignment, "simplified or full");
    cmd->add_option("--termination", o.termination, "both, repeat or objective");
    cmd->add_option("--max-iter", o.max_iter, "iteration cap");
    cmd->add_option("--report", o.report_path, "write the run report here");
    cmd->set_config("--config", "", "INI file with long-option keys");
}

pbc::LossSpec make_spec(const RunOptions& o) {
    const pbc::Preset preset = pbc::preset_from_string(o.preset);
    auto pick = [](double v, double fallback) {
        return std::isnan(v) ? fallback : v;
    };
    switch (preset) {
        case pbc::Preset::Kpc: return pbc::LossSpec::kpc();
        case pbc::Preset::Ppc: return pbc::LossSpec::ppc(o.c);
        case pbc::Preset::Twsvc: return pbc::LossSpec::twsvc(o.c);
        case pbc::Preset::Rtwsvc: return pbc::LossSpec::rtwsvc(o.c);
        case pbc::Preset::Frtwsvc: return pbc::LossSpec::frtwsvc(o.c);
        case pbc::Preset::RampTwsvc:
            return pbc::LossSpec::ramptwsvc(o.c, o.delta, o.s);
        case pbc::Preset::Rfdpc: {
            const double g = pick(o.gamma, o.c);
            return pbc::LossSpec::rfdpc(pick(o.cw, o.c), pick(o.cb, o.c),
                                        pick(o.gamma1, g), pick(o.gamma2, g),
                                        o.delta, o.s);
        }
    }
    throw pbc::InvalidArgument("unreachable preset");
}

pbc::EngineConfig make_engine_config(const RunOptions& o, int k) {
    pbc::EngineConfig cfg;
    cfg.k = k;
    if (o.init == "nng")
        cfg.init = pbc::InitMethod::Nng;
    else if (o.init == "random")
        cfg.init = pbc::InitMethod::Random;
    else
        throw pbc::InvalidArgument("unknown init '" + o.init + "'");
    cfg.seed = o.seed;
    cfg.nng_neighbors = o.neighbors;
    cfg.max_iter = o.max_iter;
    if (o.assignment == "simplified")
        cfg.assignment_rule = pbc::AssignmentRule::SimplifiedAbsDev;
    else if (o.assignment == "full")
        cfg.assignment_rule = pbc::AssignmentRule::FullLoss;
    else
        throw pbc::InvalidArgument("unknown assignment rule '" + o.assignment + "'");
    if (o.termination == "both")
        cfg.termination = pbc::TerminationRule::Both;
    else if (o.termination == "repeat")
        cfg.termination = pbc::TerminationRule::RepeatedAssignment;
    else if (o.termination == "objective")
        cfg.termination = pbc::TerminationRule::NonDecreasingObjective;
    else
        throw pbc::InvalidArgument("unknown termination '" + o.termination + "'");
    return cfg;
}

std::vector<pbc::RunReport::ClusterRow> cluster_rows(const pbc::Dataset& data,
                                                     const pbc::ClusteringState& st,
                                                     pbc::DeviationKind kind) {
    std::vector<pbc::RunReport::ClusterRow> rows;
    for (int j = 1; j <= st.labels.k; ++j) {
        pbc::RunReport::ClusterRow row;
        row.cluster = j;
        const auto members = st.labels.members_of(j);
        row.size = members.size();
        if (!members.empty()) {
            std::vector<double> f(members.size());
            for (std::size_t t = 0; t < members.size(); ++t)
                f[t] = pbc::deviation(
                    data.samples.row(members[t]),
                    st.planes.weights.row(static_cast<std::size_t>(j - 1)),
                    st.planes.biases[static_cast<std::size_t>(j - 1)], kind);
            double mean = 0.0;
            for (double v : f) mean += v;
            mean /= static_cast<double>(f.size());
            double var = 0.0;
            if (f.size() >= 2) {
                for (double v : f) var += (v - mean) * (v - mean);
                var /= static_cast<double>(f.size() - 1);
            }
            row.mean_dev = mean;
            row.var_dev = var;
        }
        rows.push_back(row);
    }
    return rows;
}

struct LoadedData {
    pbc::Dataset data;  // scaled and (optionally) kernel-mapped
    int k = 0;
};

LoadedData load_for_run(const RunOptions& o, const pbc::KernelSpec* kernel) {
    LoadedData out;
    pbc::Dataset raw = pbc::load_csv(o.data_path, !o.no_truth);
    out.k = o.k > 0 ? o.k : raw.truth_k();
    if (out.k < 2)
        throw pbc::InvalidArgument(
            "cluster count unknown: pass --k or provide truth labels");
    pbc::Dataset scaled =
        pbc::scale_features(raw, pbc::scale_method_from_string(o.scale));
    if (kernel != nullptr && kernel->kind == pbc::KernelSpec::Kind::Gaussian)
        out.data = pbc::empirical_map(scaled, scaled, *kernel);
    else
        out.data = std::move(scaled);
    return out;
}

pbc::RunReport execute_run(const pbc::Dataset& data, int k, const RunOptions& o,
                           const pbc::LossSpec& spec, bool* hit_max_iter) {
    const pbc::EngineConfig cfg = make_engine_config(o, k);
    const auto t0 = std::chrono::steady_clock::now();
    const auto [state, trace] = pbc::run(data, spec, cfg);
    const auto t1 = std::chrono::steady_clock::now();

    pbc::RunReport rep;
    rep.preset = o.preset;
    rep.params["c_w"] = spec.c_w;
    rep.params["c_b"] = spec.c_b;
    if (spec.is_ramp()) {
        rep.params["delta"] = spec.delta;
        rep.params["s"] = spec.s;
    }
    if (spec.preset == pbc::Preset::Rfdpc) {
        rep.params["gamma1"] = spec.gamma1;
        rep.params["gamma2"] = spec.gamma2;
    }
    if (o.kernel == "gaussian") rep.params["mu"] = o.mu;
    rep.dataset = o.data_path;
    rep.m = static_cast<int>(data.size());
    rep.n = static_cast<int>(data.dim());
    rep.k = k;
    rep.kernel = o.kernel;
    rep.scaling = o.scale;
    rep.init = o.init;
    rep.assignment = o.assignment;
    rep.seed = o.seed;
    if (data.truth_labels) {
        const pbc::Labels truth{*data.truth_labels, data.truth_k()};
        rep.ac = pbc::accuracy(state.labels, truth);
        rep.mi = pbc::mutual_information(state.labels, truth);
    }
    rep.iterations = state.iteration;
    rep.termination_reason = pbc::to_string(trace.reason);
    rep.converged = trace.converged;
    rep.wall_time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    rep.objective_trace = trace.objectives;
    rep.per_cluster = cluster_rows(data, state, spec.deviation_kind);
    rep.labels = state.labels.assignment;
    if (hit_max_iter != nullptr) *hit_max_iter = !trace.converged;
    return rep;
}

void print_run_summary(const pbc::RunReport& rep) {
    if (rep.ac >= 0.0)
        std::printf("AC(%%)/MI(%%): %.2f/%.2f\n", rep.ac, rep.mi);
    else
        std::printf("AC(%%)/MI(%%): n/a (no truth labels)\n");
    std::printf("objective: %.6g after %d iterations (%s)\n",
                rep.objective_trace.empty() ? 0.0 : rep.objective_trace.back(),
                rep.iterations, rep.termination_reason.c_str());
}

int cmd_run(const RunOptions& o) {
    const pbc::LossSpec spec = make_spec(o);
    const pbc::KernelSpec kernel = o.kernel == "gaussian"
                                       ? pbc::KernelSpec::gaussian(o.mu)
                                       : pbc::KernelSpec::linear();
    if (o.kernel != "gaussian" && o.kernel != "linear")
        throw pbc::InvalidArgument("unknown kernel '" + o.kernel + "'");
    const LoadedData loaded = load_for_run(o, &kernel);
    bool hit_max = false;
    const pbc::RunReport rep =
        execute_run(loaded.data, loaded.k, o, spec, &hit_max);
    print_run_summary(rep);
    if (!o.report_path.empty()) pbc::write_report(rep, o.report_path);
    return hit_max ? kExitNonConverged : 0;
}

struct GridOptions {
    RunOptions base;
    std::string param = "";  // default chosen per preset
    std::vector<double> values;
    std::vector<double> mu_values;
    std::string metric = "ac";
    int jobs = 0;
};

std::vector<double> powers_of_two(int lo, int hi) {
    std::vector<double> v;
    for (int i = lo; i <= hi; ++i) v.push_back(std::ldexp(1.0, i));
    return v;
}

int cmd_grid(const GridOptions& g) {
    RunOptions base = g.base;
    std::string param = g.param;
    if (param.empty())
        param = base.preset == "rfdpc" ? "gamma" : "c";
    if (param != "c" && param != "gamma" && param != "mu")
        throw pbc::InvalidArgument("grid parameter must be c, gamma or mu");
    if (g.metric != "ac" && g.metric != "mi")
        throw pbc::InvalidArgument("metric must be ac or mi");

    std::vector<double> values = g.values;
    if (values.empty())
        values = param == "mu" ? powers_of_two(-10, 5) : powers_of_two(-8, 7);
    std::vector<double> mu_values = g.mu_values;
    const bool gaussian = base.kernel == "gaussian";
    if (gaussian && param != "mu" && mu_values.empty())
        mu_values = powers_of_two(-10, 5);
    if (!gaussian || param == "mu") mu_values = {base.mu};

    struct Point {
        RunOptions opts;
        double value = 0.0;
        double mu = 0.0;
        pbc::RunReport report;
        bool failed = false;
        std::string error;
    };
    std::vector<Point> points;
    for (const double v : values)
        for (const double mu : mu_values) {
            Point pt;
            pt.opts = base;
            pt.value = v;
            pt.mu = mu;
            if (param == "c") {
                pt.opts.c = v;
                pt.opts.cw = pt.opts.cb = std::nan("");
            } else if (param == "gamma") {
                pt.opts.gamma = v;
                pt.opts.gamma1 = pt.opts.gamma2 = std::nan("");
            } else {
                pt.opts.mu = v;
            }
            if (gaussian && param != "mu") pt.opts.mu = mu;
            points.push_back(std::move(pt));
        }

    // The dataset/scaling part is shared; kernel maps depend on mu.
    const int jobs = g.jobs > 0
                         ? g.jobs
                         : static_cast<int>(std::max(
                               1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= points.size()) break;
            Point& pt = points[idx];
            try {
                const pbc::LossSpec spec = make_spec(pt.opts);
                const pbc::KernelSpec kernel =
                    gaussian ? pbc::KernelSpec::gaussian(pt.opts.mu)
                             : pbc::KernelSpec::linear();
                const LoadedData loaded = load_for_run(pt.opts, &kernel);
                if (!loaded.data.truth_labels)
                    throw pbc::InvalidArgument(
                        "grid search needs truth labels to rank points");
                pt.report = execute_run(loaded.data, loaded.k, pt.opts, spec,
                                        nullptr);
            } catch (const std::exception& e) {
                pt.failed = true;
                pt.error = e.what();
            }
        }
    };
    for (int t = 0; t < jobs; ++t) workers.emplace_back(worker);
    for (auto& w : workers) w.join();

    std::printf("%-12s %-10s %-8s %-8s %s\n", param.c_str(),
                gaussian && param != "mu" ? "mu" : "-", "AC(%)", "MI(%)",
                "iterations");
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point& pt = points[i];
        if (pt.failed) {
            std::printf("%-12g %-10g failed: %s\n", pt.value,
                        gaussian && param != "mu" ? pt.mu : 0.0,
                        pt.error.c_str());
            continue;
        }
        std::printf("%-12g %-10g %-8.2f %-8.2f %d\n", pt.value,
                    gaussian && param != "mu" ? pt.mu : 0.0, pt.report.ac,
                    pt.report.mi, pt.report.iterations);
        if (best < 0) {
            best = static_cast<std::ptrdiff_t>(i);
            continue;
        }
        const Point& cur = points[static_cast<std::size_t>(best)];
        const bool better =
            g.metric == "ac"
                ? pt.report.ac > cur.report.ac ||
                      (pt.report.ac == cur.report.ac && pt.report.mi > cur.report.mi)
                : pt.report.mi > cur.report.mi ||
                      (pt.report.mi == cur.report.mi && pt.report.ac > cur.report.ac);
        if (better) best = static_cast<std::ptrdiff_t>(i);
    }
    if (best < 0) throw pbc::Error("every grid point failed");
    const Point& winner = points[static_cast<std::size_t>(best)];
    std::printf("best: %s=%g", param.c_str(), winner.value);
    if (gaussian && param != "mu") std::printf(" mu=%g", winner.mu);
    std::printf(" AC(%%)/MI(%%): %.2f/%.2f\n", winner.report.ac, winner.report.mi);
    if (!g.base.report_path.empty())
        pbc::write_report(winner.report, g.base.report_path);
    return 0;
}

int cmd_synth(const std::string& group, std::uint64_t seed,
              const std::string& out) {
    if (group.size() != 2 || group[0] != 'G')
        throw pbc::InvalidArgument("group must be one of G1, G2, G3, G4");
    const pbc::Dataset d =
        pbc::generate_synthetic(pbc::SynthSpec::group(group[1], seed));
    pbc::save_csv(d, out);
    std::printf("wrote %zu samples to %s\n", d.size(), out.c_str());
    return 0;
}

int cmd_kmeans(const RunOptions& o, int restarts) {
    pbc::Dataset raw = pbc::load_csv(o.data_path, !o.no_truth);
    const int k = o.k > 0 ? o.k : raw.truth_k();
    if (k < 2)
        throw pbc::InvalidArgument(
            "cluster count unknown: pass --k or provide truth labels");
    const pbc::Dataset data =
        pbc::scale_features(raw, pbc::scale_method_from_string(o.scale));
    if (!data.truth_labels)
        throw pbc::InvalidArgument("kmeans reporting needs truth labels");
    const pbc::Labels truth{*data.truth_labels, data.truth_k()};

    std::vector<double> acs, mis;
    for (int r = 0; r < restarts; ++r) {
        pbc::KmeansConfig cfg;
        cfg.k = k;
        cfg.seed = o.seed + static_cast<std::uint64_t>(r);
        const pbc::KmeansResult res = pbc::kmeans_run(data, cfg);
        acs.push_back(pbc::accuracy(res.labels, truth));
        mis.push_back(pbc::mutual_information(res.labels, truth));
    }
    auto mean_std = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
        return std::pair<double, double>{mean, std::sqrt(var)};
    };
    const auto [ac_mean, ac_std] = mean_std(acs);
    const auto [mi_mean, mi_std] = mean_std(mis);
    std::printf("AC(%%): %.2f+-%.2f  MI(%%): %.2f+-%.2f (%d restarts)\n", ac_mean,
                ac_std, mi_mean, mi_std, restarts);
    return 0;
}

int cmd_devstats(const std::string& report_path, const std::string& out) {
    const pbc::RunReport rep = pbc::read_report(report_path);
    pbc::write_devstats_csv(rep, out);
    std::printf("wrote %zu cluster rows to %s\n", rep.per_cluster.size(),
                out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"plane-based clustering toolkit"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "cluster one dataset");
    add_run_options(run_cmd, run_opts, true);

    GridOptions grid_opts;
    auto* grid_cmd =
        app.add_subcommand("grid", "sweep a parameter grid, report the best");
    add_run_options(grid_cmd, grid_opts.base, true);
    grid_cmd->add_option("--param", grid_opts.param,
                         "grid parameter: c, gamma or mu");
    grid_cmd->add_option("--values", grid_opts.values,
                         "explicit grid values (default: powers of two)")
        ->delimiter(',');
    grid_cmd->add_option("--mu-values", grid_opts.mu_values,
                         "gaussian width grid (default: 2^-10..2^5)")
        ->delimiter(',');
    grid_cmd->add_option("--metric", grid_opts.metric, "rank by ac or mi");
    grid_cmd->add_option("--jobs", grid_opts.jobs, "worker threads");

    std::string synth_group = "G1", synth_out = "synthetic.csv";
    std::uint64_t synth_seed = 1;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic group");
    synth_cmd->add_option("--group", synth_group, "G1, G2, G3 or G4")->required();
    synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--out", synth_out, "output CSV path")->required();

    RunOptions km_opts;
    int km_restarts = 10;
    auto* km_cmd = app.add_subcommand("kmeans", "kmeans baseline (mean +- std)");
    km_cmd->add_option("--data", km_opts.data_path, "input CSV")->required();
    km_cmd->add_flag("--no-truth", km_opts.no_truth,
                     "the CSV has no trailing label column");
    km_cmd->add_option("--k", km_opts.k, "cluster count");
    km_cmd->add_option("--restarts", km_restarts, "restart count");
    km_cmd->add_option("--seed", km_opts.seed, "base seed");
    km_cmd->add_option("--scale", km_opts.scale, "minmax, zscore or none");

    std::string dev_report, dev_out = "devstats.csv";
    auto* dev_cmd = app.add_subcommand(
        "devstats", "per-cluster deviation statistics from a run report");
    dev_cmd->add_option("--report", dev_report, "run report path")->required();
    dev_cmd->add_option("--out", dev_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_opts);
        if (grid_cmd->parsed()) return cmd_grid(grid_opts);
        if (synth_cmd->parsed()) return cmd_synth(synth_group, synth_seed, synth_out);
        if (km_cmd->parsed()) return cmd_kmeans(km_opts, km_restarts);
        if (dev_cmd->parsed()) return cmd_devstats(dev_report, dev_out);
    } catch (const pbc::NonDecreasingStep& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolver;
    } catch (const pbc::UnboundedObjective& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolver;
    } catch (const pbc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return 0;
}
