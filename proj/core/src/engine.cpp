#include "pbc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "pbc/errors.hpp"
#include "pbc/rng.hpp"

namespace pbc {

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::FixedPoint: return "fixed_point";
        case StopReason::PlanesStationary: return "planes_stationary";
        case StopReason::RepeatedAssignment: return "repeated_assignment";
        case StopReason::ObjectiveStall: return "objective_stall";
        case StopReason::BothConditions: return "both_conditions";
        case StopReason::MaxIterations: return "max_iterations";
    }
    return "?";
}

std::uint64_t labels_hash(const Labels& labels) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(labels.k));
    for (int v : labels.assignment) mix(static_cast<std::uint64_t>(v));
    return h;
}

namespace {

constexpr double kStationaryTol = 1e-9;

struct Dsu {
    std::vector<std::size_t> parent;
    explicit Dsu(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

Labels random_init(const Dataset& data, const EngineConfig& config) {
    const std::size_t m = data.size();
    Rng rng(config.seed);
    Labels labels;
    labels.k = config.k;
    labels.assignment.resize(m);
    while (true) {
        std::vector<bool> used(static_cast<std::size_t>(config.k), false);
        for (std::size_t i = 0; i < m; ++i) {
            const int v = rng.uniform_int(1, config.k);
            labels.assignment[i] = v;
            used[static_cast<std::size_t>(v - 1)] = true;
        }
        if (std::all_of(used.begin(), used.end(), [](bool u) { return u; })) break;
    }
    return labels;
}

Labels nng_init(const Dataset& data, const EngineConfig& config) {
    const std::size_t m = data.size();
    const std::size_t k = static_cast<std::size_t>(config.k);
    const std::size_t p =
        std::min(static_cast<std::size_t>(std::max(config.nng_neighbors, 1)), m - 1);

    Dsu dsu(m);
    std::vector<std::pair<double, std::size_t>> cand(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t nc = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            cand[nc++] = {squared_distance(data.samples.row(i), data.samples.row(j)),
                          j};
        }
        std::partial_sort(cand.begin(),
                          cand.begin() + static_cast<std::ptrdiff_t>(p),
                          cand.begin() + static_cast<std::ptrdiff_t>(nc));
        for (std::size_t t = 0; t < p; ++t) dsu.unite(i, cand[t].second);
    }

    // Connected components as proto-clusters, ordered by smallest member.
    std::vector<std::vector<std::size_t>> comps;
    {
        std::vector<int> comp_of(m, -1);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t r = dsu.find(i);
            if (comp_of[r] < 0) {
                comp_of[r] = static_cast<int>(comps.size());
                comps.emplace_back();
            }
            comps[static_cast<std::size_t>(comp_of[r])].push_back(i);
        }
    }

    auto centroid = [&](const std::vector<std::size_t>& idx) {
        Vec c(data.dim(), 0.0);
        for (std::size_t i : idx) {
            const auto x = data.samples.row(i);
            for (std::size_t d = 0; d < data.dim(); ++d) c[d] += x[d];
        }
        for (double& v : c) v /= static_cast<double>(idx.size());
        return c;
    };

    while (comps.size() > k) {
        std::size_t best_a = 0, best_b = 1;
        double best_d = std::numeric_limits<double>::infinity();
        std::vector<Vec> cents(comps.size());
        for (std::size_t a = 0; a < comps.size(); ++a) cents[a] = centroid(comps[a]);
        for (std::size_t a = 0; a + 1 < comps.size(); ++a)
            for (std::size_t b = a + 1; b < comps.size(); ++b) {
                const double d2 = squared_distance(cents[a], cents[b]);
                if (d2 < best_d) {
                    best_d = d2;
                    best_a = a;
                    best_b = b;
                }
            }
        auto& target = comps[best_a];
        target.insert(target.end(), comps[best_b].begin(), comps[best_b].end());
        std::sort(target.begin(), target.end());
        comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(best_b));
    }

    while (comps.size() < k) {
        // Split the largest component by the sign of the deviation from its
        // own least-squares plane.
        std::size_t big = 0;
        for (std::size_t a = 1; a < comps.size(); ++a)
            if (comps[a].size() > comps[big].size()) big = a;
        const std::vector<std::size_t>& idx = comps[big];
        const Mat rows = data.samples.take_rows(idx);
        const SubproblemResult plane = solve_kpc_plane(rows, SolveConfig{});
        std::vector<double> f(idx.size());
        for (std::size_t t = 0; t < idx.size(); ++t)
            f[t] = dot(rows.row(t), plane.plane.w) + plane.plane.b;
        std::vector<std::size_t> a_side, b_side;
        for (std::size_t t = 0; t < idx.size(); ++t)
            (f[t] >= 0.0 ? a_side : b_side).push_back(idx[t]);
        if (a_side.empty() || b_side.empty()) {
            // All deviations on one side: split at the median instead.
            std::vector<std::size_t> order(idx.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                return f[x] != f[y] ? f[x] < f[y] : x < y;
            });
            a_side.clear();
            b_side.clear();
            for (std::size_t t = 0; t < order.size(); ++t)
                (t < order.size() / 2 ? a_side : b_side).push_back(idx[order[t]]);
            std::sort(a_side.begin(), a_side.end());
            std::sort(b_side.begin(), b_side.end());
        }
        comps[big] = std::move(a_side);
        comps.push_back(std::move(b_side));
    }

    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    Labels labels;
    labels.k = config.k;
    labels.assignment.resize(m);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (std::size_t i : comps[c])
            labels.assignment[i] = static_cast<int>(c) + 1;
    return labels;
}

}  // namespace

Labels initialize(const Dataset& data, const EngineConfig& config) {
    if (config.k < 2) throw InvalidArgument("engine needs k >= 2");
    if (data.size() < static_cast<std::size_t>(config.k))
        throw TooFewSamples("fewer samples than clusters");
    return config.init == InitMethod::Random ? random_init(data, config)
                                             : nng_init(data, config);
}

Labels assign(const Dataset& data, const PlaneSet& planes, const LossSpec& spec,
              AssignmentRule rule, const Labels* current) {
    const std::size_t m = data.size();
    const int k = planes.k();
    Labels out;
    out.k = k;
    out.assignment.resize(m);

    std::vector<ClusterStats> stats;
    if (rule == AssignmentRule::FullLoss && spec.preset == Preset::Rfdpc) {
        Labels base;
        if (current == nullptr) {
            base = assign(data, planes, spec, AssignmentRule::SimplifiedAbsDev);
            current = &base;
        }
        stats = compute_cluster_stats(data, *current, planes, spec.deviation_kind);
        // An empty destination would hold the sample alone.
        for (ClusterStats& st : stats)
            if (st.size == 0) st = {1, 0.0};
    }

    for (std::size_t i = 0; i < m; ++i) {
        const Vec dev = deviation_vector(data.samples.row(i), planes,
                                         spec.deviation_kind);
        int best = 1;
        if (rule == AssignmentRule::SimplifiedAbsDev) {
            double best_v = std::abs(dev[0]);
            for (int j = 2; j <= k; ++j) {
                const double v = std::abs(dev[static_cast<std::size_t>(j - 1)]);
                if (v < best_v) {
                    best_v = v;
                    best = j;
                }
            }
        } else {
            // Flat loss pieces can tie distinct clusters; resolve loss ties
            // by the smaller absolute deviation so the full rule selects the
            // same minimizer the simplified rule does, then by label.
            double best_v = sample_loss(1, dev, spec, stats);
            double best_a = std::abs(dev[0]);
            for (int j = 2; j <= k; ++j) {
                const double v = sample_loss(j, dev, spec, stats);
                const double a = std::abs(dev[static_cast<std::size_t>(j - 1)]);
                if (v < best_v || (v == best_v && a < best_a)) {
                    best_v = v;
                    best_a = a;
                    best = j;
                }
            }
        }
        out.assignment[i] = best;
    }
    return out;
}

namespace {

Plane plane_of(const PlaneSet& planes, std::size_t j) {
    const auto row = planes.weights.row(j);
    return {Vec(row.begin(), row.end()), planes.biases[j]};
}

SubproblemResult solve_cluster(const Mat& members, const Mat& others,
                               const LossSpec& spec, const EngineConfig& config,
                               const Plane* warm) {
    switch (spec.preset) {
        case Preset::Kpc: {
            if (members.rows() == 0) {
                // J^b is identically zero: the subproblem is vacuous.
                Plane keep = warm ? *warm : Plane{Vec(others.cols(), 0.0), 0.0};
                if (!warm) keep.w[0] = 1.0;
                return {keep, 0.0, 0, true};
            }
            return solve_kpc_plane(members, config.solve);
        }
        case Preset::Ppc: {
            if (members.rows() == 0) {
                const Plane pl = detail::ppc_between_only_plane(others);
                SubproblemResult r;
                r.objective = subproblem_objective(members, others, pl.w, pl.b, spec);
                r.plane = pl;
                return r;
            }
            if (others.rows() == 0) return solve_kpc_plane(members, config.solve);
            return solve_ppc_plane(members, others, spec.c_b / spec.c_w,
                                   config.solve);
        }
        default: {
            SolveConfig sc = config.solve;
            if (warm) sc.warm_start = *warm;
            return solve_cccp_plane(members, others, spec, sc);
        }
    }
}

}  // namespace

PlaneSet update_planes(const Dataset& data, const Labels& labels,
                       const LossSpec& spec, const EngineConfig& config,
                       const PlaneSet* warm) {
    const int k = labels.k;
    const std::size_t n = data.dim();
    PlaneSet out;
    out.weights = Mat(static_cast<std::size_t>(k), n);
    out.biases.assign(static_cast<std::size_t>(k), 0.0);

    std::vector<std::size_t> member_idx, other_idx;
    for (int j = 1; j <= k; ++j) {
        member_idx.clear();
        other_idx.clear();
        for (std::size_t i = 0; i < data.size(); ++i)
            (labels.assignment[i] == j ? member_idx : other_idx).push_back(i);
        const Mat members = data.samples.take_rows(member_idx);
        const Mat others = data.samples.take_rows(other_idx);

        Plane warm_plane;
        const Plane* wp = nullptr;
        if (warm) {
            warm_plane = plane_of(*warm, static_cast<std::size_t>(j - 1));
            wp = &warm_plane;
        }
        SubproblemResult res = solve_cluster(members, others, spec, config, wp);
        if (wp) {
            // A local step must never be worse than the previous plane.
            const double warm_obj =
                subproblem_objective(members, others, wp->w, wp->b, spec);
            const double sol_obj = subproblem_objective(
                members, others, res.plane.w, res.plane.b, spec);
            if (warm_obj < sol_obj) res.plane = *wp;
        }
        out.weights.set_row(static_cast<std::size_t>(j - 1), res.plane.w);
        out.biases[static_cast<std::size_t>(j - 1)] = res.plane.b;
    }
    return out;
}

double objective_value(const Dataset& data, const Labels& labels,
                       const PlaneSet& planes, const LossSpec& spec) {
    return total_loss(labels, planes, data, spec) +
           regularizer_value(planes, spec);
}

std::pair<ClusteringState, RunTrace> run(const Dataset& data, const LossSpec& spec,
                                         const EngineConfig& config) {
    data.validate();
    Labels y = initialize(data, config);
    PlaneSet planes = update_planes(data, y, spec, config, nullptr);
    double objective = objective_value(data, y, planes, spec);

    ClusteringState state;
    RunTrace trace;
    auto record = [&](const Labels& l, double g) {
        state.history.push_back({labels_hash(l), g});
        trace.objectives.push_back(g);
    };
    record(y, objective);

    std::unordered_map<std::uint64_t, int> seen{{labels_hash(y), 0}};
    std::deque<std::pair<int, Labels>> recent{{0, y}};  // hash-hit confirmation
    int recorded = 1;
    bool fired_repeat = false;
    bool fired_stall = false;
    StopReason reason = StopReason::MaxIterations;
    bool converged = false;

    for (int t = 0; t < config.max_iter; ++t) {
        const Labels fresh = assign(data, planes, spec, config.assignment_rule, &y);
        if (fresh.assignment == y.assignment) {
            reason = StopReason::FixedPoint;
            converged = true;
            break;
        }
        const double g_assign = objective_value(data, fresh, planes, spec);
        const PlaneSet resolved = update_planes(data, fresh, spec, config, &planes);
        const double g_resolved = objective_value(data, fresh, resolved, spec);

        if (g_assign - g_resolved < kStationaryTol) {
            // Step 2(c): the planes are already stationary for the fresh
            // labels, so the run ends on them.
            y = fresh;
            objective = g_assign;
            record(y, objective);
            reason = StopReason::PlanesStationary;
            converged = true;
            break;
        }

        const std::uint64_t h = labels_hash(fresh);
        bool repeat = false;
        if (const auto hit = seen.find(h); hit != seen.end()) {
            const auto win =
                std::find_if(recent.begin(), recent.end(), [&](const auto& e) {
                    return e.first == hit->second;
                });
            // Confirm against the retained window; older hits trust the hash.
            repeat = win == recent.end() ||
                     win->second.assignment == fresh.assignment;
        }
        fired_repeat = fired_repeat || repeat;
        fired_stall = fired_stall || g_resolved >= objective - kStationaryTol;

        y = fresh;
        planes = resolved;
        objective = g_resolved;
        record(y, objective);
        seen.emplace(h, recorded);
        recent.emplace_back(recorded, y);
        ++recorded;
        if (recent.size() > 3) recent.pop_front();

        bool stop = false;
        switch (config.termination) {
            case TerminationRule::RepeatedAssignment:
                if (fired_repeat) {
                    reason = StopReason::RepeatedAssignment;
                    stop = true;
                }
                break;
            case TerminationRule::NonDecreasingObjective:
                if (fired_stall) {
                    reason = StopReason::ObjectiveStall;
                    stop = true;
                }
                break;
            case TerminationRule::Both:
                if (fired_repeat && fired_stall) {
                    reason = StopReason::BothConditions;
                    stop = true;
                }
                break;
        }
        if (stop) {
            converged = true;
            break;
        }
    }

    state.labels = std::move(y);
    state.planes = std::move(planes);
    state.objective = objective;
    state.iteration = static_cast<int>(trace.objectives.size());
    trace.reason = reason;
    trace.converged = converged;
    return {std::move(state), std::move(trace)};
}

bool verify_weak_local_optimality(const ClusteringState& state, const Dataset& data,
                                  const LossSpec& spec,
                                  const EngineConfig& config) {
    const Labels re =
        assign(data, state.planes, spec, config.assignment_rule, &state.labels);
    if (re.assignment != state.labels.assignment) return false;
    const PlaneSet resolved =
        update_planes(data, state.labels, spec, config, &state.planes);
    const double before = objective_value(data, state.labels, state.planes, spec);
    const double after = objective_value(data, state.labels, resolved, spec);
    return before - after < kStationaryTol;
}

}  // namespace pbc
