#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pbc/engine.hpp"
#include "pbc/errors.hpp"

using namespace pbc;

namespace {

Dataset two_blobs(std::size_t per_blob, double separation, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    d.samples = Mat(2 * per_blob, 2);
    d.truth_labels = std::vector<int>(2 * per_blob);
    for (std::size_t i = 0; i < per_blob; ++i) {
        d.samples(i, 0) = rng.gaussian();
        d.samples(i, 1) = rng.gaussian();
        (*d.truth_labels)[i] = 1;
        d.samples(per_blob + i, 0) = separation + rng.gaussian();
        d.samples(per_blob + i, 1) = rng.gaussian();
        (*d.truth_labels)[per_blob + i] = 2;
    }
    d.name = "blobs";
    return d;
}

Dataset collinear_triple() {
    // Three groups on the lines y = 0, y = 5, y = 10.
    Dataset d;
    d.samples = Mat(9, 2);
    for (int g = 0; g < 3; ++g)
        for (int i = 0; i < 3; ++i) {
            d.samples(static_cast<std::size_t>(3 * g + i), 0) = i;
            d.samples(static_cast<std::size_t>(3 * g + i), 1) = 5.0 * g;
        }
    d.name = "collinear";
    return d;
}

}  // namespace

TEST_CASE("initialize: random is deterministic and covers all clusters") {
    Rng rng(101);
    const Dataset d = oracles::random_dataset(rng, 30, 3);
    EngineConfig cfg;
    cfg.k = 4;
    cfg.init = InitMethod::Random;
    cfg.seed = 7;
    const Labels a = initialize(d, cfg);
    const Labels b = initialize(d, cfg);
    CHECK(a.assignment == b.assignment);
    const auto sizes = a.cluster_sizes();
    for (std::size_t s : sizes) CHECK(s > 0);
}

TEST_CASE("initialize: too few samples") {
    Rng rng(102);
    const Dataset d = oracles::random_dataset(rng, 3, 2);
    EngineConfig cfg;
    cfg.k = 4;
    CHECK_THROWS_AS(initialize(d, cfg), TooFewSamples);
}

TEST_CASE("initialize: nng separates well-separated blobs") {
    const Dataset d = two_blobs(30, 12.0, 5);
    EngineConfig cfg;
    cfg.k = 2;
    cfg.init = InitMethod::Nng;
    cfg.nng_neighbors = 5;
    const Labels l = initialize(d, cfg);
    // Labels must coincide with blob membership (up to swapping).
    bool direct = true, swapped = true;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (l.assignment[i] != (*d.truth_labels)[i]) direct = false;
        if (l.assignment[i] != 3 - (*d.truth_labels)[i]) swapped = false;
    }
    CHECK((direct || swapped));
}

TEST_CASE("initialize: m == k gives singletons after resolution") {
    Rng rng(103);
    const Dataset d = oracles::random_dataset(rng, 4, 2);
    EngineConfig cfg;
    cfg.k = 4;
    cfg.init = InitMethod::Nng;
    const Labels l = initialize(d, cfg);
    const auto sizes = l.cluster_sizes();
    for (std::size_t s : sizes) CHECK(s == 1);
}

TEST_CASE("assign: sample on one plane takes that label under both rules") {
    PlaneSet planes;
    planes.weights = Mat(2, 2);
    planes.weights(0, 0) = 1.0;  // plane x = 0
    planes.weights(1, 1) = 1.0;  // plane y = 0
    planes.biases = {0.0, -2.0};
    Dataset d;
    d.samples = Mat(1, 2);
    d.samples(0, 0) = 3.0;
    d.samples(0, 1) = 2.0;  // on plane 2 only
    for (const AssignmentRule rule :
         {AssignmentRule::SimplifiedAbsDev, AssignmentRule::FullLoss}) {
        const Labels l = assign(d, planes, LossSpec::twsvc(0.5), rule);
        CHECK(l.assignment[0] == 2);
    }
}

TEST_CASE("assign: exact ties take the smallest label") {
    PlaneSet planes;
    planes.weights = Mat(2, 1);
    planes.weights(0, 0) = 1.0;
    planes.weights(1, 0) = 1.0;
    planes.biases = {-0.5, 0.5};  // deviations +0.5 and -0.5 at x = 1
    Dataset d;
    d.samples = Mat(1, 1);
    d.samples(0, 0) = 1.0;
    for (Preset p : all_presets()) {
        if (p == Preset::Kpc || p == Preset::Ppc) continue;  // affine presets
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.5);
        for (const AssignmentRule rule :
             {AssignmentRule::SimplifiedAbsDev, AssignmentRule::FullLoss}) {
            const Labels l = assign(d, planes, spec, rule);
            CHECK(l.assignment[0] == 1);
        }
    }
}

TEST_CASE("assign: full loss equals absolute deviation for the covered presets") {
    Rng rng(107);
    for (Preset p : {Preset::Kpc, Preset::Ppc, Preset::Twsvc, Preset::Rtwsvc,
                     Preset::RampTwsvc}) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.5);
        for (int rep = 0; rep < 20; ++rep) {
            const Dataset d = oracles::random_dataset(rng, 5, 3);
            const PlaneSet planes =
                oracles::random_planes(rng, 2 + rep % 3, 3);
            const Labels full =
                assign(d, planes, spec, AssignmentRule::FullLoss);
            const Labels simple =
                assign(d, planes, spec, AssignmentRule::SimplifiedAbsDev);
            CHECK(full.assignment == simple.assignment);
        }
    }
}

TEST_CASE("assign: idempotent for fixed planes") {
    Rng rng(109);
    const Dataset d = oracles::random_dataset(rng, 40, 3);
    const PlaneSet planes = oracles::random_planes(rng, 3, 3);
    const LossSpec spec = LossSpec::rtwsvc(0.5);
    const Labels a = assign(d, planes, spec, AssignmentRule::SimplifiedAbsDev);
    const Labels b = assign(d, planes, spec, AssignmentRule::SimplifiedAbsDev);
    CHECK(a.assignment == b.assignment);
}

TEST_CASE("update_planes: collinear clusters fit exactly under kpc") {
    const Dataset d = collinear_triple();
    Labels l{{1, 1, 1, 2, 2, 2, 3, 3, 3}, 3};
    EngineConfig cfg;
    cfg.k = 3;
    const PlaneSet planes = update_planes(d, l, LossSpec::kpc(), cfg);
    CHECK(objective_value(d, l, planes, LossSpec::kpc()) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("update_planes: solved planes are a fixed point of re-solving") {
    Rng rng(113);
    const Dataset d = oracles::random_dataset(rng, 25, 3);
    const Labels l = oracles::random_labels(rng, 25, 3);
    EngineConfig cfg;
    cfg.k = 3;
    for (Preset p : {Preset::Kpc, Preset::Twsvc, Preset::Rfdpc}) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.5);
        const PlaneSet planes = update_planes(d, l, spec, cfg);
        const PlaneSet again = update_planes(d, l, spec, cfg, &planes);
        const double before = objective_value(d, l, planes, spec);
        const double after = objective_value(d, l, again, spec);
        CHECK(after <= before + 1e-12);
        CHECK(before - after < 1e-9);
    }
}

TEST_CASE("update_planes: warm start never loses") {
    Rng rng(127);
    const Dataset d = oracles::random_dataset(rng, 30, 3);
    EngineConfig cfg;
    cfg.k = 3;
    for (Preset p : all_presets()) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.5);
        const Labels l = oracles::random_labels(rng, 30, 3);
        const PlaneSet warm = oracles::random_planes(rng, 3, 3);
        const PlaneSet next = update_planes(d, l, spec, cfg, &warm);
        CHECK(objective_value(d, l, next, spec) <=
              objective_value(d, l, warm, spec) + 1e-9);
    }
}

TEST_CASE("objective equals the sum of subproblem objectives") {
    Rng rng(131);
    const Dataset d = oracles::random_dataset(rng, 20, 3);
    const Labels l = oracles::random_labels(rng, 20, 3);
    const PlaneSet planes = oracles::random_planes(rng, 3, 3);
    for (Preset p : all_presets()) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.5);
        double sum = 0.0;
        for (int j = 1; j <= 3; ++j) {
            const auto mi = l.members_of(j);
            std::vector<std::size_t> oi;
            for (std::size_t i = 0; i < d.size(); ++i)
                if (l.assignment[i] != j) oi.push_back(i);
            sum += subproblem_objective(
                d.samples.take_rows(mi), d.samples.take_rows(oi),
                planes.weights.row(static_cast<std::size_t>(j - 1)),
                planes.biases[static_cast<std::size_t>(j - 1)], spec);
        }
        CHECK(objective_value(d, l, planes, spec) ==
              doctest::Approx(sum).epsilon(1e-9));
    }
}

TEST_CASE("run: separable instance terminates quickly at the truth") {
    const Dataset d = collinear_triple();
    EngineConfig cfg;
    cfg.k = 3;
    cfg.init = InitMethod::Nng;
    const auto [state, trace] = run(d, LossSpec::kpc(), cfg);
    CHECK(trace.converged);
    CHECK(state.objective == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(state.iteration <= 3);
}

TEST_CASE("run: objective trace is non-increasing for every preset") {
    Rng rng(137);
    for (Preset p : all_presets()) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.1);
        for (int rep = 0; rep < 4; ++rep) {
            const Dataset d = oracles::random_dataset(rng, 30, 3);
            EngineConfig cfg;
            cfg.k = 3;
            cfg.init = InitMethod::Random;
            cfg.seed = static_cast<std::uint64_t>(rep + 1);
            const auto [state, trace] = run(d, spec, cfg);
            CHECK(trace.converged);
            for (std::size_t t = 1; t < trace.objectives.size(); ++t)
                CHECK(trace.objectives[t] <= trace.objectives[t - 1] + 1e-9);
        }
    }
}

TEST_CASE("run: history hashes match the label stream") {
    Rng rng(139);
    const Dataset d = oracles::random_dataset(rng, 25, 2);
    EngineConfig cfg;
    cfg.k = 2;
    cfg.init = InitMethod::Random;
    cfg.seed = 3;
    const auto [state, trace] = run(d, LossSpec::twsvc(0.1), cfg);
    CHECK(state.history.size() == trace.objectives.size());
    CHECK(state.history.back().labels_hash == labels_hash(state.labels));
    CHECK(state.history.back().objective == state.objective);
}

TEST_CASE("verify_weak_local_optimality: accepts runs, rejects perturbations") {
    Rng rng(149);
    for (Preset p : all_presets()) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.1);
        const Dataset d = oracles::random_dataset(rng, 24, 3);
        EngineConfig cfg;
        cfg.k = 3;
        cfg.init = InitMethod::Random;
        cfg.seed = 17;
        auto [state, trace] = run(d, spec, cfg);
        REQUIRE(trace.converged);
        CHECK(verify_weak_local_optimality(state, d, spec, cfg));

        // Flip one sample off its argmin.
        ClusteringState bad = state;
        const Vec dev = deviation_vector(d.samples.row(0), state.planes,
                                         spec.deviation_kind);
        int worst = 1;
        double worst_v = std::abs(dev[0]);
        for (int j = 2; j <= 3; ++j) {
            const double v = std::abs(dev[static_cast<std::size_t>(j - 1)]);
            if (v > worst_v) {
                worst_v = v;
                worst = j;
            }
        }
        if (worst != bad.labels.assignment[0]) {
            bad.labels.assignment[0] = worst;
            CHECK_FALSE(verify_weak_local_optimality(bad, d, spec, cfg));
        }
    }
}

TEST_CASE("verify_weak_local_optimality: perturbed planes fail") {
    Rng rng(151);
    const Dataset d = oracles::random_dataset(rng, 30, 3);
    const LossSpec spec = LossSpec::twsvc(0.1);
    EngineConfig cfg;
    cfg.k = 2;
    cfg.init = InitMethod::Random;
    cfg.seed = 23;
    auto [state, trace] = run(d, spec, cfg);
    REQUIRE(trace.converged);
    ClusteringState bad = state;
    bad.planes.weights(0, 0) += 0.1;
    bad.planes.biases[0] -= 0.05;
    CHECK_FALSE(verify_weak_local_optimality(bad, d, spec, cfg));
}

TEST_CASE("labels_hash is order sensitive") {
    const Labels a{{1, 2, 1}, 2};
    const Labels b{{2, 1, 1}, 2};
    CHECK(labels_hash(a) != labels_hash(b));
}
