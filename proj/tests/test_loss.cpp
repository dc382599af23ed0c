#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pbc/errors.hpp"
#include "pbc/loss.hpp"

using namespace pbc;

namespace {
const LossSpec kRamp = LossSpec::ramptwsvc(1.0, 0.3, -0.2);
const LossSpec kRfdpcUnit = LossSpec::rfdpc(1.0, 1.0, 1.0, 1.0, 0.3, -0.2);
}  // namespace

TEST_CASE("within_loss: J^w(0) = 0 for every preset") {
    for (Preset p : all_presets()) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.5);
        const ClusterStats st{2, 0.0};
        CHECK(within_loss(0.0, spec, &st) == 0.0);
    }
}

TEST_CASE("within_loss: ramp branch values") {
    CHECK(within_loss(1.0, kRamp) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(within_loss(2.5, kRamp) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(within_loss(0.7, kRamp) == 0.0);
}

TEST_CASE("within_loss: absolute value preset") {
    const LossSpec spec = LossSpec::rtwsvc(1.0);
    CHECK(within_loss(-2.0, spec) == 2.0);
}

TEST_CASE("within_loss: rfdpc zero case and stats contract") {
    const ClusterStats st{2, 0.0};
    CHECK(within_loss(0.0, kRfdpcUnit, &st) == 0.0);
    CHECK_THROWS_AS(within_loss(1.0, kRfdpcUnit, nullptr), MissingStats);
    const ClusterStats empty{0, 0.0};
    CHECK_THROWS_AS(within_loss(1.0, kRfdpcUnit, &empty), DegenerateCluster);
    // A single-member cluster drops the variance term and keeps rho/|N|.
    const ClusterStats one{1, 0.0};
    CHECK(within_loss(2.0, kRfdpcUnit, &one) ==
          doctest::Approx(within_loss(2.0, kRamp) + 4.0).epsilon(1e-12));
}

TEST_CASE("within_loss: rfdpc statistics terms") {
    const LossSpec spec = LossSpec::rfdpc(2.0, 1.0, 3.0, 5.0, 0.3, -0.2);
    const ClusterStats st{4, 0.5};
    const double rho = 1.2;
    const double expected = within_loss(rho, kRamp) +
                            (3.0 / 2.0) * (rho / 4.0) * (rho / 4.0) +
                            (5.0 / 2.0) * (rho - 0.5) * (rho - 0.5) / 3.0;
    CHECK(within_loss(rho, spec, &st) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("between_loss: preset values") {
    CHECK(between_loss(12.3, LossSpec::kpc()) == 0.0);
    CHECK(between_loss(-2.0, LossSpec::ppc(0.5)) == -4.0);
    CHECK(between_loss(0.4, LossSpec::twsvc(1.0)) ==
          doctest::Approx(0.6).epsilon(1e-12));
    CHECK(between_loss(3.0, LossSpec::twsvc(1.0)) == 0.0);
    CHECK(between_loss(0.0, kRamp) == doctest::Approx(2.6).epsilon(1e-12));
    CHECK(between_loss(0.5, kRamp) == doctest::Approx(2.3).epsilon(1e-12));
    CHECK(between_loss(2.0, kRamp) == doctest::Approx(1.5).epsilon(1e-12));
    // rfdpc reuses the ramp between-loss.
    CHECK(between_loss(0.5, kRfdpcUnit) == between_loss(0.5, kRamp));
}

TEST_CASE("loss symmetry over random deviations") {
    Rng rng(3);
    const ClusterStats st{3, 0.0};
    for (Preset p : all_presets()) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.7);
        for (int rep = 0; rep < 10000 / 7 + 1; ++rep) {
            const double rho = 10.0 * (rng.uniform01() - 0.5);
            const ClusterStats* s = p == Preset::Rfdpc ? &st : nullptr;
            CHECK(within_loss(rho, spec, s) == within_loss(-rho, spec, s));
            CHECK(between_loss(rho, spec) == between_loss(-rho, spec));
        }
    }
}

TEST_CASE("ramp continuity at the branch boundaries") {
    for (const double delta : {0.0, 0.3, 1.0}) {
        for (const double s : {-0.9, -0.2, 0.0}) {
            const LossSpec spec = LossSpec::ramptwsvc(1.0, delta, s);
            const double eps = 1e-13;
            for (const double bp : {1.0 - delta, 2.0 - delta - s}) {
                const double lo = within_loss(bp - eps, spec);
                const double hi = within_loss(bp + eps, spec);
                CHECK(std::abs(hi - lo) < 1e-12);
            }
            for (const double bp : {-s, 1.0 + delta}) {
                const double lo = between_loss(bp - eps, spec);
                const double hi = between_loss(bp + eps, spec);
                CHECK(std::abs(hi - lo) < 1e-12);
            }
        }
    }
}

TEST_CASE("monotonicity of the property-satisfying presets") {
    Rng rng(5);
    for (Preset p : {Preset::Kpc, Preset::Ppc, Preset::Twsvc, Preset::Rtwsvc,
                     Preset::RampTwsvc}) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.7);
        for (int rep = 0; rep < 2000; ++rep) {
            double r1 = 8.0 * (rng.uniform01() - 0.5);
            double r2 = 8.0 * (rng.uniform01() - 0.5);
            if (std::abs(r1) > std::abs(r2)) std::swap(r1, r2);
            CHECK(within_loss(r1, spec) <= within_loss(r2, spec) + 1e-12);
            CHECK(between_loss(r1, spec) >= between_loss(r2, spec) - 1e-12);
        }
    }
}

TEST_CASE("rfdpc within comparison with zero-mean fixed stats") {
    Rng rng(6);
    const ClusterStats st{5, 0.0};
    for (int rep = 0; rep < 2000; ++rep) {
        double r1 = 8.0 * (rng.uniform01() - 0.5);
        double r2 = 8.0 * (rng.uniform01() - 0.5);
        if (std::abs(r1) > std::abs(r2)) std::swap(r1, r2);
        CHECK(within_loss(r1, kRfdpcUnit, &st) <=
              within_loss(r2, kRfdpcUnit, &st) + 1e-12);
    }
}

TEST_CASE("sample_loss: single cluster has no between terms") {
    const LossSpec spec = LossSpec::twsvc(2.0);
    const Vec dev{0.3};
    CHECK(sample_loss(1, dev, spec) == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("sample_loss: kpc and twsvc examples") {
    const Vec dev2{0.5, 123.0};
    CHECK(sample_loss(1, dev2, LossSpec::kpc()) ==
          doctest::Approx(0.25).epsilon(1e-12));
    const Vec dev3{0.1, 0.4, 2.0};
    CHECK(sample_loss(1, dev3, LossSpec::twsvc(1.0)) ==
          doctest::Approx(0.61).epsilon(1e-12));
}

TEST_CASE("total_loss: single sample equals its sample loss") {
    Dataset d;
    d.samples = Mat(1, 2);
    d.samples(0, 0) = 1.0;
    d.samples(0, 1) = 2.0;
    Rng rng(9);
    const PlaneSet planes = oracles::random_planes(rng, 3, 2);
    const LossSpec spec = LossSpec::twsvc(0.5);
    const Labels l{{2}, 3};
    const Vec dev = deviation_vector(d.samples.row(0), planes, spec.deviation_kind);
    CHECK(total_loss(l, planes, d, spec) ==
          doctest::Approx(sample_loss(2, dev, spec)).epsilon(1e-12));
}

TEST_CASE("total_loss: perfect kpc fit is zero") {
    Dataset d;
    d.samples = Mat(3, 2);
    d.samples(0, 0) = 0.0;
    d.samples(1, 0) = 1.0;
    d.samples(2, 0) = 2.0;  // all on the line y = 0
    PlaneSet planes;
    planes.weights = Mat(2, 2);
    planes.weights(0, 1) = 1.0;  // plane y = 0
    planes.weights(1, 0) = 1.0;  // plane x = 0
    planes.biases = {0.0, 0.0};
    const Labels l{{1, 1, 1}, 2};
    CHECK(total_loss(l, planes, d, LossSpec::kpc()) == 0.0);
}

TEST_CASE("total_loss: brute-force sum oracle") {
    Rng rng(13);
    for (Preset p : all_presets()) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.3);
        const Dataset d = oracles::random_dataset(rng, 17, 3);
        const Labels l = oracles::random_labels(rng, 17, 3);
        const PlaneSet planes = oracles::random_planes(rng, 3, 3);
        const auto stats = compute_cluster_stats(d, l, planes, spec.deviation_kind);
        double expected = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const Vec dev =
                deviation_vector(d.samples.row(i), planes, spec.deviation_kind);
            const int label = l.assignment[i];
            const std::size_t li = static_cast<std::size_t>(label - 1);
            const ClusterStats* own = p == Preset::Rfdpc ? &stats[li] : nullptr;
            expected += spec.c_w * within_loss(dev[li], spec, own);
            for (std::size_t j = 0; j < dev.size(); ++j)
                if (j != li) expected += spec.c_b * between_loss(dev[j], spec);
        }
        CHECK(total_loss(l, planes, d, spec) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("satisfies_properties per preset") {
    auto check = [](Preset p, bool sym, bool w, bool b) {
        const PropertyReport rep =
            satisfies_properties(LossSpec::by_name(to_string(p), 0.5));
        CHECK(rep.symmetric == sym);
        CHECK(rep.within_nondecreasing == w);
        CHECK(rep.between_nonincreasing == b);
    };
    check(Preset::Kpc, true, true, true);
    check(Preset::Ppc, true, true, true);
    check(Preset::Twsvc, true, true, true);
    check(Preset::Rtwsvc, true, true, true);
    check(Preset::Frtwsvc, true, true, false);  // |1-|rho|| rises past 1
    check(Preset::RampTwsvc, true, true, true);
    check(Preset::Rfdpc, true, true, true);
}

TEST_CASE("dc splits reproduce the losses") {
    Rng rng(21);
    for (Preset p : {Preset::Twsvc, Preset::Rtwsvc, Preset::Frtwsvc,
                     Preset::RampTwsvc, Preset::Rfdpc}) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.7);
        const DcSplit w_split = dc_within(spec);
        const DcSplit b_split = dc_between(spec);
        for (int rep = 0; rep < 3000; ++rep) {
            const double rho = 8.0 * (rng.uniform01() - 0.5);
            // The rfdpc statistics terms live outside the split.
            const double base_w = p == Preset::Rfdpc
                                      ? within_loss(rho, LossSpec::ramptwsvc(
                                                             1.0, spec.delta, spec.s))
                                      : within_loss(rho, spec);
            CHECK(w_split.value(rho) == doctest::Approx(base_w).epsilon(1e-12));
            CHECK(b_split.value(rho) ==
                  doctest::Approx(between_loss(rho, spec)).epsilon(1e-12));
        }
    }
}

TEST_CASE("dc component derivatives match finite differences off kinks") {
    Rng rng(22);
    const double h = 1e-6;
    const double margin = 1e-3;
    for (Preset p : {Preset::Twsvc, Preset::Rtwsvc, Preset::Frtwsvc,
                     Preset::RampTwsvc, Preset::Rfdpc}) {
        const LossSpec spec = LossSpec::by_name(to_string(p), 0.7);
        for (const DcSplit& split : {dc_within(spec), dc_between(spec)}) {
            const std::vector<double> kinks = split.breakpoints();
            int done = 0;
            while (done < 200) {
                const double rho = 6.0 * (rng.uniform01() - 0.5);
                bool near = false;
                for (double kk : kinks)
                    if (std::abs(rho - kk) < margin) near = true;
                if (near) continue;
                ++done;
                const double fd_u =
                    (split.convex_value(rho + h) - split.convex_value(rho - h)) /
                    (2.0 * h);
                const double fd_v =
                    (split.concave_value(rho + h) - split.concave_value(rho - h)) /
                    (2.0 * h);
                CHECK(split.convex_deriv(rho) ==
                      doctest::Approx(fd_u).epsilon(1e-4));
                CHECK(split.concave_deriv(rho) ==
                      doctest::Approx(fd_v).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("spec validation rejects bad parameters") {
    CHECK_THROWS_AS(LossSpec::twsvc(0.0), InvalidArgument);
    CHECK_THROWS_AS(LossSpec::ramptwsvc(1.0, 1.5, -0.2), InvalidArgument);
    CHECK_THROWS_AS(LossSpec::ramptwsvc(1.0, 0.3, 0.5), InvalidArgument);
    CHECK_THROWS_AS(LossSpec::rfdpc(1.0, 1.0, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(preset_from_string("nope"), InvalidArgument);
}
