#include "pbc/loss.hpp"

#include <algorithm>
#include <cmath>

#include "pbc/errors.hpp"

namespace pbc {

Preset preset_from_string(const std::string& name) {
    if (name == "kpc") return Preset::Kpc;
    if (name == "ppc") return Preset::Ppc;
    if (name == "twsvc") return Preset::Twsvc;
    if (name == "rtwsvc") return Preset::Rtwsvc;
    if (name == "frtwsvc") return Preset::Frtwsvc;
    if (name == "ramptwsvc") return Preset::RampTwsvc;
    if (name == "rfdpc") return Preset::Rfdpc;
    throw InvalidArgument(
        "unknown preset '" + name +
        "'; valid: kpc, ppc, twsvc, rtwsvc, frtwsvc, ramptwsvc, rfdpc");
}

std::string to_string(Preset preset) {
    switch (preset) {
        case Preset::Kpc: return "kpc";
        case Preset::Ppc: return "ppc";
        case Preset::Twsvc: return "twsvc";
        case Preset::Rtwsvc: return "rtwsvc";
        case Preset::Frtwsvc: return "frtwsvc";
        case Preset::RampTwsvc: return "ramptwsvc";
        case Preset::Rfdpc: return "rfdpc";
    }
    return "?";
}

std::vector<Preset> all_presets() {
    return {Preset::Kpc,     Preset::Ppc,       Preset::Twsvc, Preset::Rtwsvc,
            Preset::Frtwsvc, Preset::RampTwsvc, Preset::Rfdpc};
}

namespace {

LossSpec affine_preset(Preset p, double c) {
    LossSpec spec;
    spec.preset = p;
    spec.c_w = 1.0;
    spec.c_b = c;
    spec.deviation_kind = DeviationKind::Affine;
    spec.regularizer = Regularizer::None;
    return spec;
}

}  // namespace

LossSpec LossSpec::kpc() {
    LossSpec spec;
    spec.preset = Preset::Kpc;
    spec.c_w = 1.0;
    spec.c_b = 1.0;
    spec.deviation_kind = DeviationKind::SignedDistance;
    spec.regularizer = Regularizer::UnitNormConstraint;
    spec.validate();
    return spec;
}

LossSpec LossSpec::ppc(double c) {
    LossSpec spec;
    spec.preset = Preset::Ppc;
    spec.c_w = 1.0;
    spec.c_b = c;
    spec.deviation_kind = DeviationKind::SignedDistance;
    spec.regularizer = Regularizer::UnitNormConstraint;
    spec.validate();
    return spec;
}

LossSpec LossSpec::twsvc(double c) {
    LossSpec spec = affine_preset(Preset::Twsvc, c);
    spec.validate();
    return spec;
}

LossSpec LossSpec::rtwsvc(double c) {
    LossSpec spec = affine_preset(Preset::Rtwsvc, c);
    spec.validate();
    return spec;
}

LossSpec LossSpec::frtwsvc(double c) {
    LossSpec spec = affine_preset(Preset::Frtwsvc, c);
    spec.validate();
    return spec;
}

LossSpec LossSpec::ramptwsvc(double c, double delta, double s) {
    LossSpec spec = affine_preset(Preset::RampTwsvc, c);
    spec.delta = delta;
    spec.s = s;
    spec.validate();
    return spec;
}

LossSpec LossSpec::rfdpc(double c_w, double c_b, double gamma1, double gamma2,
                         double delta, double s) {
    LossSpec spec;
    spec.preset = Preset::Rfdpc;
    spec.c_w = c_w;
    spec.c_b = c_b;
    spec.gamma1 = gamma1;
    spec.gamma2 = gamma2;
    spec.delta = delta;
    spec.s = s;
    spec.deviation_kind = DeviationKind::Affine;
    spec.regularizer = Regularizer::Tikhonov;
    spec.validate();
    return spec;
}

LossSpec LossSpec::by_name(const std::string& name, double c) {
    switch (preset_from_string(name)) {
        case Preset::Kpc: return kpc();
        case Preset::Ppc: return ppc(c);
        case Preset::Twsvc: return twsvc(c);
        case Preset::Rtwsvc: return rtwsvc(c);
        case Preset::Frtwsvc: return frtwsvc(c);
        case Preset::RampTwsvc: return ramptwsvc(c);
        case Preset::Rfdpc: return rfdpc(c, c, c, c);
    }
    throw InvalidArgument("unreachable preset");
}

void LossSpec::validate() const {
    if (!(c_w > 0.0) || !(c_b > 0.0))
        throw InvalidArgument("c_w and c_b must be positive");
    if (is_ramp()) {
        if (delta < 0.0 || delta > 1.0)
            throw InvalidArgument("delta must lie in [0, 1]");
        if (s <= -1.0 || s > 0.0) throw InvalidArgument("s must lie in (-1, 0]");
    }
    if (preset == Preset::Rfdpc && (!(gamma1 > 0.0) || !(gamma2 > 0.0)))
        throw InvalidArgument("gamma1 and gamma2 must be positive for rfdpc");
    const bool wants_signed =
        preset == Preset::Kpc || preset == Preset::Ppc;
    if (wants_signed && deviation_kind != DeviationKind::SignedDistance)
        throw InvalidArgument("kpc/ppc require the signed-distance deviation");
    if (!wants_signed && deviation_kind != DeviationKind::Affine)
        throw InvalidArgument("this preset requires the affine deviation");
}

namespace {

double ramp_within(double rho, double delta, double s) {
    const double a = std::abs(rho);
    if (a <= 1.0 - delta) return 0.0;
    if (a < 2.0 - delta - s) return a - 1.0 + delta;
    return 1.0 - s;
}

double ramp_between(double rho, double delta, double s) {
    const double a = std::abs(rho);
    if (a <= -s) return 2.0 + 2.0 * delta;
    if (a < 1.0 + delta) return -a + 2.0 + 2.0 * delta - s;
    return 1.0 + delta - s;
}

double hinge(double u) { return u > 0.0 ? u : 0.0; }

}  // namespace

double within_loss(double rho, const LossSpec& spec, const ClusterStats* stats) {
    switch (spec.preset) {
        case Preset::Kpc:
        case Preset::Ppc:
        case Preset::Twsvc:
            return rho * rho;
        case Preset::Rtwsvc:
        case Preset::Frtwsvc:
            return std::abs(rho);
        case Preset::RampTwsvc:
            return ramp_within(rho, spec.delta, spec.s);
        case Preset::Rfdpc: {
            if (stats == nullptr) throw MissingStats();
            if (stats->size < 1)
                throw DegenerateCluster("rfdpc statistics need a non-empty cluster");
            const double n = static_cast<double>(stats->size);
            const double mean_part = rho / n;
            // A single-member cluster has no variance term.
            const double var_part =
                stats->size >= 2
                    ? (rho - stats->mean_dev) * (rho - stats->mean_dev) / (n - 1.0)
                    : 0.0;
            return ramp_within(rho, spec.delta, spec.s) +
                   (spec.gamma1 / spec.c_w) * mean_part * mean_part +
                   (spec.gamma2 / spec.c_w) * var_part;
        }
    }
    throw InvalidArgument("unreachable preset");
}

double between_loss(double rho, const LossSpec& spec) {
    switch (spec.preset) {
        case Preset::Kpc:
            return 0.0;
        case Preset::Ppc:
            return -rho * rho;
        case Preset::Twsvc:
        case Preset::Rtwsvc:
            return hinge(1.0 - std::abs(rho));
        case Preset::Frtwsvc:
            return std::abs(1.0 - std::abs(rho));
        case Preset::RampTwsvc:
        case Preset::Rfdpc:
            return ramp_between(rho, spec.delta, spec.s);
    }
    throw InvalidArgument("unreachable preset");
}

double sample_loss(int label, std::span<const double> dev, const LossSpec& spec,
                   std::span<const ClusterStats> stats) {
    const std::size_t li = static_cast<std::size_t>(label - 1);
    const ClusterStats* own =
        spec.preset == Preset::Rfdpc
            ? (stats.empty() ? throw MissingStats() : &stats[li])
            : nullptr;
    double loss = spec.c_w * within_loss(dev[li], spec, own);
    for (std::size_t j = 0; j < dev.size(); ++j) {
        if (j == li) continue;
        loss += spec.c_b * between_loss(dev[j], spec);
    }
    return loss;
}

std::vector<ClusterStats> compute_cluster_stats(const Dataset& data,
                                                const Labels& labels,
                                                const PlaneSet& planes,
                                                DeviationKind kind) {
    std::vector<ClusterStats> stats(static_cast<std::size_t>(labels.k));
    std::vector<double> sums(static_cast<std::size_t>(labels.k), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t j = static_cast<std::size_t>(labels.assignment[i] - 1);
        const double f = deviation(data.samples.row(i), planes.weights.row(j),
                                   planes.biases[j], kind);
        ++stats[j].size;
        sums[j] += f;
    }
    for (std::size_t j = 0; j < stats.size(); ++j)
        if (stats[j].size > 0)
            stats[j].mean_dev = sums[j] / static_cast<double>(stats[j].size);
    return stats;
}

double total_loss(const Labels& labels, const PlaneSet& planes,
                  const Dataset& data, const LossSpec& spec) {
    std::vector<ClusterStats> stats;
    if (spec.preset == Preset::Rfdpc)
        stats = compute_cluster_stats(data, labels, planes, spec.deviation_kind);
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vec dev = deviation_vector(data.samples.row(i), planes,
                                         spec.deviation_kind);
        total += sample_loss(labels.assignment[i], dev, spec, stats);
    }
    return total;
}

double regularizer_value(const PlaneSet& planes, const LossSpec& spec) {
    if (spec.regularizer != Regularizer::Tikhonov) return 0.0;
    double reg = 0.0;
    for (int j = 0; j < planes.k(); ++j) {
        const auto w = planes.weights.row(static_cast<std::size_t>(j));
        const double b = planes.biases[static_cast<std::size_t>(j)];
        reg += 0.5 * (dot(w, w) + b * b);
    }
    return reg;
}

PropertyReport satisfies_properties(const LossSpec& spec) {
    constexpr double kStep = 1e-3;
    constexpr double kMax = 10.0;
    constexpr double kSlack = 1e-12;
    // Fixed statistics context so the rfdpc within-loss is a plain function
    // of rho during the scan.
    const ClusterStats ctx{2, 0.0};
    const ClusterStats* stats = spec.preset == Preset::Rfdpc ? &ctx : nullptr;

    PropertyReport rep;
    rep.symmetric = true;
    rep.within_nondecreasing = true;
    rep.between_nonincreasing = true;
    double prev_w = within_loss(0.0, spec, stats);
    double prev_b = between_loss(0.0, spec);
    for (double rho = kStep; rho <= kMax + kStep / 2; rho += kStep) {
        const double w = within_loss(rho, spec, stats);
        const double b = between_loss(rho, spec);
        if (w != within_loss(-rho, spec, stats) || b != between_loss(-rho, spec))
            rep.symmetric = false;
        if (w < prev_w - kSlack) rep.within_nondecreasing = false;
        if (b > prev_b + kSlack) rep.between_nonincreasing = false;
        prev_w = w;
        prev_b = b;
    }
    return rep;
}

// ---- difference-of-convex machinery ----

double PwPiece::value(double rho) const {
    switch (kind) {
        case Kind::Quadratic: return coeff * rho * rho;
        case Kind::Abs: return coeff * std::abs(rho);
        case Kind::Hinge: return coeff * hinge(std::abs(rho) - theta);
        case Kind::Constant: return coeff;
    }
    return 0.0;
}

double PwPiece::deriv(double rho) const {
    const double sgn = rho > 0.0 ? 1.0 : (rho < 0.0 ? -1.0 : 0.0);
    switch (kind) {
        case Kind::Quadratic: return 2.0 * coeff * rho;
        case Kind::Abs: return coeff * sgn;
        case Kind::Hinge: return std::abs(rho) > theta ? coeff * sgn : 0.0;
        case Kind::Constant: return 0.0;
    }
    return 0.0;
}

namespace {
double sum_values(const std::vector<PwPiece>& ps, double rho) {
    double v = 0.0;
    for (const auto& p : ps) v += p.value(rho);
    return v;
}
double sum_derivs(const std::vector<PwPiece>& ps, double rho) {
    double v = 0.0;
    for (const auto& p : ps) v += p.deriv(rho);
    return v;
}
}  // namespace

double DcSplit::convex_value(double rho) const { return sum_values(convex, rho); }
double DcSplit::concave_value(double rho) const { return sum_values(concave, rho); }
double DcSplit::value(double rho) const {
    return convex_value(rho) - concave_value(rho);
}
double DcSplit::convex_deriv(double rho) const { return sum_derivs(convex, rho); }
double DcSplit::concave_deriv(double rho) const { return sum_derivs(concave, rho); }

std::vector<double> DcSplit::breakpoints() const {
    std::vector<double> bp;
    auto collect = [&bp](const std::vector<PwPiece>& ps) {
        for (const auto& p : ps) {
            if (p.kind == PwPiece::Kind::Abs) bp.push_back(0.0);
            if (p.kind == PwPiece::Kind::Hinge) {
                bp.push_back(p.theta);
                bp.push_back(-p.theta);
            }
        }
    };
    collect(convex);
    collect(concave);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

DcSplit dc_within(const LossSpec& spec) {
    using K = PwPiece::Kind;
    DcSplit dc;
    switch (spec.preset) {
        case Preset::Kpc:
        case Preset::Ppc:
        case Preset::Twsvc:
            dc.convex = {{K::Quadratic, 1.0, 0.0}};
            break;
        case Preset::Rtwsvc:
        case Preset::Frtwsvc:
            dc.convex = {{K::Abs, 1.0, 0.0}};
            break;
        case Preset::RampTwsvc:
        case Preset::Rfdpc:
            dc.convex = {{K::Hinge, 1.0, 1.0 - spec.delta}};
            dc.concave = {{K::Hinge, 1.0, 2.0 - spec.delta - spec.s}};
            break;
    }
    return dc;
}

DcSplit dc_between(const LossSpec& spec) {
    using K = PwPiece::Kind;
    DcSplit dc;
    switch (spec.preset) {
        case Preset::Kpc:
            break;  // identically zero
        case Preset::Ppc:
            dc.concave = {{K::Quadratic, 1.0, 0.0}};
            break;
        case Preset::Twsvc:
        case Preset::Rtwsvc:
            dc.convex = {{K::Constant, 1.0, 0.0}, {K::Hinge, 1.0, 1.0}};
            dc.concave = {{K::Abs, 1.0, 0.0}};
            break;
        case Preset::Frtwsvc:
            dc.convex = {{K::Constant, 1.0, 0.0}, {K::Hinge, 2.0, 1.0}};
            dc.concave = {{K::Abs, 1.0, 0.0}};
            break;
        case Preset::RampTwsvc:
        case Preset::Rfdpc:
            dc.convex = {{K::Constant, 2.0 + 2.0 * spec.delta, 0.0},
                         {K::Hinge, 1.0, 1.0 + spec.delta}};
            dc.concave = {{K::Hinge, 1.0, -spec.s}};
            break;
    }
    return dc;
}

}  // namespace pbc
