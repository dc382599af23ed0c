#ifndef PBC_LOSS_HPP
#define PBC_LOSS_HPP

#include <span>
#include <string>
#include <vector>

#include "pbc/types.hpp"

namespace pbc {

enum class Preset { Kpc, Ppc, Twsvc, Rtwsvc, Frtwsvc, RampTwsvc, Rfdpc };

Preset preset_from_string(const std::string& name);
std::string to_string(Preset preset);
std::vector<Preset> all_presets();

enum class Regularizer { UnitNormConstraint, None, Tikhonov };

/// A within/between loss pair with its parameters. Use the factories; they
/// fix the deviation kind and regularizer each preset requires.
struct LossSpec {
    Preset preset = Preset::Kpc;
    double c_w = 1.0;
    double c_b = 1.0;
    double delta = 0.3;   // ramp presets
    double s = -0.2;      // ramp presets
    double gamma1 = 0.0;  // rfdpc
    double gamma2 = 0.0;  // rfdpc
    DeviationKind deviation_kind = DeviationKind::SignedDistance;
    Regularizer regularizer = Regularizer::UnitNormConstraint;

    static LossSpec kpc();
    static LossSpec ppc(double c);
    static LossSpec twsvc(double c);
    static LossSpec rtwsvc(double c);
    static LossSpec frtwsvc(double c);
    static LossSpec ramptwsvc(double c, double delta = 0.3, double s = -0.2);
    static LossSpec rfdpc(double c_w, double c_b, double gamma1, double gamma2,
                          double delta = 0.3, double s = -0.2);

    /// Factory by preset name with the single-parameter convention of the
    /// non-rfdpc presets (c maps to c_b with c_w = 1).
    static LossSpec by_name(const std::string& name, double c);

    bool is_ramp() const {
        return preset == Preset::RampTwsvc || preset == Preset::Rfdpc;
    }
    bool uses_cccp() const {
        return preset != Preset::Kpc && preset != Preset::Ppc;
    }

    void validate() const;
};

/// Size and mean deviation of one cluster, as needed by the rfdpc
/// within-loss statistics terms.
struct ClusterStats {
    std::size_t size = 0;
    double mean_dev = 0.0;
};

/// J^w(rho). For rfdpc, stats must be given; a single-member cluster gets a
/// zero variance term and mean term rho itself.
double within_loss(double rho, const LossSpec& spec,
                   const ClusterStats* stats = nullptr);

/// J^b(rho).
double between_loss(double rho, const LossSpec& spec);

/// Per-sample loss: c_w J^w(dev[label]) + c_b * sum of J^b over the rest.
double sample_loss(int label, std::span<const double> dev, const LossSpec& spec,
                   std::span<const ClusterStats> stats = {});

/// Sum of sample losses; rfdpc statistics are recomputed from labels/planes.
double total_loss(const Labels& labels, const PlaneSet& planes,
                  const Dataset& data, const LossSpec& spec);

/// Additive regularization term of the objective (zero unless Tikhonov).
double regularizer_value(const PlaneSet& planes, const LossSpec& spec);

/// Per-cluster size and mean deviation under the given labels and planes.
std::vector<ClusterStats> compute_cluster_stats(const Dataset& data,
                                                const Labels& labels,
                                                const PlaneSet& planes,
                                                DeviationKind kind);

/// Numeric scan of the symmetry / monotonicity properties on [0, 10].
struct PropertyReport {
    bool symmetric = false;
    bool within_nondecreasing = false;
    bool between_nonincreasing = false;
};
PropertyReport satisfies_properties(const LossSpec& spec);

// ---- difference-of-convex decomposition of the piecewise losses ----

/// One convex piece of a loss as a function of the deviation rho.
struct PwPiece {
    enum class Kind { Quadratic, Abs, Hinge, Constant };
    Kind kind = Kind::Constant;
    double coeff = 0.0;
    double theta = 0.0;  // hinge offset: coeff * (|rho| - theta)_+

    double value(double rho) const;
    double deriv(double rho) const;
};

/// loss(rho) == sum(convex) - sum(concave), both sums convex in rho.
struct DcSplit {
    std::vector<PwPiece> convex;
    std::vector<PwPiece> concave;

    double value(double rho) const;
    double convex_value(double rho) const;
    double concave_value(double rho) const;
    double convex_deriv(double rho) const;
    double concave_deriv(double rho) const;

    /// |rho| values where some piece has a kink.
    std::vector<double> breakpoints() const;
};

/// Splits for the presets solved by the concave-convex procedure. The rfdpc
/// statistics terms are convex quadratics handled at the subproblem level
/// and are not part of these splits.
DcSplit dc_within(const LossSpec& spec);
DcSplit dc_between(const LossSpec& spec);

}  // namespace pbc

#endif  // PBC_LOSS_HPP
