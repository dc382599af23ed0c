#ifndef PBC_SOLVE_HPP
#define PBC_SOLVE_HPP

#include <optional>
#include <span>

#include "pbc/loss.hpp"
#include "pbc/matrix.hpp"

namespace pbc {

/// One cluster center plane.
struct Plane {
    Vec w;
    double b = 0.0;
};

struct SolveConfig {
    int cccp_max_outer = 50;
    double cccp_tol = 1e-6;  // relative objective decrease per outer step
    int inner_max_iter = 500;
    double inner_tol = 1e-8;
    std::optional<Plane> warm_start;
};

struct SubproblemResult {
    Plane plane;
    double objective = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// Global minimizer of sum (w'x+b)^2 over the members subject to ||w|| = 1:
/// the smallest-eigenvalue direction of the member scatter matrix.
SubproblemResult solve_kpc_plane(const Mat& members, const SolveConfig& config);

/// Minimizer of sum_in (w'x+b)^2 - c * sum_out (w'x+b)^2 subject to ||w|| = 1,
/// by bias elimination and a reduced symmetric eigenproblem.
SubproblemResult solve_ppc_plane(const Mat& members, const Mat& others, double c,
                                 const SolveConfig& config);

/// Stationary point of the nonconvex piecewise subproblem for one cluster,
/// found by the concave-convex procedure. The warm start, when present, is
/// the initial iterate and the outer objective never rises above it.
SubproblemResult solve_cccp_plane(const Mat& members, const Mat& others,
                                  const LossSpec& spec, const SolveConfig& config);

/// The cluster-j objective the solvers minimize: c_w * within over members +
/// c_b * between over others, plus the Tikhonov term when the preset has one.
/// Uniform across presets, so per-cluster values sum to the run objective.
double subproblem_objective(const Mat& members, const Mat& others,
                            std::span<const double> w, double b,
                            const LossSpec& spec);

namespace detail {

/// Saddle-direction plane for a between-cluster-only proximal subproblem
/// (empty cluster under the ppc preset): largest-variance direction through
/// the mean of the remaining samples.
Plane ppc_between_only_plane(const Mat& others);

}  // namespace detail

}  // namespace pbc

#endif  // PBC_SOLVE_HPP
