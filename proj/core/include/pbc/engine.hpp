#ifndef PBC_ENGINE_HPP
#define PBC_ENGINE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pbc/loss.hpp"
#include "pbc/solve.hpp"
#include "pbc/types.hpp"

namespace pbc {

enum class InitMethod { Random, Nng };
enum class TerminationRule { RepeatedAssignment, NonDecreasingObjective, Both };
enum class AssignmentRule { FullLoss, SimplifiedAbsDev };

struct EngineConfig {
    int k = 2;
    InitMethod init = InitMethod::Nng;
    std::uint64_t seed = 0;   // Random init
    int nng_neighbors = 5;    // Nng init
    TerminationRule termination = TerminationRule::Both;
    int max_iter = 100;
    SolveConfig solve;
    AssignmentRule assignment_rule = AssignmentRule::SimplifiedAbsDev;

    EngineConfig() {
        // The stationarity checks of the loop and of the optimality
        // certificate work at 1e-9; drive the subproblem solves tighter.
        solve.cccp_tol = 1e-12;
    }
};

enum class StopReason {
    FixedPoint,          // assignment reproduced the labels
    PlanesStationary,    // step 2(c): re-solve left the objective unchanged
    RepeatedAssignment,  // condition (i)
    ObjectiveStall,      // condition (ii)
    BothConditions,      // condition (iii)
    MaxIterations,
};

std::string to_string(StopReason reason);

struct IterationRecord {
    std::uint64_t labels_hash = 0;
    double objective = 0.0;
};

struct ClusteringState {
    Labels labels;
    PlaneSet planes;
    double objective = 0.0;
    int iteration = 0;
    std::vector<IterationRecord> history;
};

struct RunTrace {
    StopReason reason = StopReason::MaxIterations;
    bool converged = false;
    std::vector<double> objectives;  // one entry per recorded iteration
};

/// Initial labeling: seeded uniform draws (redrawn until no cluster is
/// empty) or connected components of the undirected p-nearest-neighbor
/// graph, merged/split to exactly k clusters.
Labels initialize(const Dataset& data, const EngineConfig& config);

/// Per-sample argmin assignment under the given planes. FullLoss evaluates
/// the complete sample loss; SimplifiedAbsDev the absolute deviation. Ties
/// go to the smallest cluster label. For the rfdpc full loss, per-cluster
/// statistics are taken from `current` (pre-move memberships); when absent,
/// a SimplifiedAbsDev pass supplies them.
Labels assign(const Dataset& data, const PlaneSet& planes, const LossSpec& spec,
              AssignmentRule rule, const Labels* current = nullptr);

/// Solve the k per-cluster subproblems, warm-started per plane. A solution
/// is never accepted if the warm plane scores a lower subproblem objective.
PlaneSet update_planes(const Dataset& data, const Labels& labels,
                       const LossSpec& spec, const EngineConfig& config,
                       const PlaneSet* warm = nullptr);

/// The run objective: total loss plus the preset's regularization term.
double objective_value(const Dataset& data, const Labels& labels,
                       const PlaneSet& planes, const LossSpec& spec);

/// The alternating loop: initialize, then update/assign until the
/// repetitiveness check or the configured termination condition fires.
std::pair<ClusteringState, RunTrace> run(const Dataset& data, const LossSpec& spec,
                                         const EngineConfig& config);

/// True when re-assignment reproduces the final labels and a warm-started
/// re-solve improves the objective by less than 1e-9.
bool verify_weak_local_optimality(const ClusteringState& state, const Dataset& data,
                                  const LossSpec& spec, const EngineConfig& config);

/// Order-sensitive 64-bit hash of a label vector.
std::uint64_t labels_hash(const Labels& labels);

}  // namespace pbc

#endif  // PBC_ENGINE_HPP
