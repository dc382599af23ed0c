#ifndef PBC_TYPES_HPP
#define PBC_TYPES_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbc/matrix.hpp"

namespace pbc {

/// How a sample's deviation from a plane w'x + b = 0 is measured.
enum class DeviationKind {
    SignedDistance,  // (w'x + b) / ||w||
    Affine,          // w'x + b
};

/// Samples stored one row per sample, plus optional ground-truth labels.
struct Dataset {
    Mat samples;
    std::optional<std::vector<int>> truth_labels;  // 1-based, values in 1..k_true
    std::string name;

    std::size_t size() const { return samples.rows(); }
    std::size_t dim() const { return samples.cols(); }

    /// Number of distinct truth clusters (max label), 0 when absent.
    int truth_k() const;

    void validate() const;
};

/// A cluster assignment: 1-based labels over m samples. Clusters may be empty.
struct Labels {
    std::vector<int> assignment;
    int k = 0;

    std::size_t size() const { return assignment.size(); }
    std::vector<std::size_t> members_of(int cluster) const;
    std::vector<std::size_t> cluster_sizes() const;

    void validate() const;

    bool operator==(const Labels&) const = default;
};

/// The k cluster center planes; row j of weights is w_j.
struct PlaneSet {
    Mat weights;  // k x n
    Vec biases;   // k

    int k() const { return static_cast<int>(weights.rows()); }
    std::size_t dim() const { return weights.cols(); }

    void validate() const;
};

/// Deviation of one sample from one plane.
double deviation(std::span<const double> x, std::span<const double> w, double b,
                 DeviationKind kind);

/// Deviations of one sample from every plane in the set.
Vec deviation_vector(std::span<const double> x, const PlaneSet& planes,
                     DeviationKind kind);

}  // namespace pbc

#endif  // PBC_TYPES_HPP
