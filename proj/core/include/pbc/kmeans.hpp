#ifndef PBC_KMEANS_HPP
#define PBC_KMEANS_HPP

#include <cstdint>

#include "pbc/types.hpp"

namespace pbc {

struct KmeansConfig {
    int k = 2;
    int max_iter = 300;
    std::uint64_t seed = 0;
};

struct KmeansResult {
    Labels labels;
    Mat centroids;
    double inertia = 0.0;
    int iterations = 0;
};

/// Lloyd's algorithm with seeded random centroid initialization. Empty
/// clusters are reseeded at the sample farthest from its centroid.
KmeansResult kmeans_run(const Dataset& data, const KmeansConfig& config);

}  // namespace pbc

#endif  // PBC_KMEANS_HPP
