#include "pbc/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "pbc/errors.hpp"
#include "pbc/rng.hpp"

namespace pbc {

KmeansResult kmeans_run(const Dataset& data, const KmeansConfig& config) {
    const std::size_t m = data.size();
    const std::size_t n = data.dim();
    const std::size_t k = static_cast<std::size_t>(config.k);
    if (config.k < 1) throw InvalidArgument("kmeans needs k >= 1");
    if (m < k) throw TooFewSamples("fewer samples than centroids");

    Rng rng(config.seed);
    // k distinct sample indices as the initial centroids.
    std::vector<std::size_t> pick;
    while (pick.size() < k) {
        const std::size_t c =
            static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(m) - 1));
        if (std::find(pick.begin(), pick.end(), c) == pick.end())
            pick.push_back(c);
    }
    Mat centroids(k, n);
    for (std::size_t j = 0; j < k; ++j) centroids.set_row(j, data.samples.row(pick[j]));

    std::vector<int> labels(m, 1);
    KmeansResult res;
    res.iterations = 0;

    for (int it = 0; it < config.max_iter; ++it) {
        ++res.iterations;
        bool changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            int best = 1;
            double best_d = squared_distance(data.samples.row(i), centroids.row(0));
            for (std::size_t j = 1; j < k; ++j) {
                const double d = squared_distance(data.samples.row(i),
                                                  centroids.row(j));
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(j) + 1;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }

        Mat next(k, n);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = static_cast<std::size_t>(labels[i] - 1);
            ++counts[j];
            for (std::size_t c = 0; c < n; ++c) next(j, c) += data.samples(i, c);
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] == 0) {
                // Reseed at the sample farthest from its own centroid.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const std::size_t ji = static_cast<std::size_t>(labels[i] - 1);
                    const double d =
                        squared_distance(data.samples.row(i), centroids.row(ji));
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                next.set_row(j, data.samples.row(far));
                changed = true;
            } else {
                for (std::size_t c = 0; c < n; ++c)
                    next(j, c) /= static_cast<double>(counts[j]);
            }
        }
        centroids = std::move(next);
        if (!changed) break;
    }

    double inertia = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        inertia += squared_distance(
            data.samples.row(i),
            centroids.row(static_cast<std::size_t>(labels[i] - 1)));

    res.labels = Labels{std::move(labels), config.k};
    res.centroids = std::move(centroids);
    res.inertia = inertia;
    return res;
}

}  // namespace pbc
