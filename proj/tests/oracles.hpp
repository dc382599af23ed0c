// Independent reference computations the tests check the library against.
// Everything here is deliberately brute-force and shares no code with the
// implementation paths it validates.
#ifndef PBC_TESTS_ORACLES_HPP
#define PBC_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "pbc/loss.hpp"
#include "pbc/matrix.hpp"
#include "pbc/rng.hpp"
#include "pbc/types.hpp"

namespace oracles {

inline pbc::Mat random_matrix(pbc::Rng& rng, std::size_t m, std::size_t n,
                              double scale = 1.0) {
    pbc::Mat out(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = scale * rng.gaussian();
    return out;
}

inline pbc::Dataset random_dataset(pbc::Rng& rng, std::size_t m, std::size_t n,
                                   double scale = 1.0) {
    pbc::Dataset d;
    d.samples = random_matrix(rng, m, n, scale);
    d.name = "random";
    return d;
}

inline pbc::Labels random_labels(pbc::Rng& rng, std::size_t m, int k) {
    pbc::Labels l;
    l.k = k;
    l.assignment.resize(m);
    for (std::size_t i = 0; i < m; ++i) l.assignment[i] = rng.uniform_int(1, k);
    return l;
}

inline pbc::PlaneSet random_planes(pbc::Rng& rng, int k, std::size_t n) {
    pbc::PlaneSet p;
    p.weights = random_matrix(rng, static_cast<std::size_t>(k), n);
    p.biases.resize(static_cast<std::size_t>(k));
    for (auto& b : p.biases) b = rng.gaussian();
    return p;
}

/// Unit directions covering the sphere: 2-D by angle sweep, 3-D by a
/// Fibonacci lattice.
inline std::vector<pbc::Vec> unit_grid(std::size_t n, std::size_t count) {
    std::vector<pbc::Vec> dirs;
    dirs.reserve(count);
    if (n == 2) {
        for (std::size_t i = 0; i < count; ++i) {
            const double a = std::numbers::pi * static_cast<double>(i) /
                             static_cast<double>(count);
            dirs.push_back({std::cos(a), std::sin(a)});
        }
    } else if (n == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) /
                                       static_cast<double>(count);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double a = golden * static_cast<double>(i);
            dirs.push_back({r * std::cos(a), r * std::sin(a), z});
        }
    }
    return dirs;
}

/// Brute-force minimum of sum (w'x+b)^2 over unit w with the bias at its
/// per-direction optimum (the member mean projection).
inline double kpc_grid_minimum(const pbc::Mat& members, std::size_t grid) {
    const std::vector<pbc::Vec> dirs = unit_grid(members.cols(), grid);
    double best = std::numeric_limits<double>::infinity();
    for (const pbc::Vec& w : dirs) {
        double mean = 0.0;
        for (std::size_t r = 0; r < members.rows(); ++r)
            mean += pbc::dot(members.row(r), w);
        mean /= static_cast<double>(members.rows());
        const double b = -mean;
        double obj = 0.0;
        for (std::size_t r = 0; r < members.rows(); ++r) {
            const double f = pbc::dot(members.row(r), w) + b;
            obj += f * f;
        }
        best = std::min(best, obj);
    }
    return best;
}

/// Brute-force minimum of sum_in (w'x+b)^2 - c sum_out (w'x+b)^2 over unit w,
/// bias at the per-direction stationary point (valid when the bias curvature
/// m_in - c m_out is positive).
inline double ppc_grid_minimum(const pbc::Mat& members, const pbc::Mat& others,
                               double c, std::size_t grid) {
    const std::vector<pbc::Vec> dirs = unit_grid(members.cols(), grid);
    const double d = static_cast<double>(members.rows()) -
                     c * static_cast<double>(others.rows());
    double best = std::numeric_limits<double>::infinity();
    for (const pbc::Vec& w : dirs) {
        double sum_in = 0.0, sum_out = 0.0;
        for (std::size_t r = 0; r < members.rows(); ++r)
            sum_in += pbc::dot(members.row(r), w);
        for (std::size_t r = 0; r < others.rows(); ++r)
            sum_out += pbc::dot(others.row(r), w);
        const double b = -(sum_in - c * sum_out) / d;
        double obj = 0.0;
        for (std::size_t r = 0; r < members.rows(); ++r) {
            const double f = pbc::dot(members.row(r), w) + b;
            obj += f * f;
        }
        for (std::size_t r = 0; r < others.rows(); ++r) {
            const double f = pbc::dot(others.row(r), w) + b;
            obj -= c * f * f;
        }
        best = std::min(best, obj);
    }
    return best;
}

/// O(m^2) pairwise agreement count.
struct PairCounts {
    std::uint64_t together = 0, apart = 0, disagree = 0;
};
inline PairCounts pair_scan(const std::vector<int>& a, const std::vector<int>& b) {
    PairCounts c;
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const bool sa = a[i] == a[j];
            const bool sb = b[i] == b[j];
            if (sa && sb)
                ++c.together;
            else if (!sa && !sb)
                ++c.apart;
            else
                ++c.disagree;
        }
    return c;
}

}  // namespace oracles

#endif  // PBC_TESTS_ORACLES_HPP
