#include "pbc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pbc {

bool Mat::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

Vec mat_vec(const Mat& a, std::span<const double> x) {
    Vec y(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) y[r] = dot(a.row(r), x);
    return y;
}

Vec row_mean(const Mat& a) {
    Vec mu(a.cols(), 0.0);
    if (a.rows() == 0) return mu;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) mu[c] += a(r, c);
    for (double& v : mu) v /= static_cast<double>(a.rows());
    return mu;
}

namespace {

double off_diagonal_norm(const Mat& a) {
    double s = 0.0;
    for (std::size_t p = 0; p + 1 < a.rows(); ++p)
        for (std::size_t q = p + 1; q < a.cols(); ++q) s += a(p, q) * a(p, q);
    return std::sqrt(2.0 * s);
}

}  // namespace

SymEigen jacobi_eigensystem(Mat a, double tol, int max_sweeps) {
    const std::size_t n = a.rows();
    Mat v = Mat::identity(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0) scale = 1.0;

    int sweeps = 0;
    while (sweeps < max_sweeps && off_diagonal_norm(a) > tol * scale * n) {
        ++sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= tol * scale * 1e-4) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymEigen out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    out.sweeps = sweeps;
    return out;
}

}  // namespace pbc
