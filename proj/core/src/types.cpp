#include "pbc/types.hpp"

#include <algorithm>
#include <cmath>

#include "pbc/errors.hpp"

namespace pbc {

int Dataset::truth_k() const {
    if (!truth_labels) return 0;
    int k = 0;
    for (int v : *truth_labels) k = std::max(k, v);
    return k;
}

void Dataset::validate() const {
    if (samples.rows() < 1 || samples.cols() < 1)
        throw InvalidArgument("dataset must have at least one sample and one feature");
    if (!samples.all_finite())
        throw InvalidArgument("dataset contains non-finite entries");
    if (truth_labels) {
        if (truth_labels->size() != samples.rows())
            throw InvalidArgument("truth label count does not match sample count");
        const int k = truth_k();
        for (int v : *truth_labels)
            if (v < 1 || v > k)
                throw InvalidArgument("truth labels must lie in 1..k_true");
    }
}

std::vector<std::size_t> Labels::members_of(int cluster) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == cluster) idx.push_back(i);
    return idx;
}

std::vector<std::size_t> Labels::cluster_sizes() const {
    std::vector<std::size_t> sz(static_cast<std::size_t>(k), 0);
    for (int v : assignment) ++sz[static_cast<std::size_t>(v - 1)];
    return sz;
}

void Labels::validate() const {
    if (k < 1) throw InvalidArgument("labels need k >= 1");
    for (int v : assignment)
        if (v < 1 || v > k) throw InvalidArgument("label out of range 1..k");
}

void PlaneSet::validate() const {
    if (!weights.all_finite())
        throw InvalidArgument("plane weights contain non-finite entries");
    if (biases.size() != weights.rows())
        throw InvalidArgument("bias count does not match plane count");
    for (double b : biases)
        if (!std::isfinite(b)) throw InvalidArgument("plane bias is non-finite");
}

double deviation(std::span<const double> x, std::span<const double> w, double b,
                 DeviationKind kind) {
    if (x.size() != w.size())
        throw DimensionMismatch("sample and weight dimensions differ");
    const double affine = dot(w, x) + b;
    if (kind == DeviationKind::Affine) return affine;
    const double wn = norm(w);
    if (wn == 0.0) throw ZeroWeight();
    return affine / wn;
}

Vec deviation_vector(std::span<const double> x, const PlaneSet& planes,
                     DeviationKind kind) {
    Vec out(static_cast<std::size_t>(planes.k()));
    for (int j = 0; j < planes.k(); ++j)
        out[static_cast<std::size_t>(j)] =
            deviation(x, planes.weights.row(static_cast<std::size_t>(j)),
                      planes.biases[static_cast<std::size_t>(j)], kind);
    return out;
}

}  // namespace pbc
