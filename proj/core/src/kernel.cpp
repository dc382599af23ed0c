#include "pbc/kernel.hpp"

#include <cmath>

#include "pbc/errors.hpp"

namespace pbc {

KernelSpec KernelSpec::gaussian(double mu) {
    if (!(mu > 0.0)) throw InvalidArgument("gaussian kernel needs mu > 0");
    return {Kind::Gaussian, mu};
}

double kernel_value(std::span<const double> x1, std::span<const double> x2,
                    const KernelSpec& spec) {
    if (x1.size() != x2.size())
        throw DimensionMismatch("kernel arguments have different dimensions");
    if (spec.kind == KernelSpec::Kind::Linear) return dot(x1, x2);
    return std::exp(-spec.mu * squared_distance(x1, x2));
}

Dataset empirical_map(const Dataset& data, const Dataset& basis,
                      const KernelSpec& spec) {
    if (data.dim() != basis.dim())
        throw DimensionMismatch("data and basis have different dimensions");
    Dataset out;
    out.samples = Mat(data.size(), basis.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t l = 0; l < basis.size(); ++l)
            out.samples(i, l) =
                kernel_value(data.samples.row(i), basis.samples.row(l), spec);
    out.truth_labels = data.truth_labels;
    out.name = data.name;
    return out;
}

}  // namespace pbc
