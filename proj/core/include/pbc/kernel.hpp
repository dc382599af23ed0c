#ifndef PBC_KERNEL_HPP
#define PBC_KERNEL_HPP

#include <span>

#include "pbc/types.hpp"

namespace pbc {

struct KernelSpec {
    enum class Kind { Linear, Gaussian } kind = Kind::Linear;
    double mu = 1.0;  // Gaussian width: exp(-mu * ||x1 - x2||^2)

    static KernelSpec linear() { return {Kind::Linear, 1.0}; }
    static KernelSpec gaussian(double mu);
};

double kernel_value(std::span<const double> x1, std::span<const double> x2,
                    const KernelSpec& spec);

/// Empirical kernel map: row i holds the kernel values of sample i against
/// every basis sample. The engine runs unchanged on the result.
Dataset empirical_map(const Dataset& data, const Dataset& basis,
                      const KernelSpec& spec);

}  // namespace pbc

#endif  // PBC_KERNEL_HPP
