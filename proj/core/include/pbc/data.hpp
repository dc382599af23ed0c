#ifndef PBC_DATA_HPP
#define PBC_DATA_HPP

#include <array>
#include <cstdint>
#include <string>

#include "pbc/types.hpp"

namespace pbc {

/// Three-class synthetic generator: two noisy lines and one noisy plane in
/// R^3 (class 1: z = -x + 1 at y = 1; class 2: z = x - 1 at y = 1;
/// class 3: z = 0).
struct SynthSpec {
    int group_size = 120;
    std::uint64_t seed = 0;
    std::array<int, 3> class_mix{40, 40, 40};

    /// Equal-thirds mix for one of the benchmark group sizes.
    static SynthSpec group(char which, std::uint64_t seed);  // '1'..'4'

    void validate() const;
};

Dataset generate_synthetic(const SynthSpec& spec);

/// Comma-separated values, '.' decimal point, optional single header line
/// (auto-detected by a non-numeric first row), blank lines ignored. When
/// has_labels is set the last column holds integer truth labels.
Dataset load_csv(const std::string& path, bool has_labels);

/// Writes features (12 significant digits) and the truth label column when
/// present.
void save_csv(const Dataset& data, const std::string& path);

enum class ScaleMethod { MinMax01, ZScore, None };

ScaleMethod scale_method_from_string(const std::string& name);
std::string to_string(ScaleMethod method);

/// Per-feature rescaling; constant features map to zero.
Dataset scale_features(const Dataset& data, ScaleMethod method);

}  // namespace pbc

#endif  // PBC_DATA_HPP
