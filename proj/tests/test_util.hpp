#pragma once

// shared helpers for the test binaries

#include <cmath>

#include "pcgl/grid.hpp"
#include "pcgl/noise.hpp"

namespace pcgl::test {

// random band-limited field: isotropic normals on |k| <= kmax, zero
// elsewhere, normalized so the field has O(amplitude) values; deterministic
// in (seed, salt)
inline Field random_band_limited(const GridSpec& grid, double kmax,
                                 std::uint64_t seed, std::int64_t salt = 0,
                                 double amplitude = 1.0) {
    const NoiseStream stream{seed};
    SpectralField spec(grid);
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.wavenumber(i).norm() <= kmax) ++count;
    const double scale = amplitude / std::sqrt(double(count));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Ivec3 k = grid.wavenumber(i);
        if (k.norm() > kmax) continue;
        spec.coeffs[i] =
            scale * stream.unit_isotropic(NoiseStream::kTestField, k, salt);
    }
    return inverse(spec);
}

// single Fourier mode e_k
inline Field mode_field(const GridSpec& grid, const Ivec3& k, cplx amp = cplx(1.0)) {
    SpectralField spec(grid);
    spec.coeffs[grid.flat(k)] = amp;
    return inverse(spec);
}

inline double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

inline double rel_sup_diff(const Field& a, const Field& b) {
    const double den = std::max(a.sup_norm(), b.sup_norm());
    return den > 0.0 ? max_abs_diff(a, b) / den : 0.0;
}

}  // namespace pcgl::test
