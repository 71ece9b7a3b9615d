#include "pcgl/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace pcgl {

double Mollifier::chi(double r) const {
    if (profile == MollifierProfile::sharp) return r < 1.0 ? 1.0 : 0.0;
    if (r >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// pack the wavenumber into a grid-independent key (supports |k_i| < 512)
inline std::uint64_t pack_wavenumber(const Ivec3& k) {
    return (std::uint64_t(std::uint32_t(k.k1 + 512)) << 20) |
           (std::uint64_t(std::uint32_t(k.k2 + 512)) << 10) |
           std::uint64_t(std::uint32_t(k.k3 + 512));
}

inline std::uint64_t hash_key(std::uint64_t seed, std::uint32_t component,
                              const Ivec3& k, std::int64_t step) {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (std::uint64_t(component) * 0xD1342543DE82EF95ULL + kGolden));
    h = mix64(h ^ (pack_wavenumber(k) * 0xDABA0B6EB09322E3ULL + kGolden));
    h = mix64(h ^ (std::uint64_t(step) * 0x2545F4914F6CDD1DULL + kGolden));
    return h;
}

}  // namespace

cplx NoiseStream::unit_isotropic(std::uint32_t component, const Ivec3& k,
                                 std::int64_t step) const {
    const std::uint64_t h = hash_key(master_seed, component, k, step);
    const std::uint64_t r1 = mix64(h + kGolden);
    const std::uint64_t r2 = mix64(h + 2 * kGolden);
    const double u1 = double((r1 >> 11) + 1) * 0x1.0p-53;  // (0,1]
    const double u2 = double(r2 >> 11) * 0x1.0p-53;        // [0,1)
    const double rad = std::sqrt(-std::log(u1));
    return cplx(rad * std::cos(kTwoPi * u2), rad * std::sin(kTwoPi * u2));
}

double NoiseStream::uniform(std::uint32_t component, const Ivec3& k,
                            std::int64_t step) const {
    const std::uint64_t h = hash_key(master_seed, component, k, step);
    return double(mix64(h + 3 * kGolden) >> 11) * 0x1.0p-53;
}

NoiseStream NoiseStream::substream(std::uint64_t index) const {
    return NoiseStream{mix64(master_seed ^ mix64(index + 5 * kGolden))};
}

double stationary_std(const OUParams& params, const Mollifier& moll,
                      const Ivec3& k) {
    const double chi = moll.chi_eps(params.eps, k);
    if (chi == 0.0) return 0.0;
    const double a = lambda_k(params.mu, k).real();
    return chi * std::sqrt(0.5 / a);
}

double increment_std(const OUParams& params, const Mollifier& moll, const Ivec3& k,
                     double dt) {
    const double chi = moll.chi_eps(params.eps, k);
    if (chi == 0.0) return 0.0;
    const double a = lambda_k(params.mu, k).real();
    return chi * std::sqrt(-std::expm1(-2.0 * a * dt) / (2.0 * a));
}

SpectralField stationary_draw(const GridSpec& grid, const OUParams& params,
                              const Mollifier& moll, const NoiseStream& stream,
                              std::int64_t step_key) {
    SpectralField z(grid);
    const std::size_t sz = grid.size();
    for (std::size_t i = 0; i < sz; ++i) {
        const Ivec3 k = grid.wavenumber(i);
        const double sd = stationary_std(params, moll, k);
        if (sd == 0.0) continue;
        z.coeffs[i] = sd * stream.unit_isotropic(NoiseStream::kInit, k, step_key);
    }
    return z;
}

SpectralField sample_forcing_increment(const GridSpec& grid, const OUParams& params,
                                       const Mollifier& moll, double dt,
                                       const NoiseStream& stream,
                                       std::int64_t step_key) {
    if (dt <= 0.0)
        throw std::invalid_argument("sample_forcing_increment: dt must be > 0");
    SpectralField eta(grid);
    const std::size_t sz = grid.size();
    for (std::size_t i = 0; i < sz; ++i) {
        const Ivec3 k = grid.wavenumber(i);
        const double sd = increment_std(params, moll, k, dt);
        if (sd == 0.0) continue;
        eta.coeffs[i] = sd * stream.unit_isotropic(NoiseStream::kXi, k, step_key);
    }
    return eta;
}

SpectralField ou_exact_step(const SpectralField& z, const OUParams& params,
                            const Mollifier& moll, const EtdWeights& weights,
                            const NoiseStream& stream, std::int64_t step_key) {
    const GridSpec& grid = z.grid;
    if (!(weights.grid == grid))
        throw std::invalid_argument("ou_exact_step: weight table grid mismatch");
    const double dt = weights.dt;
    SpectralField out(grid);
    const std::size_t sz = grid.size();
    for (std::size_t i = 0; i < sz; ++i) {
        const Ivec3 k = grid.wavenumber(i);
        const double sd = increment_std(params, moll, k, dt);
        cplx v = weights.decay[i] * z.coeffs[i];
        if (sd != 0.0)
            v += sd * stream.unit_isotropic(NoiseStream::kXi, k, step_key);
        out.coeffs[i] = v;
    }
    return out;
}

SpectralField ou_exact_step(const SpectralField& z, const OUParams& params,
                            const Mollifier& moll, double dt,
                            const NoiseStream& stream, std::int64_t step_key) {
    if (dt <= 0.0) throw std::invalid_argument("ou_exact_step: dt must be > 0");
    return ou_exact_step(z, params, moll, build_etd_weights(z.grid, params.mu, dt),
                         stream, step_key);
}

std::vector<Field> sample_stationary_Z(const GridSpec& grid, const OUParams& params,
                                       const Mollifier& moll, double dt,
                                       int n_steps, const NoiseStream& stream,
                                       std::int64_t start_index, bool time_mollify) {
    if (dt <= 0.0)
        throw std::invalid_argument("sample_stationary_Z: dt must be > 0");
    if (n_steps < 0)
        throw std::invalid_argument("sample_stationary_Z: n_steps must be >= 0");

    std::vector<Field> out;
    out.reserve(std::size_t(n_steps) + 1);
    SpectralField z = stationary_draw(grid, params, moll, stream, start_index);
    out.push_back(inverse(z));

    SpectralField filtered(grid);  // AR(1) state of the time-mollified variant
    const double ar = std::exp(-dt / (params.eps * params.eps));
    const double ar_gain = std::sqrt(1.0 - ar * ar);

    for (int j = 0; j < n_steps; ++j) {
        const std::int64_t key = start_index + j;
        if (!time_mollify) {
            z = ou_exact_step(z, params, moll, dt, stream, key);
        } else {
            const SpectralField eta =
                sample_forcing_increment(grid, params, moll, dt, stream, key);
            const std::size_t sz = grid.size();
            for (std::size_t i = 0; i < sz; ++i) {
                const Ivec3 k = grid.wavenumber(i);
                filtered.coeffs[i] =
                    ar * filtered.coeffs[i] + ar_gain * eta.coeffs[i];
                const cplx decay = std::exp(-lambda_k(params.mu, k) * dt);
                z.coeffs[i] = decay * z.coeffs[i] + filtered.coeffs[i];
            }
        }
        out.push_back(inverse(z));
    }
    return out;
}

}  // namespace pcgl
