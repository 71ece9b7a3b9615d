#pragma once

// Spectrally mollified complex space-time white noise and the stationary
// Ornstein-Uhlenbeck process Z^eps, with exact per-mode updates.
//
// All randomness flows through a counter-based stream: a draw is a pure
// function of (master seed, component id, wavenumber, time index), so the
// same key yields the same Gaussian regardless of evaluation order, thread
// count, or the mollifier in force. Coupled runs (different eps, identical
// seed) therefore share their underlying draws and differ only through the
// deterministic chi^eps scaling.

#include <cstdint>
#include <vector>

#include "pcgl/grid.hpp"

namespace pcgl {

enum class MollifierProfile { smooth, sharp };

// Radial spectral cutoff chi with chi(0) = 1 and supp chi inside B(0,1);
// chi^eps(k) = chi(eps k) vanishes for |k| >= 1/eps.
struct Mollifier {
    MollifierProfile profile = MollifierProfile::smooth;

    double chi(double r) const;
    double chi_eps(double eps, const Ivec3& k) const { return chi(eps * k.norm()); }
};

// Counter-based splittable stream. unit_isotropic returns an isotropic
// complex normal with E|g|^2 = 1, E[g^2] = 0 (Re and Im independent
// N(0, 1/2)), derived by hashing the key through the splitmix64 finalizer
// and feeding Box-Muller.
struct NoiseStream {
    std::uint64_t master_seed = 0;

    enum Component : std::uint32_t {
        kXi = 0,         // OU / forcing increments
        kInit = 1,       // stationary initial draws
        kTestField = 2,  // synthetic band-limited fields in tests
    };

    cplx unit_isotropic(std::uint32_t component, const Ivec3& k,
                        std::int64_t step) const;
    double uniform(std::uint32_t component, const Ivec3& k, std::int64_t step) const;

    // independent stream for Monte-Carlo sample `index`
    NoiseStream substream(std::uint64_t index) const;
};

struct OUParams {
    double mu = 1.0;
    double eps = 1.0;
};

// Stationary marginal: independent per mode,
//   E|z_k|^2 = chi^eps(k)^2 / (2 Re lambda_k),  E[z_k^2] = 0.
SpectralField stationary_draw(const GridSpec& grid, const OUParams& params,
                              const Mollifier& moll, const NoiseStream& stream,
                              std::int64_t step_key);

// Exact one-step OU update  z'_k = e^{-lambda_k dt} z_k + eta_k  with
//   E|eta_k|^2 = chi^eps(k)^2 (1 - e^{-2 Re lambda_k dt}) / (2 Re lambda_k).
// step_key identifies the increment (the step's left endpoint index). The
// EtdWeights overload reuses a precomputed decay table; both overloads give
// bit-identical results.
SpectralField ou_exact_step(const SpectralField& z, const OUParams& params,
                            const Mollifier& moll, double dt,
                            const NoiseStream& stream, std::int64_t step_key);
SpectralField ou_exact_step(const SpectralField& z, const OUParams& params,
                            const Mollifier& moll, const EtdWeights& weights,
                            const NoiseStream& stream, std::int64_t step_key);

// The integrated noise increment eta of ou_exact_step at the same key, so a
// direct solver can consume the identical noise realization.
SpectralField sample_forcing_increment(const GridSpec& grid, const OUParams& params,
                                       const Mollifier& moll, double dt,
                                       const NoiseStream& stream,
                                       std::int64_t step_key);

// Per-mode noise standard deviations (without the Gaussian), exposed for
// variance bookkeeping tests.
double stationary_std(const OUParams& params, const Mollifier& moll, const Ivec3& k);
double increment_std(const OUParams& params, const Mollifier& moll, const Ivec3& k,
                     double dt);

// Stationary series z(t_j), t_j = (start_index + j) dt for j = 0..n_steps,
// with the stationary draw keyed at start_index and increments keyed at the
// absolute step indices. time_mollify additionally filters the increments
// with the AR(1) kernel y_n = a y_{n-1} + sqrt(1-a^2) eta_n, a = e^{-dt/eps^2}
// (variance-preserving smearing over the parabolic time scale eps^2); it is
// an experimental variant, not used by the solvers.
std::vector<Field> sample_stationary_Z(const GridSpec& grid, const OUParams& params,
                                       const Mollifier& moll, double dt,
                                       int n_steps, const NoiseStream& stream,
                                       std::int64_t start_index = 0,
                                       bool time_mollify = false);

}  // namespace pcgl
