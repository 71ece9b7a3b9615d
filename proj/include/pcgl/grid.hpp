#pragma once

// Periodic 3D grid on the unit torus, Fourier transforms, Fourier-multiplier
// application and the exponential (ETD) mild-integration steps that every
// other module builds on.
//
// Conventions (fixed, relied on by the binary field format):
//   * physical Field: values v(x) at x = (i1,i2,i3)/n, flat index row-major
//     over (i1,i2,i3) with i3 fastest,
//   * SpectralField: coefficients c(k) for k in {-n/2,...,n/2-1}^3, flat
//     index row-major over (k1+n/2, k2+n/2, k3+n/2) with the k3 axis fastest,
//   * forward transform carries the 1/n^3 factor:
//       c(k) = n^{-3} sum_x v(x) e^{-2 pi i k.x},
//     so c(k) approximates the Fourier coefficient of a torus function, and
//       v(x) = sum_k c(k) e^{2 pi i k.x}.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pcgl {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Ivec3 {
    int k1 = 0, k2 = 0, k3 = 0;

    double norm2() const {
        return double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
    }
    double norm() const;
    bool operator==(const Ivec3&) const = default;
};

// Grid metadata. n must be a power of two, n >= 8; wavenumbers per axis run
// through {-n/2,...,n/2-1}.
struct GridSpec {
    int n = 0;

    explicit GridSpec(int n_points);
    GridSpec() = default;

    std::size_t size() const { return std::size_t(n) * n * n; }
    int half() const { return n / 2; }

    // flat spectral index <-> wavenumber (row-major over shifted k)
    std::size_t flat(const Ivec3& k) const;
    Ivec3 wavenumber(std::size_t flat_index) const;

    bool operator==(const GridSpec&) const = default;
};

// Complex scalar field sampled at the n^3 physical grid nodes.
struct Field {
    GridSpec grid;
    std::vector<cplx> values;

    Field() = default;
    explicit Field(const GridSpec& g) : grid(g), values(g.size()) {}
    Field(const GridSpec& g, cplx fill) : grid(g), values(g.size(), fill) {}

    double sup_norm() const;
};

// Fourier-side view of a field.
struct SpectralField {
    GridSpec grid;
    std::vector<cplx> coeffs;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), coeffs(g.size()) {}
};

// A pure Fourier multiplier k |-> symbol(k).
struct Multiplier {
    std::function<cplx(const Ivec3&)> symbol;
    std::string description;
};

// Semigroup symbol lambda_k = 4 pi^2 (i + mu) |k|^2 + 1; Re lambda_k >= 1.
cplx lambda_k(double mu, const Ivec3& k);

SpectralField transform(const Field& field);
Field inverse(const SpectralField& spec);

SpectralField apply_multiplier(const SpectralField& spec, const Multiplier& m);

// P^1_t: per mode multiplication by exp(-lambda_k t). Requires t >= 0.
Field heat_propagate(const Field& field, double t, double mu);
SpectralField heat_propagate(const SpectralField& spec, double t, double mu);

// Per-mode exponential-integrator coefficients e^{-lambda_k dt} and
// lambda_k^{-1}(1 - e^{-lambda_k dt}), tabulated once. Every time-stepping
// path shares these tables (and the single recursion kernel below), so
// coupled pipelines agree bit-for-bit.
struct EtdWeights {
    GridSpec grid;
    double mu = 0.0, dt = 0.0;
    std::vector<cplx> decay;
    std::vector<cplx> weight;
};

EtdWeights build_etd_weights(const GridSpec& grid, double mu, double dt);

// acc <- decay .* acc + weight .* forcing (one shared instruction stream)
void etd_recursion_step(SpectralField& acc, const SpectralField& forcing,
                        const EtdWeights& w);

// One ETD1 step of the mild equation u' = -lambda_k u + forcing:
//   c'(k) = e^{-lambda_k dt} c(k) + lambda_k^{-1}(1 - e^{-lambda_k dt}) f(k).
// Exact when the forcing is constant over the step. Requires dt > 0.
SpectralField mild_step(const SpectralField& state, const SpectralField& forcing,
                        double dt, double mu);
SpectralField mild_step(const SpectralField& state, const SpectralField& forcing,
                        const EtdWeights& w);

// Second-stage ETD2 combination: given the predictor (ETD1) state and the
// forcing re-evaluated there, adds the first-order correction
//   (dt - I0)/(lambda dt) * (f_pred - f_start)  per mode,
// where I0 = lambda^{-1}(1 - e^{-lambda dt}).
SpectralField etd2_correct(const SpectralField& predictor,
                           const SpectralField& forcing_start,
                           const SpectralField& forcing_pred,
                           double dt, double mu);

// exp(z) - 1 without cancellation for small |z|.
cplx expm1_cplx(const cplx& z);

// Elementwise helpers shared across modules. All require matching grids.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(const Field& a, const Field& b);   // pointwise product
Field operator*(const cplx& s, const Field& a);
Field conj(const Field& a);
void add_scaled(Field& acc, const cplx& s, const Field& a);  // acc += s*a
Field constant_field(const GridSpec& g, cplx value);

}  // namespace pcgl
