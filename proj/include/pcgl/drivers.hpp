#pragma once

// The driver components X^tau built from a Z^eps trajectory: polynomial
// functionals of Z, their stationary heat integrals I(.), and the
// renormalized resonant products, each tagged with its target regularity.
//
// The integration map I(v)_t = int_{-infty}^t P^1_{t-s} v_s ds is realized by
// the per-mode recursion
//   I(t+dt) = e^{-lambda_k dt} I(t) + lambda_k^{-1}(1-e^{-lambda_k dt}) v(t),
// started from zero at -T_b; the bias is O(e^{-T_b}) + O(dt).

#include <array>
#include <cstdint>
#include <vector>

#include "pcgl/besov.hpp"
#include "pcgl/constants.hpp"
#include "pcgl/grid.hpp"
#include "pcgl/noise.hpp"
#include "pcgl/paraproduct.hpp"

namespace pcgl {

enum class DriverTag : int {
    A = 0,    // Z
    AA,       // Z^2
    AB,       // Z conj(Z) - c1
    IAA,      // I(X^AA)
    IAB,      // I(X^AB)
    IAAB,     // W = I(X^AAB)
    IAABoA,   // W o Z
    IAABoB,   // W o conj(Z)
    IAAoAB,   // X^IAA o X^AB
    IAAoBB,   // X^IAA o X^BB - 2 c21
    IABoAB,   // X^IAB o X^AB - c22
    IABoBB,   // X^IAB o X^BB
    IAABoAB,  // W o X^AB - 2 c22 Z
    IAABoBB,  // W o X^BB - 2 c21 conj(Z)
    BB,       // conj(Z)^2        (auxiliary, used to define other terms)
    AAB,      // X^AA conj(Z) - 2 c1 Z  (auxiliary)
};

inline constexpr int kDriverCount = 16;

double target_alpha(DriverTag tag);
const char* driver_name(DriverTag tag);

// One time slice of the full driving vector, physical-space fields plus the
// cached block sets and driver-only products the solver consumes.
struct DriverSlice {
    double t = 0.0;
    GridSpec grid;
    std::array<Field, kDriverCount> comp;

    const Field& field(DriverTag tag) const { return comp[std::size_t(tag)]; }
    Field& field(DriverTag tag) { return comp[std::size_t(tag)]; }

    // block sets of the fields entering paraproducts
    BlockSet bs_z, bs_w, bs_aa, bs_ab, bs_iaa, bs_iab;

    // renormalized products WZ, W conj(Z), W^2 conj(Z), W conj(W) Z
    Field wz, wzbar, w2zbar, wwbarz;

    // resonants g o h cached for the commutator terms:
    // X^IAB o X^AB, conj(X^IAB) o X^AA, X^IAA o X^AB, conj(X^IAA) o X^AA
    Field res_iab_ab, res_iabc_aa, res_iaa_ab, res_iaac_aa;
};

// Streaming generator of driver slices: advances the OU process and the
// three I-recursions step by step and materializes one slice at a time
// (memory stays O(1) in the horizon). Noise draws are keyed by absolute step
// index, so coupled runs (identical seed, different eps or different solver)
// consume identical Gaussians.
class DriverEngine {
  public:
    DriverEngine(const GridSpec& grid, const OUParams& params, const Mollifier& moll,
                 const RenormConstants& consts, const DyadicPartition& partition,
                 const NoiseStream& stream, double dt, int burn_in_steps);

    const DriverSlice& slice() const { return slice_; }
    void advance();
    double dt() const { return dt_; }
    std::int64_t step_index() const { return index_; }
    const RenormConstants& constants() const { return consts_; }
    const DyadicPartition& partition() const { return *partition_; }

    // spectral states, exposed for consistency tests
    const SpectralField& z_state() const { return z_; }
    const SpectralField& i_aab_state() const { return i_aab_; }

  private:
    void step_states();
    void rebuild_slice();

    GridSpec grid_;
    OUParams params_;
    Mollifier moll_;
    RenormConstants consts_;
    const DyadicPartition* partition_;
    NoiseStream stream_;
    double dt_;
    std::int64_t index_;
    SpectralField z_, i_aa_, i_ab_, i_aab_;
    DriverSlice slice_;
};

// Time series of one driver component.
struct DriverSeries {
    DriverTag tag{};
    double target_alpha = 0.0;
    std::vector<double> times;
    std::vector<Field> fields;
};

// Materialized driving vector on the common time grid t >= 0.
struct DrivingVector {
    GridSpec grid;
    RenormConstants constants;
    OUParams params;
    double dt = 0.0;
    std::vector<double> times;
    std::array<std::vector<Field>, kDriverCount> comp;

    const std::vector<Field>& series(DriverTag tag) const {
        return comp[std::size_t(tag)];
    }
};

// I applied to a series sampled on [-T_b, T]: zero-initialized at the first
// time point (which must be <= 0), values emitted for t >= 0.
DriverSeries integrate_I(const DriverSeries& input, double mu);

// Builds all components from a given Z trajectory on [-T_b, T]. The input
// grid must be uniform; slices with t >= 0 are emitted. Memory is
// O(components x slices); intended for modest horizons (the CLI streams
// through DriverEngine instead).
DrivingVector build_drivers(const std::vector<double>& z_times,
                            const std::vector<Field>& z_series,
                            const OUParams& params, const RenormConstants& consts,
                            const DyadicPartition& partition);

// Builds only the slice-level products for externally supplied fields; used
// by build_drivers and by the oracle tests.
void fill_slice_products(DriverSlice& slice, const RenormConstants& consts,
                         const DyadicPartition& partition);

struct RegularityRow {
    DriverTag tag{};
    double t = 0.0;
    double besov = 0.0;       // norm at target_alpha - kappa
    double block_slope = 0.0; // d log2 ||Delta_m f||_{L^2}^2 / dm over resolved blocks
    bool flagged = false;
};

// Per component, per time slice: Besov norm at alpha_tau - kappa and the
// per-block energy slope; flags slopes deviating from the -2*alpha_tau
// heuristic (slope 1 for Z ~ C^{-1/2}) by more than `margin`.
std::vector<RegularityRow> regularity_report(const DrivingVector& dv, double kappa,
                                             const DyadicPartition& partition,
                                             double margin = 0.5);

}  // namespace pcgl
