#pragma once

// The paracontrolled fixed-point system for (v,w): the forcings F and
// G = G1 + ... + G8, the commutator field com, the renormalized products,
// its exponential time stepper with reconstruction u = Z - nu W + v + w, a
// direct renormalized-equation reference solver sharing the same noise
// realization, the exact algebraic identity check, and the eps-convergence
// harness.

#include <cstdint>
#include <vector>

#include "pcgl/constants.hpp"
#include "pcgl/drivers.hpp"
#include "pcgl/errors.hpp"
#include "pcgl/grid.hpp"

namespace pcgl {

enum class Scheme { etd1, etd2 };

struct SolverConfig {
    double mu = 1.0;
    cplx nu{1.0, 0.0};
    double eps = 0.5;
    int n = 16;
    double dt = 1e-3;
    double t_end = 0.1;
    double burn_in = 5.0;
    double kappa = 0.02;
    double kappa_prime = 0.05;
    std::uint64_t seed = 1;
    MollifierProfile chi = MollifierProfile::smooth;
    PartitionProfile partition = PartitionProfile::smooth;
    Scheme scheme = Scheme::etd1;
    CConvention c_convention = CConvention::statement;
    bool paper_literal_c1 = false;
    cplx u0{0.0, 0.0};  // spatially constant initial datum; v0 = u0 - Z0 + nu W0
    double blowup_threshold = 1e8;
    int out_stride = 1;
    std::size_t c2_budget = 18000;

    void validate() const;  // throws std::invalid_argument naming the field
    int steps() const;
    int burn_in_steps() const;
};

// The pair of paracontrolled remainders; vhat is the mild accumulation
// defining the com field and coincides with v during solving.
struct SolutionState {
    Field v, w, vhat;
    double time = 0.0;
};

struct Forcings {
    Field F, G, com;
};

// F, G and com assembled from one driver slice with shared block sets.
Forcings assemble_forcings(const Field& v, const Field& w, const Field& vhat,
                           const DriverSlice& slice, const RenormConstants& consts,
                           const cplx& nu, const DyadicPartition& partition);

Field eval_F(const Field& v, const Field& w, const DriverSlice& slice,
             const cplx& nu, const DyadicPartition& partition);
Field eval_com(const Field& vhat, const Field& v, const Field& w,
               const DriverSlice& slice, const cplx& nu,
               const DyadicPartition& partition);
Field assemble_G(const Field& v, const Field& w, const Field& vhat,
                 const DriverSlice& slice, const RenormConstants& consts,
                 const cplx& nu, const DyadicPartition& partition);

struct RenormalizedProducts {
    Field wz, wzbar, w2zbar, wwbarz;
};
// The four reconstructions (cached on the slice); at fixed eps each equals
// the plain pointwise product.
RenormalizedProducts renormalized_products(const DriverSlice& slice);

struct IdentityReport {
    Field lhs, rhs;
    double rel_error = 0.0;
};

// lhs = F + G as assembled; rhs the independently assembled closed form
//   -nu { (-nu W + u2)^2 (conj Z - conj nu conj W + conj u2)
//         + 2 (-nu W + u2)(-conj nu conj W + conj u2) Z
//         + 2 (-nu W + u2) X^AB + (-conj nu conj W + conj u2) X^AA
//         + 2 (conj nu conj c21 + 2 nu c22)(Z - nu W + u2) }
//   + (nu + 1)(Z - nu W + u2),
// with every product pointwise. Exact algebra at fixed eps.
IdentityReport identity_check(const Field& v, const Field& w,
                              const DriverSlice& slice,
                              const RenormConstants& consts, const cplx& nu,
                              const DyadicPartition& partition);

// One ETD1 step: v and w advanced by mild_step with forcings F and G, vhat
// identically to v. Throws blowup_error on non-finite values or sup-norm
// beyond the threshold.
SolutionState step_system(const SolutionState& state, const DriverSlice& slice,
                          const RenormConstants& consts, const cplx& nu, double mu,
                          double dt, const DyadicPartition& partition,
                          double blowup_threshold = 1e8);

// Rebuilds a full DriverSlice from a materialized driving vector.
DriverSlice make_slice(const DrivingVector& dv, std::size_t index,
                       const DyadicPartition& partition);

struct SolveResult {
    std::vector<double> times;
    std::vector<Field> u;
    std::vector<Field> v, w;  // paracontrolled runs only
    double final_time = 0.0;
};

// Fixed-point time stepping against a materialized driving vector (must
// cover [0, t_end] at the config dt).
SolveResult solve_paracontrolled(const SolverConfig& config, const DrivingVector& dv);
// Streaming variant: samples noise and builds driver slices on the fly.
SolveResult solve_paracontrolled(const SolverConfig& config);

// Exponential-Euler reference solver for
//   du = (i+mu) Lap u + nu (1 - |u|^2) u + nu C u + xi^eps,
// stepped as the exact linear+noise flow followed by the ETD1 nonlinear
// correction N(u) = nu (1 + C - |u|^2) u + u evaluated at the updated state
// (the +u bookkeeps the -1 mass term inside lambda_k). Shares the per-mode
// noise increments with the paracontrolled pipeline.
SolveResult solve_direct(const SolverConfig& config);

struct CompareResult {
    std::vector<double> times;
    std::vector<double> sup_diff;  // sup_x |u_para - u_direct| per output time
    double sup_ref = 0.0;          // max_t sup_x |u_direct|
    double rel_sup_diff = 0.0;     // max_t sup_diff / sup_ref
};

// Runs both solvers with shared noise and identical configuration.
CompareResult compare_solvers(const SolverConfig& config);

struct StudyRow {
    std::uint64_t seed = 0;
    double eps_hi = 0.0, eps_lo = 0.0;
    double diff_besov = 0.0;  // max_t || u^hi_t - u^lo_t ||_{C^{-2/3+kappa'}}
    double diff_sup = 0.0;
};

// For each seed, runs the paracontrolled pipeline once per eps with shared
// per-mode noise draws (the mollifier being the only difference) and reports
// the differences of consecutive eps entries.
std::vector<StudyRow> epsilon_convergence_study(const SolverConfig& config,
                                                const std::vector<double>& eps_list,
                                                int seeds);

}  // namespace pcgl
