#pragma once

// Exact finite lattice sums for the renormalization constants c1, c21, c22,
// the combined constant, divergence-rate fits, and Monte-Carlo validation
// against sampled noise. All sums run over the mollifier support {|eps k|<1},
// in a fixed lexicographic order with compensated accumulation, so results
// are bit-reproducible.

#include <cstdint>
#include <utility>
#include <vector>

#include "pcgl/grid.hpp"
#include "pcgl/noise.hpp"

namespace pcgl {

// Combined-constant convention. `statement` is
//     C = 2 (c1 - conj(nu) conj(c21) - 2 nu c22),
// `proof_line` the variant C = c1 - conj(nu) conj(c21) + 2 nu c22.
enum class CConvention { statement, proof_line };

struct RenormConstants {
    cplx c1{};
    cplx c21{};
    cplx c22{};
    cplx c_combined{};
    double eps = 1.0;
    double mu = 1.0;
    cplx nu{};
    bool paper_literal_c1 = false;
    CConvention convention = CConvention::statement;
};

// c1 = sum_k chi^eps(k)^2 / (2 (4 pi^2 mu |k|^2 + 1)).
// The mu-consistent denominator (matching the OU stationary variance, so
// that c1 = E|Z^eps(t,x)|^2) is the default; paper_literal drops mu from the
// denominator.
cplx c1_sum(double eps, double mu, const Mollifier& moll, bool paper_literal = false);

// Double lattice sums
//   c21 = sum_{k1,k2} chi^eps(k1)^2 chi^eps(k2)^2
//         / (4 (4pi^2 mu|k1|^2+1)(4pi^2 mu|k2|^2+1)(alpha1 + i beta1)),
//   alpha1 = 4pi^2 mu (|k1+k2|^2+|k1|^2+|k2|^2) + 3,
//   beta1  = 4pi^2 (|k1+k2|^2-|k1|^2-|k2|^2),
// and c22 the same with (k1-l1) and beta2 = 4pi^2(|k1-l1|^2-|k1|^2+|l1|^2).
// Cost is O(modes^2); throws resource_error when the mode count exceeds
// max_modes (default admits eps >= 2^-4, about 17k modes).
std::pair<cplx, cplx> c2_sums(double eps, double mu, const Mollifier& moll,
                              std::size_t max_modes = 18000);

cplx combined_C(const cplx& c1, const cplx& c21, const cplx& c22, const cplx& nu,
                CConvention convention);

RenormConstants compute_constants(double eps, double mu, const cplx& nu,
                                  const Mollifier& moll,
                                  CConvention convention = CConvention::statement,
                                  bool paper_literal_c1 = false,
                                  std::size_t max_modes = 18000);

enum class FitModel { power, log_linear };

struct FitResult {
    double slope = 0.0;      // power: d log|v| / d log(eps); log_linear: a
    double intercept = 0.0;
    double r2 = 0.0;
};

// power:      log|value| = slope * log(eps) + intercept
// log_linear: |value| = slope * log(1/eps) + intercept
// Requires >= 4 strictly decreasing eps values.
FitResult divergence_fit(const std::vector<double>& eps_list,
                         const std::vector<double>& values, FitModel model);

struct McC1Report {
    double mc_mean = 0.0;
    double lattice = 0.0;
    double std_err = 0.0;
    double z_score = 0.0;
};

// Ensemble average of |Z^eps(0, x0)|^2 over independent stationary samples
// against the lattice value. Requires 1/eps <= n/2 so the grid resolves the
// mollifier support.
McC1Report mc_validate_c1(double eps, double mu, const Mollifier& moll,
                          int samples, std::uint64_t seed, const GridSpec& grid,
                          bool paper_literal = false);

}  // namespace pcgl
