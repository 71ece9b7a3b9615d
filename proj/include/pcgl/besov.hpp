#pragma once

// Dyadic partition of unity on the grid wavenumbers, Littlewood-Paley blocks,
// Besov-norm estimators and the weighted space-time norm estimators used as
// solver diagnostics.

#include <vector>

#include "pcgl/grid.hpp"

namespace pcgl {

enum class PartitionProfile { smooth, sharp };

// Radial dyadic partition rho_{-1}, rho_0, rho_m(.) = rho_0(2^{-m}.) evaluated
// at the grid wavenumbers and renormalized there so that
// sum_{m>=-1} rho_m(k) = 1 exactly on the grid.
//
// smooth: C^infty bump transition, supp rho_{-1} in B(0,4/3),
//         supp rho_0 in B(0,8/3) \ B(0,3/4).
// sharp:  indicator annuli rho_{-1} = 1_{|k|<=3/4},
//         rho_0 = 1_{3/4 < |k| <= 3/2} (piecewise constant, exact partition).
class DyadicPartition {
  public:
    DyadicPartition(const GridSpec& grid, PartitionProfile profile);

    const GridSpec& grid() const { return grid_; }
    PartitionProfile profile() const { return profile_; }
    int max_block() const { return max_block_; }

    // renormalized rho_m at the grid wavenumber with flat index i
    double rho(int m, std::size_t flat_index) const {
        return table_[std::size_t(m + 1) * grid_.size() + flat_index];
    }
    double rho(int m, const Ivec3& k) const { return rho(m, grid_.flat(k)); }

    // psi_circ(k,l) = sum_{|i-j|<=1} rho_i(k) rho_j(l)
    double psi_circ(const Ivec3& k, const Ivec3& l) const;

    // raw (un-renormalized) radial profile, exposed for tests
    static double profile_value(PartitionProfile p, int m, double r);

  private:
    GridSpec grid_;
    PartitionProfile profile_;
    int max_block_;
    std::vector<double> table_;  // (max_block+2) x n^3, m = -1 ... max_block
};

DyadicPartition build_partition(const GridSpec& grid, PartitionProfile profile);

// Littlewood-Paley blocks Delta_m f = rho_m(D) f.
struct BlockDecomposition {
    std::vector<Field> blocks;  // index m+1 holds Delta_m f
};

Field lp_block(const Field& f, int m, const DyadicPartition& p);
BlockDecomposition decompose(const Field& f, const DyadicPartition& p);
BlockDecomposition decompose(const SpectralField& f, const DyadicPartition& p);

// Grid estimator of the Besov-Hoelder norm:
//   sup_{m>=-1} 2^{m alpha} max_x |Delta_m f(x)|.
double besov_norm(const Field& f, double alpha, const DyadicPartition& p);
double besov_norm(const BlockDecomposition& blocks, double alpha);

// (m, 2^{m alpha} sup |Delta_m f|) rows, for per-block reports
std::vector<std::pair<int, double>> per_block_values(const Field& f, double alpha,
                                                     const DyadicPartition& p);

// Discrete maxima of the weighted space-time norms over the sampled series.
// Pair-based seminorms scan all ordered time pairs; per-slice blocks are
// cached, so memory grows with series length x block count.
struct SpaceTimeNorms {
    double ct_norm;       // sup_t ||u_t||_{C^alpha}
    double hoelder;       // sup_{s<t} ||u_t-u_s||_{C^{alpha-2delta}} / (t-s)^delta
    double e_eta;         // sup_{t>0} t^eta ||u_t||_{C^alpha}
    double e_eta_delta;   // sup_{0<s<t} s^eta ||u_t-u_s||_{C^{alpha-2delta}} / (t-s)^delta
};

SpaceTimeNorms spacetime_norms(const std::vector<double>& times,
                               const std::vector<Field>& series, double eta,
                               double alpha, double delta,
                               const DyadicPartition& p);

}  // namespace pcgl
