#pragma once

// Bony decomposition fg = f<g + f o g + f>g over Littlewood-Paley blocks,
// the commutator R(f,g,h) = (f<g) o h - f (g o h), and a brute-force spectral
// oracle for the resonant product via psi_circ.
//
// Block products are formed pointwise in physical space at native resolution;
// the identity lt + res + gt = fg then holds exactly on the grid.

#include <vector>

#include "pcgl/besov.hpp"
#include "pcgl/grid.hpp"

namespace pcgl {

// Physical-space Littlewood-Paley blocks of a field together with the
// running low-pass sums S_j = sum_{i<=j} Delta_i used by the paraproducts.
struct BlockSet {
    GridSpec grid;
    std::vector<Field> delta;    // index m+1 holds Delta_m f
    std::vector<Field> lowpass;  // index j+1 holds S_j f

    const Field& block(int m) const { return delta[std::size_t(m + 1)]; }
    const Field& low(int j) const { return lowpass[std::size_t(j + 1)]; }
    int max_block() const { return int(delta.size()) - 2; }
};

BlockSet block_set(const Field& f, const DyadicPartition& p);
BlockSet block_set(const SpectralField& f, const DyadicPartition& p);

// conjugate blocks: Delta_m conj(f) = conj(Delta_m f) since rho_m is radial
BlockSet conj(const BlockSet& f);

// blocks of a*f + b*g, exact by linearity of Delta_m
BlockSet linear_combo(const cplx& a, const BlockSet& f, const cplx& b,
                      const BlockSet& g);

// f < g = sum_{m>=1} (S_{m-2} f)(Delta_m g); equals the double sum over
// m1 + 2 <= m2 after low-pass regrouping.
Field para_lt(const BlockSet& f, const BlockSet& g);
// f > g = g < f
Field para_gt(const BlockSet& f, const BlockSet& g);
// f o g = sum_{|m1-m2|<=1} (Delta_{m1} f)(Delta_{m2} g)
Field para_res(const BlockSet& f, const BlockSet& g);
// f < g + f > g
Field para_lt_gt(const BlockSet& f, const BlockSet& g);

struct BonyTriple {
    Field lt;   // f < g
    Field res;  // f o g
    Field gt;   // f > g
};

BonyTriple bony_decompose(const Field& f, const Field& g, const DyadicPartition& p);

// R(f,g,h) = (f < g) o h - f (g o h)
Field commutator_R(const Field& f, const Field& g, const Field& h,
                   const DyadicPartition& p);
Field commutator_R(const BlockSet& f, const BlockSet& g, const BlockSet& h,
                   const DyadicPartition& p);

// Spectral-convolution oracle for the resonant product:
//   out_hat(k) = sum_{k1 + k2 = k (mod n)} psi_circ(k1,k2) f_hat(k1) g_hat(k2),
// with wavenumbers reduced to the grid range (products on the grid alias, so
// the convolution is circular). Cost O(n^6); refuses n > 16.
Field resonant_oracle(const Field& f, const Field& g, const DyadicPartition& p);

}  // namespace pcgl
