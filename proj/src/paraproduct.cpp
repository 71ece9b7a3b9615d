#include "pcgl/paraproduct.hpp"

#include <stdexcept>

#include "pcgl/errors.hpp"

namespace pcgl {

BlockSet block_set(const SpectralField& f, const DyadicPartition& p) {
    BlockSet s;
    s.grid = f.grid;
    BlockDecomposition d = decompose(f, p);
    s.delta = std::move(d.blocks);
    s.lowpass.reserve(s.delta.size());
    Field acc(s.grid, cplx(0.0));
    for (const Field& b : s.delta) {
        acc = acc + b;
        s.lowpass.push_back(acc);
    }
    return s;
}

BlockSet block_set(const Field& f, const DyadicPartition& p) {
    return block_set(transform(f), p);
}

BlockSet conj(const BlockSet& f) {
    BlockSet s;
    s.grid = f.grid;
    s.delta.reserve(f.delta.size());
    s.lowpass.reserve(f.lowpass.size());
    for (const Field& b : f.delta) s.delta.push_back(conj(b));
    for (const Field& b : f.lowpass) s.lowpass.push_back(conj(b));
    return s;
}

BlockSet linear_combo(const cplx& a, const BlockSet& f, const cplx& b,
                      const BlockSet& g) {
    if (!(f.grid == g.grid) || f.delta.size() != g.delta.size())
        throw std::invalid_argument("linear_combo: block set mismatch");
    BlockSet s;
    s.grid = f.grid;
    s.delta.reserve(f.delta.size());
    s.lowpass.reserve(f.lowpass.size());
    for (std::size_t j = 0; j < f.delta.size(); ++j) {
        Field d = a * f.delta[j];
        add_scaled(d, b, g.delta[j]);
        s.delta.push_back(std::move(d));
        Field l = a * f.lowpass[j];
        add_scaled(l, b, g.lowpass[j]);
        s.lowpass.push_back(std::move(l));
    }
    return s;
}

Field para_lt(const BlockSet& f, const BlockSet& g) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("para_lt: grid mismatch");
    Field out(f.grid, cplx(0.0));
    const int M = f.max_block();
    for (int m = 1; m <= M; ++m) {
        const Field& lo = f.low(m - 2);
        const Field& hi = g.block(m);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += lo.values[i] * hi.values[i];
    }
    return out;
}

Field para_gt(const BlockSet& f, const BlockSet& g) { return para_lt(g, f); }

Field para_res(const BlockSet& f, const BlockSet& g) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("para_res: grid mismatch");
    Field out(f.grid, cplx(0.0));
    const int M = f.max_block();
    for (int m1 = -1; m1 <= M; ++m1) {
        const Field& a = f.block(m1);
        for (int m2 = std::max(m1 - 1, -1); m2 <= std::min(m1 + 1, M); ++m2) {
            const Field& b = g.block(m2);
            for (std::size_t i = 0; i < out.values.size(); ++i)
                out.values[i] += a.values[i] * b.values[i];
        }
    }
    return out;
}

Field para_lt_gt(const BlockSet& f, const BlockSet& g) {
    Field out = para_lt(f, g);
    const Field gt = para_lt(g, f);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += gt.values[i];
    return out;
}

BonyTriple bony_decompose(const Field& f, const Field& g, const DyadicPartition& p) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("bony_decompose: grid mismatch");
    const BlockSet bf = block_set(f, p);
    const BlockSet bg = block_set(g, p);
    return BonyTriple{para_lt(bf, bg), para_res(bf, bg), para_lt(bg, bf)};
}

Field commutator_R(const BlockSet& f, const BlockSet& g, const BlockSet& h,
                   const DyadicPartition& p) {
    const Field fg = para_lt(f, g);
    Field out = para_res(block_set(fg, p), h);
    const Field gh = para_res(g, h);
    // out -= f * (g o h), with f reassembled from its own blocks
    const Field& ffull = f.low(f.max_block());
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] -= ffull.values[i] * gh.values[i];
    return out;
}

Field commutator_R(const Field& f, const Field& g, const Field& h,
                   const DyadicPartition& p) {
    if (!(f.grid == g.grid) || !(f.grid == h.grid))
        throw std::invalid_argument("commutator_R: grid mismatch");
    return commutator_R(block_set(f, p), block_set(g, p), block_set(h, p), p);
}

Field resonant_oracle(const Field& f, const Field& g, const DyadicPartition& p) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("resonant_oracle: grid mismatch");
    const GridSpec& grid = f.grid;
    if (grid.n > 16)
        throw resource_error("resonant_oracle: O(n^6) cost, refusing n > 16");

    const SpectralField fh = transform(f);
    const SpectralField gh = transform(g);
    const std::size_t sz = grid.size();
    const int n = grid.n, h = grid.half();

    // wrap an integer into the grid wavenumber range [-n/2, n/2)
    auto wrap = [&](int a) {
        int r = (a + h) % n;
        if (r < 0) r += n;
        return r - h;
    };

    SpectralField out(grid);
    for (std::size_t i1 = 0; i1 < sz; ++i1) {
        const cplx c1 = fh.coeffs[i1];
        if (c1 == cplx(0.0)) continue;
        const Ivec3 k1 = grid.wavenumber(i1);
        for (std::size_t i2 = 0; i2 < sz; ++i2) {
            const cplx c2 = gh.coeffs[i2];
            if (c2 == cplx(0.0)) continue;
            const Ivec3 k2 = grid.wavenumber(i2);
            const double w = p.psi_circ(k1, k2);
            if (w == 0.0) continue;
            const Ivec3 k{wrap(k1.k1 + k2.k1), wrap(k1.k2 + k2.k2),
                          wrap(k1.k3 + k2.k3)};
            out.coeffs[grid.flat(k)] += w * c1 * c2;
        }
    }
    return inverse(out);
}

}  // namespace pcgl
