#include "pcgl/besov.hpp"

#include <cmath>
#include <stdexcept>

namespace pcgl {

namespace {

// smooth monotone transition: 1 for r <= a, 0 for r >= b
double bump_transition(double r, double a, double b) {
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    const double fa = std::exp(-1.0 / (r - a));
    const double fb = std::exp(-1.0 / (b - r));
    return fb / (fa + fb);
}

constexpr double kInnerRadius = 0.75;       // 3/4
constexpr double kOuterRadius = 4.0 / 3.0;  // 4/3

}  // namespace

double DyadicPartition::profile_value(PartitionProfile p, int m, double r) {
    if (p == PartitionProfile::smooth) {
        // rho_m = chi(2^{-m-1} r) - chi(2^{-m} r) telescopes to chi(2^{-M-1} r),
        // with chi the transition bump; rho_{-1} = chi(r)
        if (m == -1) return bump_transition(r, kInnerRadius, kOuterRadius);
        const double lo = bump_transition(std::ldexp(r, -m - 1), kInnerRadius, kOuterRadius);
        const double hi = bump_transition(std::ldexp(r, -m), kInnerRadius, kOuterRadius);
        return lo - hi;
    }
    // sharp: annuli (3/4 2^m, 3/2 2^m], ball |k| <= 3/4 for m = -1
    if (m == -1) return r <= kInnerRadius ? 1.0 : 0.0;
    const double lo = kInnerRadius * std::ldexp(1.0, m);
    const double hi = 1.5 * std::ldexp(1.0, m);
    return (r > lo && r <= hi) ? 1.0 : 0.0;
}

DyadicPartition::DyadicPartition(const GridSpec& grid, PartitionProfile profile)
    : grid_(grid), profile_(profile) {
    max_block_ = int(std::ceil(std::log2(grid.n * std::sqrt(3.0) / 2.0)));
    const std::size_t sz = grid.size();
    table_.assign(std::size_t(max_block_ + 2) * sz, 0.0);
    for (std::size_t i = 0; i < sz; ++i) {
        const double r = grid.wavenumber(i).norm();
        double total = 0.0;
        for (int m = -1; m <= max_block_; ++m) {
            const double v = profile_value(profile, m, r);
            table_[std::size_t(m + 1) * sz + i] = v;
            total += v;
        }
        // grid-side renormalization restores an exact partition of unity
        for (int m = -1; m <= max_block_; ++m) table_[std::size_t(m + 1) * sz + i] /= total;
    }
}

DyadicPartition build_partition(const GridSpec& grid, PartitionProfile profile) {
    return DyadicPartition(grid, profile);
}

double DyadicPartition::psi_circ(const Ivec3& k, const Ivec3& l) const {
    const std::size_t fk = grid_.flat(k), fl = grid_.flat(l);
    double s = 0.0;
    for (int i = -1; i <= max_block_; ++i) {
        const double rk = rho(i, fk);
        if (rk == 0.0) continue;
        for (int j = std::max(i - 1, -1); j <= std::min(i + 1, max_block_); ++j)
            s += rk * rho(j, fl);
    }
    return s;
}

Field lp_block(const Field& f, int m, const DyadicPartition& p) {
    if (m < -1 || m > p.max_block())
        throw std::invalid_argument("lp_block: block index out of range");
    SpectralField spec = transform(f);
    const std::size_t sz = spec.grid.size();
    for (std::size_t i = 0; i < sz; ++i) spec.coeffs[i] *= p.rho(m, i);
    return inverse(spec);
}

BlockDecomposition decompose(const SpectralField& f, const DyadicPartition& p) {
    BlockDecomposition d;
    d.blocks.reserve(p.max_block() + 2);
    const std::size_t sz = f.grid.size();
    SpectralField tmp(f.grid);
    for (int m = -1; m <= p.max_block(); ++m) {
        for (std::size_t i = 0; i < sz; ++i) tmp.coeffs[i] = p.rho(m, i) * f.coeffs[i];
        d.blocks.push_back(inverse(tmp));
    }
    return d;
}

BlockDecomposition decompose(const Field& f, const DyadicPartition& p) {
    return decompose(transform(f), p);
}

double besov_norm(const BlockDecomposition& blocks, double alpha) {
    double norm = 0.0;
    for (std::size_t j = 0; j < blocks.blocks.size(); ++j) {
        const int m = int(j) - 1;
        norm = std::max(norm, std::pow(2.0, m * alpha) * blocks.blocks[j].sup_norm());
    }
    return norm;
}

double besov_norm(const Field& f, double alpha, const DyadicPartition& p) {
    return besov_norm(decompose(f, p), alpha);
}

std::vector<std::pair<int, double>> per_block_values(const Field& f, double alpha,
                                                     const DyadicPartition& p) {
    BlockDecomposition d = decompose(f, p);
    std::vector<std::pair<int, double>> rows;
    for (std::size_t j = 0; j < d.blocks.size(); ++j) {
        const int m = int(j) - 1;
        rows.emplace_back(m, std::pow(2.0, m * alpha) * d.blocks[j].sup_norm());
    }
    return rows;
}

namespace {

double besov_norm_of_difference(const BlockDecomposition& a,
                                const BlockDecomposition& b, double alpha) {
    double norm = 0.0;
    for (std::size_t j = 0; j < a.blocks.size(); ++j) {
        const int m = int(j) - 1;
        double sup = 0.0;
        const auto& av = a.blocks[j].values;
        const auto& bv = b.blocks[j].values;
        for (std::size_t i = 0; i < av.size(); ++i)
            sup = std::max(sup, std::abs(av[i] - bv[i]));
        norm = std::max(norm, std::pow(2.0, m * alpha) * sup);
    }
    return norm;
}

}  // namespace

SpaceTimeNorms spacetime_norms(const std::vector<double>& times,
                               const std::vector<Field>& series, double eta,
                               double alpha, double delta,
                               const DyadicPartition& p) {
    if (series.empty() || times.empty())
        throw std::invalid_argument("spacetime_norms: empty series");
    if (series.size() != times.size())
        throw std::invalid_argument("spacetime_norms: times/series size mismatch");
    if (series.size() < 2)
        throw std::invalid_argument("spacetime_norms: need at least 2 time points");
    if (eta < 0.0 || delta <= 0.0 || delta > 1.0)
        throw std::invalid_argument("spacetime_norms: need eta >= 0, delta in (0,1]");

    std::vector<BlockDecomposition> blocks;
    blocks.reserve(series.size());
    for (const Field& f : series) blocks.push_back(decompose(f, p));

    SpaceTimeNorms out{0.0, 0.0, 0.0, 0.0};
    const double low = alpha - 2.0 * delta;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double nrm = besov_norm(blocks[i], alpha);
        out.ct_norm = std::max(out.ct_norm, nrm);
        if (times[i] > 0.0)
            out.e_eta = std::max(out.e_eta, std::pow(times[i], eta) * nrm);
        for (std::size_t j = i + 1; j < series.size(); ++j) {
            const double gap = times[j] - times[i];
            if (gap <= 0.0)
                throw std::invalid_argument("spacetime_norms: times must increase");
            const double diff = besov_norm_of_difference(blocks[j], blocks[i], low);
            const double quot = diff / std::pow(gap, delta);
            out.hoelder = std::max(out.hoelder, quot);
            if (times[i] > 0.0)
                out.e_eta_delta =
                    std::max(out.e_eta_delta, std::pow(times[i], eta) * quot);
        }
    }
    return out;
}

}  // namespace pcgl
