#include "pcgl/drivers.hpp"

#include <cmath>
#include <stdexcept>

namespace pcgl {

double target_alpha(DriverTag tag) {
    switch (tag) {
        case DriverTag::A: return -0.5;
        case DriverTag::AA: return -1.0;
        case DriverTag::AB: return -1.0;
        case DriverTag::IAA: return 1.0;
        case DriverTag::IAB: return 1.0;
        case DriverTag::IAAB: return 0.5;
        case DriverTag::IAABoA: return 0.0;
        case DriverTag::IAABoB: return 0.0;
        case DriverTag::IAAoAB: return 0.0;
        case DriverTag::IAAoBB: return 0.0;
        case DriverTag::IABoAB: return 0.0;
        case DriverTag::IABoBB: return 0.0;
        case DriverTag::IAABoAB: return -0.5;
        case DriverTag::IAABoBB: return -0.5;
        case DriverTag::BB: return -1.0;
        case DriverTag::AAB: return -1.5;
    }
    throw std::invalid_argument("target_alpha: unknown tag");
}

const char* driver_name(DriverTag tag) {
    switch (tag) {
        case DriverTag::A: return "A";
        case DriverTag::AA: return "AA";
        case DriverTag::AB: return "AB";
        case DriverTag::IAA: return "IAA";
        case DriverTag::IAB: return "IAB";
        case DriverTag::IAAB: return "IAAB";
        case DriverTag::IAABoA: return "IAABoA";
        case DriverTag::IAABoB: return "IAABoB";
        case DriverTag::IAAoAB: return "IAAoAB";
        case DriverTag::IAAoBB: return "IAAoBB";
        case DriverTag::IABoAB: return "IABoAB";
        case DriverTag::IABoBB: return "IABoBB";
        case DriverTag::IAABoAB: return "IAABoAB";
        case DriverTag::IAABoBB: return "IAABoBB";
        case DriverTag::BB: return "BB";
        case DriverTag::AAB: return "AAB";
    }
    throw std::invalid_argument("driver_name: unknown tag");
}

namespace {

// X^AA, X^BB, X^AB, X^AAB from the current Z slice, pointwise
void polynomial_components(const Field& z, const cplx& c1, Field& aa, Field& bb,
                           Field& ab, Field& aab) {
    const GridSpec& g = z.grid;
    aa = Field(g); bb = Field(g); ab = Field(g); aab = Field(g);
    for (std::size_t i = 0; i < z.values.size(); ++i) {
        const cplx zv = z.values[i];
        const cplx zb = std::conj(zv);
        const cplx z2 = zv * zv;
        aa.values[i] = z2;
        bb.values[i] = zb * zb;
        ab.values[i] = zv * zb - c1;
        aab.values[i] = z2 * zb - 2.0 * c1 * zv;
    }
}

// one exponential-integrator update of an I-recursion
void i_update(SpectralField& acc, const SpectralField& forcing, double dt, double mu) {
    const GridSpec& g = acc.grid;
    for (std::size_t i = 0; i < acc.coeffs.size(); ++i) {
        const cplx lam = lambda_k(mu, g.wavenumber(i));
        const cplx decay = std::exp(-lam * dt);
        const cplx weight = -expm1_cplx(-lam * dt) / lam;
        acc.coeffs[i] = decay * acc.coeffs[i] + weight * forcing.coeffs[i];
    }
}

}  // namespace

void fill_slice_products(DriverSlice& slice, const RenormConstants& consts,
                         const DyadicPartition& partition) {
    const GridSpec& g = slice.grid;
    const Field& z = slice.field(DriverTag::A);
    const Field& w = slice.field(DriverTag::IAAB);

    slice.bs_z = block_set(z, partition);
    slice.bs_w = block_set(w, partition);
    slice.bs_aa = block_set(slice.field(DriverTag::AA), partition);
    slice.bs_ab = block_set(slice.field(DriverTag::AB), partition);
    slice.bs_iaa = block_set(slice.field(DriverTag::IAA), partition);
    slice.bs_iab = block_set(slice.field(DriverTag::IAB), partition);

    const BlockSet bs_zbar = conj(slice.bs_z);
    const BlockSet bs_bb = conj(slice.bs_aa);  // X^BB = conj(X^AA)

    // resonants reused by the commutator terms in G4/G5
    slice.res_iab_ab = para_res(slice.bs_iab, slice.bs_ab);
    slice.res_iabc_aa = para_res(conj(slice.bs_iab), slice.bs_aa);
    slice.res_iaa_ab = para_res(slice.bs_iaa, slice.bs_ab);
    slice.res_iaac_aa = para_res(conj(slice.bs_iaa), slice.bs_aa);

    // resonant driver components, renormalized as in the table of distributions
    slice.field(DriverTag::IAABoA) = para_res(slice.bs_w, slice.bs_z);
    slice.field(DriverTag::IAABoB) = para_res(slice.bs_w, bs_zbar);
    slice.field(DriverTag::IAAoAB) = slice.res_iaa_ab;

    Field iaobb = para_res(slice.bs_iaa, bs_bb);
    add_scaled(iaobb, cplx(-1.0), constant_field(g, 2.0 * consts.c21));
    slice.field(DriverTag::IAAoBB) = std::move(iaobb);

    Field iabab = slice.res_iab_ab;
    add_scaled(iabab, cplx(-1.0), constant_field(g, consts.c22));
    slice.field(DriverTag::IABoAB) = std::move(iabab);

    slice.field(DriverTag::IABoBB) = para_res(slice.bs_iab, bs_bb);

    Field aabab = para_res(slice.bs_w, slice.bs_ab);
    add_scaled(aabab, -2.0 * consts.c22, z);
    slice.field(DriverTag::IAABoAB) = std::move(aabab);

    Field aabbb = para_res(slice.bs_w, bs_bb);
    add_scaled(aabbb, -2.0 * consts.c21, conj(z));
    slice.field(DriverTag::IAABoBB) = std::move(aabbb);

    // renormalized products: WZ = W(<+>)Z + X^IAABoA, etc.
    slice.wz = para_lt_gt(slice.bs_w, slice.bs_z) + slice.field(DriverTag::IAABoA);
    slice.wzbar =
        para_lt_gt(slice.bs_w, bs_zbar) + slice.field(DriverTag::IAABoB);

    // W^2 conj(Z) = 2 W X^IAABoB + R(W, conj Z, W) + (W < conj Z)(<+>)W + W (W > conj Z)
    {
        const Field p = para_lt(slice.bs_w, bs_zbar);
        const BlockSet bs_p = block_set(p, partition);
        Field acc = 2.0 * (w * slice.field(DriverTag::IAABoB));
        Field r = para_res(bs_p, slice.bs_w);
        const Field zbar_res_w = para_res(bs_zbar, slice.bs_w);
        for (std::size_t i = 0; i < r.values.size(); ++i)
            r.values[i] -= w.values[i] * zbar_res_w.values[i];
        acc = acc + r;
        acc = acc + para_lt_gt(bs_p, slice.bs_w);
        acc = acc + (w * para_lt(bs_zbar, slice.bs_w));  // W (W > conj Z)
        slice.w2zbar = std::move(acc);
    }

    // W conj(W) Z = conj(W) X^IAABoA + W conj(X^IAABoB) + R(conj W, Z, W)
    //              + (conj W < Z)(<+>)W + W (conj W > Z)
    {
        const Field wbar = conj(w);
        const BlockSet bs_wbar = conj(slice.bs_w);
        const Field q = para_lt(bs_wbar, slice.bs_z);
        const BlockSet bs_q = block_set(q, partition);
        Field acc = wbar * slice.field(DriverTag::IAABoA);
        acc = acc + (w * conj(slice.field(DriverTag::IAABoB)));
        Field r = para_res(bs_q, slice.bs_w);
        const Field z_res_w = para_res(slice.bs_z, slice.bs_w);
        for (std::size_t i = 0; i < r.values.size(); ++i)
            r.values[i] -= wbar.values[i] * z_res_w.values[i];
        acc = acc + r;
        acc = acc + para_lt_gt(bs_q, slice.bs_w);
        acc = acc + (w * para_lt(slice.bs_z, bs_wbar));  // W (conj W > Z)
        slice.wwbarz = std::move(acc);
    }
}

DriverEngine::DriverEngine(const GridSpec& grid, const OUParams& params,
                           const Mollifier& moll, const RenormConstants& consts,
                           const DyadicPartition& partition,
                           const NoiseStream& stream, double dt, int burn_in_steps)
    : grid_(grid),
      params_(params),
      moll_(moll),
      consts_(consts),
      partition_(&partition),
      stream_(stream),
      dt_(dt),
      index_(-std::int64_t(burn_in_steps)),
      z_(grid),
      i_aa_(grid),
      i_ab_(grid),
      i_aab_(grid) {
    if (dt <= 0.0) throw std::invalid_argument("DriverEngine: dt must be > 0");
    if (burn_in_steps < 0)
        throw std::invalid_argument("DriverEngine: burn-in must be >= 0");
    z_ = stationary_draw(grid_, params_, moll_, stream_, index_);
    while (index_ < 0) step_states();
    rebuild_slice();
}

void DriverEngine::step_states() {
    // forcings at the current time, then advance the recursions and Z
    const Field z_phys = inverse(z_);
    Field aa, bb, ab, aab;
    polynomial_components(z_phys, consts_.c1, aa, bb, ab, aab);
    const SpectralField aa_hat = transform(aa);
    const SpectralField ab_hat = transform(ab);
    const SpectralField aab_hat = transform(aab);
    i_update(i_aa_, aa_hat, dt_, params_.mu);
    i_update(i_ab_, ab_hat, dt_, params_.mu);
    i_update(i_aab_, aab_hat, dt_, params_.mu);
    z_ = ou_exact_step(z_, params_, moll_, dt_, stream_, index_);
    ++index_;
}

void DriverEngine::rebuild_slice() {
    slice_.t = double(index_) * dt_;
    slice_.grid = grid_;
    Field z_phys = inverse(z_);
    Field aa, bb, ab, aab;
    polynomial_components(z_phys, consts_.c1, aa, bb, ab, aab);
    slice_.field(DriverTag::A) = std::move(z_phys);
    slice_.field(DriverTag::AA) = std::move(aa);
    slice_.field(DriverTag::BB) = std::move(bb);
    slice_.field(DriverTag::AB) = std::move(ab);
    slice_.field(DriverTag::AAB) = std::move(aab);
    slice_.field(DriverTag::IAA) = inverse(i_aa_);
    slice_.field(DriverTag::IAB) = inverse(i_ab_);
    slice_.field(DriverTag::IAAB) = inverse(i_aab_);
    fill_slice_products(slice_, consts_, *partition_);
}

void DriverEngine::advance() {
    step_states();
    rebuild_slice();
}

DriverSeries integrate_I(const DriverSeries& input, double mu) {
    if (input.times.empty())
        throw std::invalid_argument("integrate_I: empty series");
    if (input.times.front() > 0.0)
        throw std::invalid_argument("integrate_I: series must start at t <= 0");
    const double dt = input.times.size() > 1 ? input.times[1] - input.times[0] : 0.0;
    if (input.times.size() > 1 && dt <= 0.0)
        throw std::invalid_argument("integrate_I: times must increase");

    DriverSeries out;
    out.tag = input.tag;
    out.target_alpha = input.target_alpha;
    SpectralField acc(input.fields.front().grid);
    for (std::size_t j = 0; j < input.times.size(); ++j) {
        if (input.times[j] >= -1e-12) {
            out.times.push_back(input.times[j]);
            out.fields.push_back(inverse(acc));
        }
        if (j + 1 < input.times.size())
            i_update(acc, transform(input.fields[j]), dt, mu);
    }
    return out;
}

DrivingVector build_drivers(const std::vector<double>& z_times,
                            const std::vector<Field>& z_series,
                            const OUParams& params, const RenormConstants& consts,
                            const DyadicPartition& partition) {
    if (z_times.size() != z_series.size() || z_times.empty())
        throw std::invalid_argument("build_drivers: bad z series");
    if (z_times.front() > 0.0)
        throw std::invalid_argument(
            "build_drivers: z series must cover the burn-in (start at t <= 0)");

    const GridSpec grid = z_series.front().grid;
    const double dt = z_times.size() > 1 ? z_times[1] - z_times[0] : 0.0;

    DrivingVector dv;
    dv.grid = grid;
    dv.constants = consts;
    dv.params = params;
    dv.dt = dt;

    SpectralField i_aa(grid), i_ab(grid), i_aab(grid);
    for (std::size_t j = 0; j < z_times.size(); ++j) {
        const Field& z = z_series[j];
        Field aa, bb, ab, aab;
        polynomial_components(z, consts.c1, aa, bb, ab, aab);
        if (z_times[j] >= -1e-12) {
            DriverSlice slice;
            slice.t = z_times[j];
            slice.grid = grid;
            slice.field(DriverTag::A) = z;
            slice.field(DriverTag::AA) = aa;
            slice.field(DriverTag::BB) = bb;
            slice.field(DriverTag::AB) = ab;
            slice.field(DriverTag::AAB) = aab;
            slice.field(DriverTag::IAA) = inverse(i_aa);
            slice.field(DriverTag::IAB) = inverse(i_ab);
            slice.field(DriverTag::IAAB) = inverse(i_aab);
            fill_slice_products(slice, consts, partition);
            dv.times.push_back(slice.t);
            for (int c = 0; c < kDriverCount; ++c)
                dv.comp[std::size_t(c)].push_back(std::move(slice.comp[std::size_t(c)]));
        }
        if (j + 1 < z_times.size()) {
            i_update(i_aa, transform(aa), dt, params.mu);
            i_update(i_ab, transform(ab), dt, params.mu);
            i_update(i_aab, transform(aab), dt, params.mu);
        }
    }
    return dv;
}

std::vector<RegularityRow> regularity_report(const DrivingVector& dv, double kappa,
                                             const DyadicPartition& partition,
                                             double margin) {
    std::vector<RegularityRow> rows;
    const std::size_t vol = dv.grid.size();
    for (int c = 0; c < kDriverCount; ++c) {
        const DriverTag tag = DriverTag(c);
        const double alpha = target_alpha(tag);
        for (std::size_t j = 0; j < dv.times.size(); ++j) {
            const Field& f = dv.comp[std::size_t(c)][j];
            BlockDecomposition blocks = decompose(f, partition);
            RegularityRow row;
            row.tag = tag;
            row.t = dv.times[j];
            row.besov = besov_norm(blocks, alpha - kappa);
            // least-squares slope of log2 ||Delta_m f||_{L^2}^2 against m over
            // blocks with nonzero energy, skipping m = -1 (the k=0 ball)
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int cnt = 0;
            for (int m = 0; m <= partition.max_block(); ++m) {
                double e = 0.0;
                for (const cplx& v : blocks.blocks[std::size_t(m + 1)].values)
                    e += std::norm(v);
                e /= double(vol);
                if (e <= 0.0) continue;
                const double y = std::log2(e);
                sx += m; sy += y; sxx += double(m) * m; sxy += double(m) * y;
                ++cnt;
            }
            if (cnt >= 2) {
                const double det = cnt * sxx - sx * sx;
                row.block_slope = (cnt * sxy - sx * sy) / det;
            }
            row.flagged = std::abs(row.block_slope - (-2.0 * alpha)) > margin;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace pcgl
