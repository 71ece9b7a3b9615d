#include "pcgl/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace pcgl {

void SolverConfig::validate() const {
    if (mu <= 0.0) throw std::invalid_argument("config: mu must be > 0");
    if (eps <= 0.0 || eps > 1.0)
        throw std::invalid_argument("config: eps must lie in (0,1]");
    if (n < 8 || (n & (n - 1)) != 0)
        throw std::invalid_argument("config: n must be a power of two >= 8");
    if (dt <= 0.0) throw std::invalid_argument("config: dt must be > 0");
    if (t_end <= 0.0) throw std::invalid_argument("config: t_end must be > 0");
    if (burn_in < 0.0) throw std::invalid_argument("config: burn_in must be >= 0");
    if (!(kappa > 0.0 && kappa < kappa_prime && kappa_prime < 1.0 / 18.0))
        throw std::invalid_argument(
            "config: need 0 < kappa < kappa_prime < 1/18");
    if (out_stride < 1)
        throw std::invalid_argument("config: out_stride must be >= 1");
}

int SolverConfig::steps() const { return int(std::lround(t_end / dt)); }
int SolverConfig::burn_in_steps() const { return int(std::lround(burn_in / dt)); }

namespace {

// R(f,g,h) = (f<g) o h - f (g o h) with the cached resonant g o h
Field commutator_from(const BlockSet& bs_f, const BlockSet& bs_g,
                      const BlockSet& bs_h, const Field& f, const Field& res_gh,
                      const DyadicPartition& p) {
    Field out = para_res(block_set(para_lt(bs_f, bs_g), p), bs_h);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] -= f.values[i] * res_gh.values[i];
    return out;
}

void check_finite(const Field& f, double threshold, double t, const char* what) {
    for (const cplx& v : f.values) {
        const double a = std::abs(v);
        if (!std::isfinite(a) || a > threshold)
            throw blowup_error(std::string(what) +
                                   " blew up (non-finite or sup-norm > threshold)",
                               t);
    }
}

Field reconstruct_u(const DriverSlice& slice, const cplx& nu, const Field& v,
                    const Field& w) {
    Field u = slice.field(DriverTag::A);
    add_scaled(u, -nu, slice.field(DriverTag::IAAB));
    add_scaled(u, cplx(1.0), v);
    add_scaled(u, cplx(1.0), w);
    return u;
}

}  // namespace

Forcings assemble_forcings(const Field& v, const Field& w, const Field& vhat,
                           const DriverSlice& slice, const RenormConstants& consts,
                           const cplx& nu, const DyadicPartition& p) {
    const GridSpec& g = slice.grid;
    if (!(v.grid == g) || !(w.grid == g))
        throw std::invalid_argument("assemble_forcings: grid mismatch");
    const cplx nub = std::conj(nu);
    const cplx one{1.0, 0.0};

    const Field& Z = slice.field(DriverTag::A);
    const Field& W = slice.field(DriverTag::IAAB);
    const Field Wb = conj(W);
    const Field u2 = v + w;
    const Field u2b = conj(u2);

    const BlockSet bs_u2 = block_set(u2, p);
    const BlockSet bs_u2b = conj(bs_u2);
    const BlockSet bs_a = linear_combo(-nu, slice.bs_w, one, bs_u2);  // -nu W + u2
    const BlockSet bs_ac = conj(bs_a);
    const BlockSet bs_wb = conj(slice.bs_w);
    const BlockSet bs_iabc = conj(slice.bs_iab);
    const BlockSet bs_iaac = conj(slice.bs_iaa);

    Forcings out;

    // F = -nu { 2 (-nu W + u2) < X^AB + conj(.) < X^AA }
    {
        Field acc = para_lt(bs_a, slice.bs_ab);
        acc = 2.0 * acc;
        add_scaled(acc, one, para_lt(bs_ac, slice.bs_aa));
        out.F = -nu * acc;
    }

    // com = vhat + nu { 2 (-nu W + u2) < X^IAB + conj(.) < X^IAA }
    {
        Field acc = vhat;
        add_scaled(acc, 2.0 * nu, para_lt(bs_a, slice.bs_iab));
        add_scaled(acc, nu, para_lt(bs_ac, slice.bs_iaa));
        out.com = std::move(acc);
    }

    // ---- G1 ... G8, each exactly as displayed ----
    Field G(g, cplx(0.0));

    // G1 = -nu u2^2 conj(u2)
    for (std::size_t i = 0; i < G.values.size(); ++i) {
        const cplx a = u2.values[i];
        G.values[i] += -nu * a * a * std::conj(a);
    }

    // G2 = -nu { u2^2 (conj Z - conj nu conj W) + 2 u2 conj(u2) (Z - nu W) }
    for (std::size_t i = 0; i < G.values.size(); ++i) {
        const cplx a = u2.values[i];
        const cplx zb = std::conj(Z.values[i]);
        const cplx wb = Wb.values[i];
        G.values[i] += -nu * (a * a * (zb - nub * wb) +
                              2.0 * a * std::conj(a) *
                                  (Z.values[i] - nu * W.values[i]));
    }

    // G3 = -nu { u2 (2 nu nub W Wb - 2 nu WZb - 2 nub WbZ - 4 nu X^IABoAB
    //            - nub conj(X^IAAoBB))
    //          + conj(u2) (nu^2 W^2 - 2 nu WZ - 2 nub conj(X^IABoBB)
    //            - 2 nu X^IAAoAB) }
    //      + (nu + 1) u2
    {
        const Field& x_iabab = slice.field(DriverTag::IABoAB);
        const Field& x_iaobb = slice.field(DriverTag::IAAoBB);
        const Field& x_iabbb = slice.field(DriverTag::IABoBB);
        const Field& x_iaoab = slice.field(DriverTag::IAAoAB);
        for (std::size_t i = 0; i < G.values.size(); ++i) {
            const cplx wv = W.values[i];
            const cplx inner_a = 2.0 * nu * nub * wv * std::conj(wv) -
                                 2.0 * nu * slice.wzbar.values[i] -
                                 2.0 * nub * std::conj(slice.wzbar.values[i]) -
                                 4.0 * nu * x_iabab.values[i] -
                                 nub * std::conj(x_iaobb.values[i]);
            const cplx inner_b = nu * nu * wv * wv -
                                 2.0 * nu * slice.wz.values[i] -
                                 2.0 * nub * std::conj(x_iabbb.values[i]) -
                                 2.0 * nu * x_iaoab.values[i];
            G.values[i] += -nu * (u2.values[i] * inner_a +
                                  std::conj(u2.values[i]) * inner_b) +
                           (nu + 1.0) * u2.values[i];
        }
    }

    // G4
    {
        Field acc(g, cplx(0.0));
        const Field& x_iaoab = slice.field(DriverTag::IAAoAB);
        const Field& x_iaobb = slice.field(DriverTag::IAAoBB);
        const Field& x_ibab = slice.field(DriverTag::IABoAB);
        const Field& x_ibbb = slice.field(DriverTag::IABoBB);
        const Field& x_aabab = slice.field(DriverTag::IAABoAB);
        const Field& x_aabbb = slice.field(DriverTag::IAABoBB);

        for (std::size_t i = 0; i < acc.values.size(); ++i) {
            const cplx wv = W.values[i];
            const cplx wbv = std::conj(wv);
            acc.values[i] = -nu * nu * nub * wv * wv * wbv +
                            nu * nu * slice.w2zbar.values[i] +
                            2.0 * nu * nub * slice.wwbarz.values[i] +
                            4.0 * nu * nu * wv * x_ibab.values[i] +
                            2.0 * nub * nub * wbv * std::conj(x_ibbb.values[i]) +
                            2.0 * nu * nub * wbv * x_iaoab.values[i] +
                            nu * nub * wv * std::conj(x_iaobb.values[i]) -
                            2.0 * nu * x_aabab.values[i] -
                            nub * std::conj(x_aabbb.values[i]);
        }
        add_scaled(acc, 4.0 * nu * nu,
                   commutator_from(slice.bs_w, slice.bs_iab, slice.bs_ab, W,
                                   slice.res_iab_ab, p));
        add_scaled(acc, 2.0 * nub * nub,
                   commutator_from(bs_wb, bs_iabc, slice.bs_aa, Wb,
                                   slice.res_iabc_aa, p));
        add_scaled(acc, 2.0 * nu * nub,
                   commutator_from(bs_wb, slice.bs_iaa, slice.bs_ab, Wb,
                                   slice.res_iaa_ab, p));
        add_scaled(acc, nu * nub,
                   commutator_from(slice.bs_w, bs_iaac, slice.bs_aa, W,
                                   slice.res_iaac_aa, p));
        add_scaled(acc, cplx(-2.0) * nu, para_gt(slice.bs_w, slice.bs_ab));
        add_scaled(acc, -nub, para_gt(bs_wb, slice.bs_aa));

        for (std::size_t i = 0; i < G.values.size(); ++i)
            G.values[i] += -nu * acc.values[i] +
                           (nu + 1.0) * (Z.values[i] - nu * W.values[i]);
    }

    // G5 = -nu { -4 nu R(u2, X^IAB, X^AB) - 2 nu R(conj u2, X^IAA, X^AB)
    //            - 2 nub R(conj u2, conj X^IAB, X^AA)
    //            - nub R(u2, conj X^IAA, X^AA) }
    {
        Field acc(g, cplx(0.0));
        add_scaled(acc, cplx(-4.0) * nu,
                   commutator_from(bs_u2, slice.bs_iab, slice.bs_ab, u2,
                                   slice.res_iab_ab, p));
        add_scaled(acc, cplx(-2.0) * nu,
                   commutator_from(bs_u2b, slice.bs_iaa, slice.bs_ab, u2b,
                                   slice.res_iaa_ab, p));
        add_scaled(acc, cplx(-2.0) * nub,
                   commutator_from(bs_u2b, bs_iabc, slice.bs_aa, u2b,
                                   slice.res_iabc_aa, p));
        add_scaled(acc, -nub,
                   commutator_from(bs_u2, bs_iaac, slice.bs_aa, u2,
                                   slice.res_iaac_aa, p));
        add_scaled(G, -nu, acc);
    }

    // G6 = -nu { 2 com o X^AB + conj(com) o X^AA }
    {
        const BlockSet bs_com = block_set(out.com, p);
        Field acc = para_res(bs_com, slice.bs_ab);
        acc = 2.0 * acc;
        add_scaled(acc, one, para_res(conj(bs_com), slice.bs_aa));
        add_scaled(G, -nu, acc);
    }

    // G7 = -nu { 2 w o X^AB + conj(w) o X^AA }
    {
        const BlockSet bs_sw = block_set(w, p);
        Field acc = para_res(bs_sw, slice.bs_ab);
        acc = 2.0 * acc;
        add_scaled(acc, one, para_res(conj(bs_sw), slice.bs_aa));
        add_scaled(G, -nu, acc);
    }

    // G8 = -nu { 2 u2 > X^AB + conj(u2) > X^AA }
    {
        Field acc = para_gt(bs_u2, slice.bs_ab);
        acc = 2.0 * acc;
        add_scaled(acc, one, para_gt(bs_u2b, slice.bs_aa));
        add_scaled(G, -nu, acc);
    }

    (void)consts;  // the constants enter through the driver components
    out.G = std::move(G);
    return out;
}

Field eval_F(const Field& v, const Field& w, const DriverSlice& slice,
             const cplx& nu, const DyadicPartition& p) {
    return assemble_forcings(v, w, v, slice, RenormConstants{}, nu, p).F;
}

Field eval_com(const Field& vhat, const Field& v, const Field& w,
               const DriverSlice& slice, const cplx& nu, const DyadicPartition& p) {
    return assemble_forcings(v, w, vhat, slice, RenormConstants{}, nu, p).com;
}

Field assemble_G(const Field& v, const Field& w, const Field& vhat,
                 const DriverSlice& slice, const RenormConstants& consts,
                 const cplx& nu, const DyadicPartition& p) {
    return assemble_forcings(v, w, vhat, slice, consts, nu, p).G;
}

RenormalizedProducts renormalized_products(const DriverSlice& slice) {
    return RenormalizedProducts{slice.wz, slice.wzbar, slice.w2zbar, slice.wwbarz};
}

IdentityReport identity_check(const Field& v, const Field& w,
                              const DriverSlice& slice,
                              const RenormConstants& consts, const cplx& nu,
                              const DyadicPartition& p) {
    const Forcings f = assemble_forcings(v, w, v, slice, consts, nu, p);
    IdentityReport rep;
    rep.lhs = f.F + f.G;

    const cplx nub = std::conj(nu);
    const Field& Z = slice.field(DriverTag::A);
    const Field& W = slice.field(DriverTag::IAAB);
    const Field& AB = slice.field(DriverTag::AB);
    const Field& AA = slice.field(DriverTag::AA);
    const cplx cterm = 2.0 * (nub * std::conj(consts.c21) + 2.0 * nu * consts.c22);

    Field rhs(slice.grid);
    for (std::size_t i = 0; i < rhs.values.size(); ++i) {
        const cplx q = -nu * W.values[i] + v.values[i] + w.values[i];
        const cplx qb = std::conj(q);
        const cplx u = Z.values[i] + q;
        rhs.values[i] = -nu * (q * q * (std::conj(Z.values[i]) + qb) +
                               2.0 * q * qb * Z.values[i] +
                               2.0 * q * AB.values[i] + qb * AA.values[i] +
                               cterm * u) +
                        (nu + 1.0) * u;
    }
    rep.rhs = std::move(rhs);

    const double den = rep.rhs.sup_norm();
    double num = 0.0;
    for (std::size_t i = 0; i < rep.lhs.values.size(); ++i)
        num = std::max(num, std::abs(rep.lhs.values[i] - rep.rhs.values[i]));
    rep.rel_error = den > 0.0 ? num / den : (num > 0.0 ? INFINITY : 0.0);
    return rep;
}

SolutionState step_system(const SolutionState& state, const DriverSlice& slice,
                          const RenormConstants& consts, const cplx& nu, double mu,
                          double dt, const DyadicPartition& p,
                          double blowup_threshold) {
    const Forcings f =
        assemble_forcings(state.v, state.w, state.vhat, slice, consts, nu, p);
    const SpectralField fF = transform(f.F);
    SolutionState next;
    next.time = state.time + dt;
    next.v = inverse(mild_step(transform(state.v), fF, dt, mu));
    next.w = inverse(mild_step(transform(state.w), transform(f.G), dt, mu));
    next.vhat = inverse(mild_step(transform(state.vhat), fF, dt, mu));
    check_finite(next.v, blowup_threshold, state.time, "v");
    check_finite(next.w, blowup_threshold, state.time, "w");
    return next;
}

DriverSlice make_slice(const DrivingVector& dv, std::size_t index,
                       const DyadicPartition& p) {
    if (index >= dv.times.size())
        throw std::invalid_argument("make_slice: missing driver slice");
    DriverSlice slice;
    slice.t = dv.times[index];
    slice.grid = dv.grid;
    for (DriverTag tag : {DriverTag::A, DriverTag::AA, DriverTag::AB,
                          DriverTag::IAA, DriverTag::IAB, DriverTag::IAAB,
                          DriverTag::BB, DriverTag::AAB})
        slice.field(tag) = dv.series(tag)[index];
    fill_slice_products(slice, dv.constants, p);
    return slice;
}

namespace {

struct OutputCollector {
    int stride;
    int total_steps;
    SolveResult* result;

    void record(int step, double t, const Field& u, const Field* v, const Field* w) {
        if (step % stride != 0 && step != total_steps) return;
        result->times.push_back(t);
        result->u.push_back(u);
        if (v) result->v.push_back(*v);
        if (w) result->w.push_back(*w);
    }
};

// shared paracontrolled loop; `next_slice` advances and returns the slice at
// the new time.
template <typename SliceAt, typename Advance>
SolveResult run_paracontrolled(const SolverConfig& config, SliceAt&& slice_at,
                               Advance&& advance, const DyadicPartition& p,
                               const RenormConstants& consts) {
    const GridSpec grid(config.n);
    const int steps = config.steps();
    const cplx nu = config.nu;

    SolveResult out;
    OutputCollector collect{config.out_stride, steps, &out};

    const DriverSlice* slice = &slice_at();
    SolutionState st;
    st.time = 0.0;
    st.v = constant_field(grid, config.u0) - slice->field(DriverTag::A);
    add_scaled(st.v, nu, slice->field(DriverTag::IAAB));
    st.w = Field(grid, cplx(0.0));
    st.vhat = st.v;

    collect.record(0, 0.0, reconstruct_u(*slice, nu, st.v, st.w), &st.v, &st.w);

    for (int n = 0; n < steps; ++n) {
        if (config.scheme == Scheme::etd1) {
            st = step_system(st, *slice, consts, nu, config.mu, config.dt, p,
                             config.blowup_threshold);
            slice = &advance();
        } else {
            const Forcings f1 =
                assemble_forcings(st.v, st.w, st.vhat, *slice, consts, nu, p);
            const SpectralField f1F = transform(f1.F);
            const SpectralField f1G = transform(f1.G);
            const SpectralField pv =
                mild_step(transform(st.v), f1F, config.dt, config.mu);
            const SpectralField pw =
                mild_step(transform(st.w), f1G, config.dt, config.mu);
            const Field pvf = inverse(pv);
            const Field pwf = inverse(pw);
            slice = &advance();
            const Forcings f2 =
                assemble_forcings(pvf, pwf, pvf, *slice, consts, nu, p);
            st.v = inverse(etd2_correct(pv, f1F, transform(f2.F), config.dt,
                                        config.mu));
            st.w = inverse(etd2_correct(pw, f1G, transform(f2.G), config.dt,
                                        config.mu));
            st.vhat = st.v;
            st.time += config.dt;
            check_finite(st.v, config.blowup_threshold, st.time - config.dt, "v");
            check_finite(st.w, config.blowup_threshold, st.time - config.dt, "w");
        }
        collect.record(n + 1, st.time, reconstruct_u(*slice, nu, st.v, st.w),
                       &st.v, &st.w);
    }
    out.final_time = st.time;
    return out;
}

RenormConstants constants_for(const SolverConfig& config) {
    const Mollifier moll{config.chi};
    return compute_constants(config.eps, config.mu, config.nu, moll,
                             config.c_convention, config.paper_literal_c1,
                             config.c2_budget);
}

void check_resolvable(const SolverConfig& config) {
    if (1.0 / config.eps > config.n / 2.0)
        throw std::invalid_argument(
            "config: eps unresolvable on the grid (need 1/eps <= n/2)");
}

}  // namespace

SolveResult solve_paracontrolled(const SolverConfig& config) {
    config.validate();
    check_resolvable(config);
    const GridSpec grid(config.n);
    const DyadicPartition p = build_partition(grid, config.partition);
    const Mollifier moll{config.chi};
    const OUParams params{config.mu, config.eps};
    const RenormConstants consts = constants_for(config);
    DriverEngine engine(grid, params, moll, consts, p, NoiseStream{config.seed},
                        config.dt, config.burn_in_steps());
    return run_paracontrolled(
        config, [&]() -> const DriverSlice& { return engine.slice(); },
        [&]() -> const DriverSlice& {
            engine.advance();
            return engine.slice();
        },
        p, consts);
}

SolveResult solve_paracontrolled(const SolverConfig& config, const DrivingVector& dv) {
    config.validate();
    if (!(dv.grid == GridSpec(config.n)))
        throw std::invalid_argument("solve: driving vector grid mismatch");
    const int steps = config.steps();
    if (int(dv.times.size()) < steps + 1)
        throw std::invalid_argument("solve: driving vector does not cover [0, t_end]");
    if (std::abs(dv.dt - config.dt) > 1e-12)
        throw std::invalid_argument("solve: driving vector dt mismatch");

    const DyadicPartition p = build_partition(dv.grid, config.partition);
    std::size_t cursor = 0;
    DriverSlice current = make_slice(dv, 0, p);
    return run_paracontrolled(
        config, [&]() -> const DriverSlice& { return current; },
        [&]() -> const DriverSlice& {
            current = make_slice(dv, ++cursor, p);
            return current;
        },
        p, dv.constants);
}

SolveResult solve_direct(const SolverConfig& config) {
    config.validate();
    check_resolvable(config);
    const GridSpec grid(config.n);
    const Mollifier moll{config.chi};
    const OUParams params{config.mu, config.eps};
    const RenormConstants consts = constants_for(config);
    const cplx C = consts.c_combined;
    const cplx nu = config.nu;
    const NoiseStream stream{config.seed};
    const int steps = config.steps();

    SolveResult out;
    OutputCollector collect{config.out_stride, steps, &out};

    Field u = constant_field(grid, config.u0);
    SpectralField uh = transform(u);
    collect.record(0, 0.0, u, nullptr, nullptr);

    const std::size_t sz = grid.size();
    std::vector<cplx> decay(sz), weight(sz);
    for (std::size_t i = 0; i < sz; ++i) {
        const cplx lam = lambda_k(config.mu, grid.wavenumber(i));
        decay[i] = std::exp(-lam * config.dt);
        weight[i] = -expm1_cplx(-lam * config.dt) / lam;
    }

    double t = 0.0;
    for (int n = 0; n < steps; ++n) {
        const SpectralField eta = sample_forcing_increment(grid, params, moll,
                                                           config.dt, stream, n);
        // exact linear + noise flow
        for (std::size_t i = 0; i < sz; ++i)
            uh.coeffs[i] = decay[i] * uh.coeffs[i] + eta.coeffs[i];
        Field mid = inverse(uh);
        // ETD1 correction with N(u) = nu (1 + C - |u|^2) u + u at the updated state
        Field nl(grid);
        for (std::size_t i = 0; i < sz; ++i) {
            const cplx uv = mid.values[i];
            nl.values[i] = nu * (1.0 + C - std::norm(uv)) * uv + uv;
        }
        const SpectralField nlh = transform(nl);
        for (std::size_t i = 0; i < sz; ++i)
            uh.coeffs[i] += weight[i] * nlh.coeffs[i];
        u = inverse(uh);
        check_finite(u, config.blowup_threshold, t, "u");
        t += config.dt;
        collect.record(n + 1, t, u, nullptr, nullptr);
    }
    out.final_time = t;
    return out;
}

CompareResult compare_solvers(const SolverConfig& config) {
    const SolveResult para = solve_paracontrolled(config);
    const SolveResult direct = solve_direct(config);
    CompareResult cmp;
    cmp.times = para.times;
    double sup_ref = 0.0, worst = 0.0;
    for (std::size_t j = 0; j < para.times.size(); ++j) {
        double d = 0.0;
        for (std::size_t i = 0; i < para.u[j].values.size(); ++i)
            d = std::max(d,
                         std::abs(para.u[j].values[i] - direct.u[j].values[i]));
        cmp.sup_diff.push_back(d);
        worst = std::max(worst, d);
        sup_ref = std::max(sup_ref, direct.u[j].sup_norm());
    }
    cmp.sup_ref = sup_ref;
    cmp.rel_sup_diff = sup_ref > 0.0 ? worst / sup_ref : worst;
    return cmp;
}

std::vector<StudyRow> epsilon_convergence_study(const SolverConfig& config,
                                                const std::vector<double>& eps_list,
                                                int seeds) {
    if (eps_list.empty())
        throw std::invalid_argument("study: eps list must not be empty");
    if (seeds < 1) throw std::invalid_argument("study: need at least one seed");
    for (double e : eps_list) {
        SolverConfig probe = config;
        probe.eps = e;
        probe.validate();
        check_resolvable(probe);
    }

    const GridSpec grid(config.n);
    const DyadicPartition p = build_partition(grid, config.partition);
    const double alpha = -2.0 / 3.0 + config.kappa_prime;
    const NoiseStream root{config.seed};

    std::vector<StudyRow> rows;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed_s = root.substream(std::uint64_t(s)).master_seed;
        std::vector<SolveResult> runs;
        for (double e : eps_list) {
            SolverConfig cfg = config;
            cfg.eps = e;
            cfg.seed = seed_s;
            runs.push_back(solve_paracontrolled(cfg));
        }
        for (std::size_t j = 0; j + 1 < eps_list.size(); ++j) {
            StudyRow row;
            row.seed = seed_s;
            row.eps_hi = eps_list[j];
            row.eps_lo = eps_list[j + 1];
            for (std::size_t t = 0; t < runs[j].times.size(); ++t) {
                const Field diff = runs[j].u[t] - runs[j + 1].u[t];
                row.diff_sup = std::max(row.diff_sup, diff.sup_norm());
                row.diff_besov = std::max(row.diff_besov, besov_norm(diff, alpha, p));
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace pcgl
