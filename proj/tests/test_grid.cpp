#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pcgl/grid.hpp"
#include "test_util.hpp"

using namespace pcgl;
using namespace pcgl::test;

TEST_CASE("grid spec validates and indexes") {
    CHECK_THROWS_AS(GridSpec(6), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(12), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(4), std::invalid_argument);
    const GridSpec g(8);
    CHECK(g.size() == 512);
    // flat <-> wavenumber is a bijection over the full range
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Ivec3 k = g.wavenumber(i);
        CHECK(g.flat(k) == i);
        CHECK(k.k1 >= -4); CHECK(k.k1 < 4);
    }
    CHECK(g.flat(Ivec3{-4, -4, -4}) == 0);
}

TEST_CASE("transform: DC mode and single mode") {
    const GridSpec g(8);
    const cplx c{1.25, -0.5};
    const SpectralField dc = transform(constant_field(g, c));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.wavenumber(i) == Ivec3{0, 0, 0})
            CHECK(std::abs(dc.coeffs[i] - c) < 1e-14);
        else
            CHECK(std::abs(dc.coeffs[i]) < 1e-14);
    }

    const SpectralField one = transform(mode_field(g, Ivec3{1, 0, 0}));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx want = g.wavenumber(i) == Ivec3{1, 0, 0} ? cplx(1.0) : cplx(0.0);
        CHECK(std::abs(one.coeffs[i] - want) < 1e-13);
    }
}

TEST_CASE("transform roundtrip on random fields") {
    const GridSpec g(16);
    const Field f = random_band_limited(g, 8.0, 42);
    const Field back = inverse(transform(f));
    CHECK(rel_sup_diff(f, back) < 1e-12);
}

TEST_CASE("transform rejects size mismatch") {
    Field f(GridSpec(8));
    f.values.pop_back();
    CHECK_THROWS_AS(transform(f), std::invalid_argument);
}

TEST_CASE("apply_multiplier identity, projection and semigroup") {
    const GridSpec g(8);
    const Field f = random_band_limited(g, 4.0, 7);
    const SpectralField spec = transform(f);

    const Multiplier ident{[](const Ivec3&) { return cplx(1.0); }, "1"};
    CHECK(rel_sup_diff(inverse(apply_multiplier(spec, ident)), f) < 1e-13);

    // 1_{k=0} projects onto the mean
    const Multiplier proj{
        [](const Ivec3& k) { return k == Ivec3{0, 0, 0} ? cplx(1.0) : cplx(0.0); },
        "mean"};
    cplx mean{0.0};
    for (const cplx& v : f.values) mean += v;
    mean /= double(g.size());
    const Field projected = inverse(apply_multiplier(spec, proj));
    for (const cplx& v : projected.values) CHECK(std::abs(v - mean) < 1e-13);

    // e^{-lam t1} then e^{-lam t2} equals e^{-lam (t1+t2)}
    const double mu = 0.7, t1 = 0.05, t2 = 0.125;
    auto heat = [&](double t) {
        return Multiplier{[=](const Ivec3& k) { return std::exp(-lambda_k(mu, k) * t); },
                          "heat"};
    };
    const Field twice =
        inverse(apply_multiplier(apply_multiplier(spec, heat(t1)), heat(t2)));
    const Field once = inverse(apply_multiplier(spec, heat(t1 + t2)));
    CHECK(rel_sup_diff(twice, once) < 1e-12);
}

TEST_CASE("heat_propagate closed forms") {
    const GridSpec g(8);
    const Field f = random_band_limited(g, 4.0, 3);

    CHECK(rel_sup_diff(heat_propagate(f, 0.0, 1.0), f) < 1e-12);
    CHECK_THROWS_AS(heat_propagate(f, -0.1, 1.0), std::invalid_argument);

    // constant field decays by e^{-t}
    const Field c = constant_field(g, cplx(2.0, 1.0));
    const Field ct = heat_propagate(c, 0.3, 1.0);
    for (const cplx& v : ct.values)
        CHECK(std::abs(v - std::exp(-0.3) * cplx(2.0, 1.0)) < 1e-13);

    // single mode: factor e^{-(4 pi^2 (i+mu) + 1) t}
    const double t = 0.1, mu = 1.0;
    const Field m = mode_field(g, Ivec3{1, 0, 0});
    const cplx factor = std::exp(-(4.0 * kPi * kPi * cplx(mu, 1.0) + 1.0) * t);
    const Field mt = heat_propagate(m, t, mu);
    const SpectralField mth = transform(mt);
    CHECK(std::abs(mth.coeffs[g.flat(Ivec3{1, 0, 0})] - factor) < 1e-13);
}

TEST_CASE("heat semigroup and contraction per mode") {
    const GridSpec g(8);
    const double mu = 1.0;
    const Field f = random_band_limited(g, 4.0, 11);
    const Field ab = heat_propagate(heat_propagate(f, 0.04, mu), 0.07, mu);
    const Field once = heat_propagate(f, 0.11, mu);
    CHECK(rel_sup_diff(ab, once) < 1e-12);

    // per-mode modulus decays at least like e^{-t}
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx lam = lambda_k(mu, g.wavenumber(i));
        CHECK(std::abs(std::exp(-lam * 0.5)) <= std::exp(-0.5) + 1e-15);
    }
}

TEST_CASE("linearity of transform and heat") {
    const GridSpec g(8);
    const Field f = random_band_limited(g, 4.0, 21);
    const Field h = random_band_limited(g, 4.0, 22);
    const cplx a{0.3, -1.2}, b{2.0, 0.7};
    Field combo = a * f;
    add_scaled(combo, b, h);
    const Field lhs = heat_propagate(combo, 0.2, 1.0);
    Field rhs = a * heat_propagate(f, 0.2, 1.0);
    add_scaled(rhs, b, heat_propagate(h, 0.2, 1.0));
    CHECK(rel_sup_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("mild_step: zero forcing is the heat flow, k=0 closed form") {
    const GridSpec g(8);
    const double dt = 0.02, mu = 1.0;
    const Field f = random_band_limited(g, 4.0, 5);
    const SpectralField fs = transform(f);
    const SpectralField zero = transform(Field(g, cplx(0.0)));

    const Field stepped = inverse(mild_step(fs, zero, dt, mu));
    CHECK(rel_sup_diff(stepped, heat_propagate(f, dt, mu)) < 1e-12);

    CHECK_THROWS_AS(mild_step(fs, zero, 0.0, mu), std::invalid_argument);

    // state 0, constant forcing c at k=0: one step gives c (1 - e^{-dt})
    const cplx c{0.8, -0.3};
    const SpectralField forced =
        mild_step(zero, transform(constant_field(g, c)), dt, mu);
    CHECK(std::abs(forced.coeffs[g.flat(Ivec3{0, 0, 0})] - c * (-std::expm1(-dt))) <
          1e-14);
}

TEST_CASE("mild_step frequency response approaches the stationary kernel") {
    // forcing e^{2 pi i sigma t} at one mode: steady amplitude 1/(2 pi i sigma + lambda),
    // with O(dt) error halving under dt refinement
    const GridSpec g(8);
    const double mu = 1.0, sigma = 1.3;
    const Ivec3 k{1, 0, 0};
    const cplx lam = lambda_k(mu, k);
    const cplx exact = 1.0 / (cplx(0.0, kTwoPi * sigma) + lam);

    auto steady_error = [&](double dt) {
        const int steps = int(std::lround(8.0 / dt));  // ~8 decay times
        SpectralField state(g);
        SpectralField forcing(g);
        for (int n = 0; n < steps; ++n) {
            forcing.coeffs[g.flat(k)] = std::exp(cplx(0.0, kTwoPi * sigma * n * dt));
            state = mild_step(state, forcing, dt, mu);
        }
        const cplx phase = std::exp(cplx(0.0, kTwoPi * sigma * steps * dt));
        return std::abs(state.coeffs[g.flat(k)] / phase - exact);
    };

    const double e1 = steady_error(0.01);
    const double e2 = steady_error(0.005);
    CHECK(e1 < 0.05 * std::abs(exact));
    const double ratio = e1 / e2;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
}

TEST_CASE("etd2 correction recovers second order on a scalar ODE") {
    // u' = -u + N(u), N(u) = 2u - u^3 at k=0; closed-form logistic reference
    const GridSpec g(8);
    const double mu = 1.0;
    auto run = [&](double dt, bool second_order) {
        const int steps = int(std::lround(1.0 / dt));
        Field u = constant_field(g, cplx(0.5));
        for (int n = 0; n < steps; ++n) {
            auto nonlin = [](const Field& x) {
                Field out(x.grid);
                for (std::size_t i = 0; i < x.values.size(); ++i) {
                    const cplx v = x.values[i];
                    out.values[i] = 2.0 * v - v * v * std::conj(v);
                }
                return out;
            };
            const SpectralField us = transform(u);
            const SpectralField f0 = transform(nonlin(u));
            const SpectralField pred = mild_step(us, f0, dt, mu);
            if (!second_order) {
                u = inverse(pred);
            } else {
                const SpectralField f1 = transform(nonlin(inverse(pred)));
                u = inverse(etd2_correct(pred, f0, f1, dt, mu));
            }
        }
        return u.values[0].real();
    };
    const double r0 = 0.5;
    const double ref = 1.0 / std::sqrt(1.0 + (1.0 / (r0 * r0) - 1.0) * std::exp(-2.0));
    CHECK(std::abs(run(1e-3, false) - ref) < 1e-4);   // first order
    CHECK(std::abs(run(1e-3, true) - ref) < 1e-6);    // second order
    const double e1 = std::abs(run(2e-3, true) - ref);
    const double e2 = std::abs(run(1e-3, true) - ref);
    CHECK(e1 / e2 > 3.0);  // ~4 for a second-order scheme
}

TEST_CASE("expm1_cplx matches direct evaluation away from cancellation") {
    const cplx z{-2.0, 1.5};
    CHECK(std::abs(expm1_cplx(z) - (std::exp(z) - 1.0)) < 1e-15);
    // small argument keeps full relative precision
    const cplx small{-1e-9, 2e-9};
    const cplx series = small + 0.5 * small * small;
    CHECK(std::abs(expm1_cplx(small) - series) < 1e-24);
}
