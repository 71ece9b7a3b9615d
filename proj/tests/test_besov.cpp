#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pcgl/besov.hpp"
#include "test_util.hpp"

using namespace pcgl;
using namespace pcgl::test;

TEST_CASE("partition of unity sums to one on the grid") {
    for (PartitionProfile prof : {PartitionProfile::smooth, PartitionProfile::sharp}) {
        const GridSpec g(32);
        const DyadicPartition p = build_partition(g, prof);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double s = 0.0;
            for (int m = -1; m <= p.max_block(); ++m) s += p.rho(m, i);
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
        CHECK(p.rho(-1, Ivec3{0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(p.rho(0, Ivec3{0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("smooth profile supports and overlap") {
    // supp rho_{-1} in B(0,4/3), supp rho_0 in B(0,8/3) \ B(0,3/4)
    CHECK(DyadicPartition::profile_value(PartitionProfile::smooth, -1, 4.0 / 3.0) ==
          0.0);
    CHECK(DyadicPartition::profile_value(PartitionProfile::smooth, -1, 0.7) == 1.0);
    CHECK(DyadicPartition::profile_value(PartitionProfile::smooth, 0, 0.75) == 0.0);
    CHECK(DyadicPartition::profile_value(PartitionProfile::smooth, 0, 8.0 / 3.0) ==
          0.0);
    CHECK(DyadicPartition::profile_value(PartitionProfile::smooth, 0, 1.0) > 0.0);

    // at |k| = 2^j, j >= 2, at most two consecutive rho_m are nonzero
    for (int j = 2; j <= 4; ++j) {
        const double r = std::ldexp(1.0, j);
        int nonzero = 0, first = -2, last = -2;
        for (int m = -1; m <= 6; ++m) {
            if (DyadicPartition::profile_value(PartitionProfile::smooth, m, r) > 0.0) {
                if (nonzero == 0) first = m;
                last = m;
                ++nonzero;
            }
        }
        CHECK(nonzero <= 2);
        CHECK(last - first <= 1);
    }
}

TEST_CASE("lp_block: constants live in block -1, single modes scale by rho") {
    const GridSpec g(16);
    const DyadicPartition p = build_partition(g, PartitionProfile::smooth);
    const cplx c{0.4, 1.1};
    const Field cf = constant_field(g, c);
    CHECK(rel_sup_diff(lp_block(cf, -1, p), cf) < 1e-13);
    for (int m = 0; m <= p.max_block(); ++m)
        CHECK(lp_block(cf, m, p).sup_norm() < 1e-13);

    const Ivec3 k{3, 1, 0};
    const Field ek = mode_field(g, k);
    for (int m = -1; m <= p.max_block(); ++m) {
        const Field want = cplx(p.rho(m, k)) * ek;
        CHECK(max_abs_diff(lp_block(ek, m, p), want) < 1e-13);
    }
    CHECK_THROWS_AS(lp_block(ek, p.max_block() + 1, p), std::invalid_argument);
}

TEST_CASE("blocks sum back to the field") {
    const GridSpec g(16);
    const DyadicPartition p = build_partition(g, PartitionProfile::smooth);
    const Field f = random_band_limited(g, 8.0, 33);
    const BlockDecomposition d = decompose(f, p);
    Field sum(g, cplx(0.0));
    for (const Field& b : d.blocks) sum = sum + b;
    CHECK(rel_sup_diff(sum, f) < 1e-12);
}

TEST_CASE("besov_norm closed forms") {
    const GridSpec g(32);
    const DyadicPartition p = build_partition(g, PartitionProfile::smooth);

    // constant: only block -1, norm 2^{-alpha}|c|
    const cplx c{3.0, -4.0};  // |c| = 5
    for (double alpha : {-0.5, 0.0, 1.25})
        CHECK(besov_norm(constant_field(g, c), alpha, p) ==
              doctest::Approx(std::pow(2.0, -alpha) * 5.0).epsilon(1e-12));

    // homogeneity
    const Field f = random_band_limited(g, 8.0, 4);
    const double n1 = besov_norm(f, -0.5, p);
    CHECK(besov_norm(cplx(2.5, 0.0) * f, -0.5, p) ==
          doctest::Approx(2.5 * n1).epsilon(1e-12));

    // mode with rho_3(k) = 1: norm at alpha = -1/2 is 2^{-1.5}
    const Ivec3 k{11, 0, 0};  // |k| in [32/3, 12] so only rho_3 = 1
    REQUIRE(p.rho(3, k) == doctest::Approx(1.0).epsilon(1e-12));
    for (int m = -1; m <= p.max_block(); ++m)
        if (m != 3) REQUIRE(p.rho(m, k) < 1e-12);
    CHECK(besov_norm(mode_field(g, k), -0.5, p) ==
          doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
}

TEST_CASE("besov triangle inequality, alpha-monotonicity, interpolation") {
    const GridSpec g(16);
    const DyadicPartition p = build_partition(g, PartitionProfile::smooth);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        const Field f = random_band_limited(g, 8.0, seed, 10);
        const Field h = random_band_limited(g, 8.0, seed, 20);
        const double alpha = -0.7;
        CHECK(besov_norm(f + h, alpha, p) <=
              besov_norm(f, alpha, p) + besov_norm(h, alpha, p) + 1e-12);

        // ||f||_alpha <= 2^{beta-alpha} ||f||_beta for alpha < beta
        const double beta = 0.9;
        CHECK(besov_norm(f, alpha, p) <=
              std::pow(2.0, beta - alpha) * besov_norm(f, beta, p) + 1e-12);

        // interpolation: alpha = (1-theta) a1 + theta a2
        const double a1 = -1.0, a2 = 1.0, theta = 0.25;
        const double am = (1 - theta) * a1 + theta * a2;
        CHECK(besov_norm(f, am, p) <=
              std::pow(besov_norm(f, a1, p), 1 - theta) *
                      std::pow(besov_norm(f, a2, p), theta) +
                  1e-12);
    }
}

TEST_CASE("heat smoothing estimate stays bounded") {
    // t^delta ||P_t u||_{alpha+2delta} / ||u||_alpha bounded over t and samples
    const GridSpec g(16);
    const DyadicPartition p = build_partition(g, PartitionProfile::smooth);
    const double alpha = -0.5;
    for (double delta : {0.25, 0.5, 1.0}) {
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const Field u = random_band_limited(g, 8.0, seed, 77);
            const double base = besov_norm(u, alpha, p);
            for (double t : {1e-3, 1e-2, 1e-1, 1.0}) {
                const double num =
                    besov_norm(heat_propagate(u, t, 1.0), alpha + 2 * delta, p);
                worst = std::max(worst, std::pow(t, delta) * num / base);
            }
        }
        CHECK(worst < 10.0);
    }
}

TEST_CASE("spacetime norms on synthetic series") {
    const GridSpec g(8);
    const DyadicPartition p = build_partition(g, PartitionProfile::smooth);
    const Field f = random_band_limited(g, 3.0, 9);
    const double alpha = 0.25, delta = 0.5, eta = 0.3, T = 1.0;
    const int nt = 10;

    std::vector<double> times;
    std::vector<Field> constant, linear, decaying;
    for (int j = 0; j <= nt; ++j) {
        const double t = T * j / nt;
        times.push_back(t);
        constant.push_back(f);
        linear.push_back(cplx(t) * f);
        decaying.push_back(cplx(t > 0 ? std::pow(t, -eta) : 0.0) * f);
    }

    // constant in time: zero Hoelder seminorm, E^eta norm = T^eta ||f||
    const SpaceTimeNorms a = spacetime_norms(times, constant, eta, alpha, delta, p);
    CHECK(a.hoelder == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(a.ct_norm == doctest::Approx(besov_norm(f, alpha, p)).epsilon(1e-12));
    CHECK(a.e_eta ==
          doctest::Approx(std::pow(T, eta) * besov_norm(f, alpha, p)).epsilon(1e-12));

    // u_t = t^{-eta} f: E^eta norm equals ||f|| (constant in t)
    std::vector<double> pos_times(times.begin() + 1, times.end());
    std::vector<Field> pos_fields(decaying.begin() + 1, decaying.end());
    const SpaceTimeNorms b =
        spacetime_norms(pos_times, pos_fields, eta, alpha, delta, p);
    CHECK(b.e_eta == doctest::Approx(besov_norm(f, alpha, p)).epsilon(1e-10));

    // u_t = t f: Hoelder seminorm = max_{s<t} (t-s)^{1-delta} ||f||_{alpha-2delta}
    const SpaceTimeNorms c = spacetime_norms(times, linear, eta, alpha, delta, p);
    double want = 0.0;
    const double low = besov_norm(f, alpha - 2 * delta, p);
    for (int i = 0; i <= nt; ++i)
        for (int j = i + 1; j <= nt; ++j)
            want = std::max(want,
                            std::pow(times[std::size_t(j)] - times[std::size_t(i)],
                                     1.0 - delta) *
                                low);
    CHECK(c.hoelder == doctest::Approx(want).epsilon(1e-10));

    CHECK_THROWS_AS(spacetime_norms({}, {}, eta, alpha, delta, p),
                    std::invalid_argument);
    CHECK_THROWS_AS(spacetime_norms({0.0}, {f}, eta, alpha, delta, p),
                    std::invalid_argument);
}
