#include "pcgl/constants.hpp"

#include <cmath>
#include <stdexcept>

#include "pcgl/errors.hpp"

namespace pcgl {

namespace {

// compensated (Kahan) accumulator for complex sums
struct KahanCplx {
    cplx sum{0.0, 0.0};
    cplx comp{0.0, 0.0};

    void add(const cplx& v) {
        const cplx y = v - comp;
        const cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// lexicographically ordered modes with chi^eps(k) != 0, plus their weights
struct ModeList {
    std::vector<Ivec3> k;
    std::vector<double> chi2;    // chi^eps(k)^2
    std::vector<double> norm2;
};

ModeList support_modes(double eps, const Mollifier& moll) {
    if (eps <= 0.0) throw std::invalid_argument("support_modes: eps must be > 0");
    ModeList m;
    const int reach = int(std::floor(1.0 / eps));
    for (int a = -reach; a <= reach; ++a)
        for (int b = -reach; b <= reach; ++b)
            for (int c = -reach; c <= reach; ++c) {
                const Ivec3 k{a, b, c};
                const double chi = moll.chi_eps(eps, k);
                if (chi == 0.0) continue;
                m.k.push_back(k);
                m.chi2.push_back(chi * chi);
                m.norm2.push_back(k.norm2());
            }
    return m;
}

constexpr double kFourPi2 = 4.0 * kPi * kPi;

}  // namespace

cplx c1_sum(double eps, double mu, const Mollifier& moll, bool paper_literal) {
    const ModeList m = support_modes(eps, moll);
    const double mu_eff = paper_literal ? 1.0 : mu;
    KahanCplx acc;
    for (std::size_t i = 0; i < m.k.size(); ++i)
        acc.add(cplx(m.chi2[i] / (2.0 * (kFourPi2 * mu_eff * m.norm2[i] + 1.0)), 0.0));
    return acc.sum;
}

std::pair<cplx, cplx> c2_sums(double eps, double mu, const Mollifier& moll,
                              std::size_t max_modes) {
    const ModeList m = support_modes(eps, moll);
    const std::size_t n = m.k.size();
    if (n > max_modes) {
        // modes(R) ~ (4 pi / 3) R^3 gives the largest feasible eps
        const double rmax = std::cbrt(3.0 * double(max_modes) / (4.0 * kPi));
        throw resource_error("c2_sums: " + std::to_string(n) +
                             " modes exceed the budget of " +
                             std::to_string(max_modes) +
                             "; largest feasible eps ~ " +
                             std::to_string(1.0 / rmax) +
                             " (raise the budget to go lower)");
    }

    std::vector<double> pref(n);
    for (std::size_t i = 0; i < n; ++i)
        pref[i] = m.chi2[i] / (2.0 * (kFourPi2 * mu * m.norm2[i] + 1.0));

    KahanCplx c21, c22;
    for (std::size_t i = 0; i < n; ++i) {
        const Ivec3 ki = m.k[i];
        const double ni = m.norm2[i];
        for (std::size_t j = 0; j < n; ++j) {
            const Ivec3 kj = m.k[j];
            const double nj = m.norm2[j];
            const double w = pref[i] * pref[j];
            const Ivec3 sum{ki.k1 + kj.k1, ki.k2 + kj.k2, ki.k3 + kj.k3};
            const Ivec3 dif{ki.k1 - kj.k1, ki.k2 - kj.k2, ki.k3 - kj.k3};
            const double s2 = sum.norm2(), d2 = dif.norm2();
            const double a1 = kFourPi2 * mu * (s2 + ni + nj) + 3.0;
            const double b1 = kFourPi2 * (s2 - ni - nj);
            const double a2 = kFourPi2 * mu * (d2 + ni + nj) + 3.0;
            const double b2 = kFourPi2 * (d2 - ni + nj);
            c21.add(w / cplx(a1, b1));
            c22.add(w / cplx(a2, b2));
        }
    }
    return {c21.sum, c22.sum};
}

cplx combined_C(const cplx& c1, const cplx& c21, const cplx& c22, const cplx& nu,
                CConvention convention) {
    if (convention == CConvention::statement)
        return 2.0 * (c1 - std::conj(nu) * std::conj(c21) - 2.0 * nu * c22);
    return c1 - std::conj(nu) * std::conj(c21) + 2.0 * nu * c22;
}

RenormConstants compute_constants(double eps, double mu, const cplx& nu,
                                  const Mollifier& moll, CConvention convention,
                                  bool paper_literal_c1, std::size_t max_modes) {
    if (eps <= 0.0 || eps > 1.0)
        throw std::invalid_argument("compute_constants: eps must lie in (0,1]");
    if (mu <= 0.0) throw std::invalid_argument("compute_constants: mu must be > 0");
    RenormConstants rc;
    rc.eps = eps;
    rc.mu = mu;
    rc.nu = nu;
    rc.paper_literal_c1 = paper_literal_c1;
    rc.convention = convention;
    rc.c1 = c1_sum(eps, mu, moll, paper_literal_c1);
    std::tie(rc.c21, rc.c22) = c2_sums(eps, mu, moll, max_modes);
    rc.c_combined = combined_C(rc.c1, rc.c21, rc.c22, nu, convention);
    return rc;
}

FitResult divergence_fit(const std::vector<double>& eps_list,
                         const std::vector<double>& values, FitModel model) {
    if (eps_list.size() < 4)
        throw std::invalid_argument("divergence_fit: need at least 4 eps points");
    if (eps_list.size() != values.size())
        throw std::invalid_argument("divergence_fit: eps/value size mismatch");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("divergence_fit: eps must strictly decrease");

    std::vector<double> x(eps_list.size()), y(values.size());
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (model == FitModel::power) {
            x[i] = std::log(eps_list[i]);
            y[i] = std::log(std::abs(values[i]));
        } else {
            x[i] = std::log(1.0 / eps_list[i]);
            y[i] = std::abs(values[i]);
        }
    }
    const double n = double(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

McC1Report mc_validate_c1(double eps, double mu, const Mollifier& moll,
                          int samples, std::uint64_t seed, const GridSpec& grid,
                          bool paper_literal) {
    if (samples < 100)
        throw std::invalid_argument("mc_validate_c1: need at least 100 samples");
    if (1.0 / eps > grid.half())
        throw std::invalid_argument(
            "mc_validate_c1: grid does not resolve the mollifier (need 1/eps <= n/2)");

    const OUParams params{mu, eps};
    const NoiseStream root{seed};
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const SpectralField z =
            stationary_draw(grid, params, moll, root.substream(std::uint64_t(s)), 0);
        // Z(0) = sum_k z_k e_k(0) = sum_k z_k
        cplx at_origin{0.0, 0.0};
        for (const cplx& c : z.coeffs) at_origin += c;
        const double v = std::norm(at_origin);
        sum += v;
        sum2 += v * v;
    }
    McC1Report rep;
    rep.mc_mean = sum / samples;
    rep.lattice = c1_sum(eps, mu, moll, paper_literal).real();
    const double var = (sum2 - sum * sum / samples) / (samples - 1);
    rep.std_err = std::sqrt(var / samples);
    rep.z_score = (rep.mc_mean - rep.lattice) / rep.std_err;
    return rep;
}

}  // namespace pcgl
