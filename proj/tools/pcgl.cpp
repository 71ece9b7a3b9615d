// pcgl — pseudo-spectral simulation of the stochastic cubic complex
// Ginzburg-Landau equation on the 3-torus at fixed spectral mollification.
//
// Subcommands: constants, sample-noise, drive, solve, compare, study-eps,
// besov, identity-check. Exit codes: 0 ok, 2 validation/parse error,
// 3 blow-up, 4 resource budget.

#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "pcgl/besov.hpp"
#include "pcgl/constants.hpp"
#include "pcgl/drivers.hpp"
#include "pcgl/errors.hpp"
#include "pcgl/io.hpp"
#include "pcgl/noise.hpp"
#include "pcgl/solver.hpp"

namespace fs = std::filesystem;
using namespace pcgl;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
            .count();
    }
};

std::string field_path(const std::string& dir, const std::string& stem, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_%06d.fld", index);
    return dir + "/" + stem + buf;
}

MollifierProfile parse_chi(const std::string& s) {
    if (s == "smooth") return MollifierProfile::smooth;
    if (s == "sharp") return MollifierProfile::sharp;
    throw std::invalid_argument("chi must be smooth or sharp");
}

PartitionProfile parse_partition(const std::string& s) {
    if (s == "smooth") return PartitionProfile::smooth;
    if (s == "sharp") return PartitionProfile::sharp;
    throw std::invalid_argument("partition must be smooth or sharp");
}

CConvention parse_convention(const std::string& s) {
    if (s == "statement") return CConvention::statement;
    if (s == "proof_line") return CConvention::proof_line;
    throw std::invalid_argument("c_convention must be statement or proof_line");
}

int run_constants(const std::string& eps_list_s, double mu, const std::string& nu_s,
                  const std::string& chi_s, bool literal, const std::string& conv_s,
                  std::size_t budget, const std::string& out) {
    const std::vector<double> eps_list = parse_double_list(eps_list_s);
    const cplx nu = parse_complex(nu_s);
    const Mollifier moll{parse_chi(chi_s)};
    const CConvention conv = parse_convention(conv_s);

    CsvTable table;
    table.header = {"eps",    "c1_re",  "c1_im",  "c21_re", "c21_im",
                    "c22_re", "c22_im", "C_re",   "C_im"};
    for (double eps : eps_list) {
        const RenormConstants rc =
            compute_constants(eps, mu, nu, moll, conv, literal, budget);
        table.rows.push_back({format_double(eps), format_double(rc.c1.real()),
                              format_double(rc.c1.imag()),
                              format_double(rc.c21.real()),
                              format_double(rc.c21.imag()),
                              format_double(rc.c22.real()),
                              format_double(rc.c22.imag()),
                              format_double(rc.c_combined.real()),
                              format_double(rc.c_combined.imag())});
    }
    emit_csv(table, out);
    std::cout << "wrote " << out << " (" << table.rows.size() << " rows)\n";
    return 0;
}

int run_sample_noise(double eps, int n, double t, double dt, std::uint64_t seed,
                     const std::string& chi_s, bool time_mollify,
                     const std::string& out_dir) {
    Timer timer;
    const GridSpec grid(n);
    const Mollifier moll{parse_chi(chi_s)};
    const OUParams params{1.0, eps};
    const int steps = int(std::lround(t / dt));
    fs::create_directories(out_dir);

    const std::vector<Field> series = sample_stationary_Z(
        grid, params, moll, dt, steps, NoiseStream{seed}, 0, time_mollify);

    const DyadicPartition partition = build_partition(grid, PartitionProfile::smooth);
    CsvTable energies;
    energies.header = {"t", "m", "block_energy_l2sq"};
    for (int j = 0; j <= steps; ++j) {
        save_field(field_path(out_dir, "z", j), series[std::size_t(j)]);
        const BlockDecomposition blocks = decompose(series[std::size_t(j)], partition);
        for (int m = -1; m <= partition.max_block(); ++m) {
            double e = 0.0;
            for (const cplx& v : blocks.blocks[std::size_t(m + 1)].values)
                e += std::norm(v);
            e /= double(grid.size());
            energies.rows.push_back({format_double(j * dt), std::to_string(m),
                                     format_double(e)});
        }
    }
    emit_csv(energies, out_dir + "/block_energies.csv");

    RunManifest man;
    man.command = "sample-noise";
    man.config.solver.eps = eps;
    man.config.solver.n = n;
    man.config.solver.dt = dt;
    man.config.solver.t_end = t;
    man.config.solver.seed = seed;
    man.config.solver.chi = moll.profile;
    man.config.out_dir = out_dir;
    man.wall_seconds = timer.seconds();
    man.extra.emplace_back("time_mollify", time_mollify ? "true" : "false");
    write_manifest(out_dir + "/manifest.json", man);
    std::cout << "wrote " << steps + 1 << " slices to " << out_dir << "\n";
    return 0;
}

int run_drive(const RunConfig& cfg) {
    Timer timer;
    const SolverConfig& s = cfg.solver;
    const GridSpec grid(s.n);
    const DyadicPartition partition = build_partition(grid, s.partition);
    const Mollifier moll{s.chi};
    const OUParams params{s.mu, s.eps};
    const RenormConstants consts =
        compute_constants(s.eps, s.mu, s.nu, moll, s.c_convention,
                          s.paper_literal_c1, s.c2_budget);
    fs::create_directories(cfg.out_dir);

    DriverEngine engine(grid, params, moll, consts, partition, NoiseStream{s.seed},
                        s.dt, s.burn_in_steps());
    const int steps = s.steps();
    for (int j = 0;; ++j) {
        const DriverSlice& slice = engine.slice();
        for (int c = 0; c < kDriverCount; ++c)
            save_field(field_path(cfg.out_dir, driver_name(DriverTag(c)), j),
                       slice.comp[std::size_t(c)]);
        if (j == steps) break;
        engine.advance();
    }

    RunManifest man;
    man.command = "drive";
    man.config = cfg;
    man.constants = consts;
    man.has_constants = true;
    man.wall_seconds = timer.seconds();
    std::string tags;
    for (int c = 0; c < kDriverCount; ++c) {
        if (c) tags += ",";
        tags += driver_name(DriverTag(c));
    }
    man.extra.emplace_back("components", tags);
    write_manifest(cfg.out_dir + "/manifest.json", man);
    std::cout << "wrote " << steps + 1 << " slices x " << kDriverCount
              << " components to " << cfg.out_dir << "\n";
    return 0;
}

int run_solve(const RunConfig& cfg, const std::string& mode) {
    Timer timer;
    fs::create_directories(cfg.out_dir);
    const SolveResult result = mode == "direct" ? solve_direct(cfg.solver)
                                                : solve_paracontrolled(cfg.solver);

    const GridSpec grid(cfg.solver.n);
    const DyadicPartition partition = build_partition(grid, cfg.solver.partition);
    CsvTable norms;
    norms.header = {"t", "sup_norm", "besov_minus23"};
    for (std::size_t j = 0; j < result.times.size(); ++j) {
        save_field(field_path(cfg.out_dir, "u", int(j)), result.u[j]);
        norms.rows.push_back(
            {format_double(result.times[j], cfg.csv_precision),
             format_double(result.u[j].sup_norm(), cfg.csv_precision),
             format_double(besov_norm(result.u[j],
                                      -2.0 / 3.0 + cfg.solver.kappa_prime,
                                      partition),
                           cfg.csv_precision)});
    }
    emit_csv(norms, cfg.out_dir + "/norms.csv");

    RunManifest man;
    man.command = "solve --mode " + mode;
    man.config = cfg;
    const Mollifier moll{cfg.solver.chi};
    man.constants = compute_constants(cfg.solver.eps, cfg.solver.mu, cfg.solver.nu,
                                      moll, cfg.solver.c_convention,
                                      cfg.solver.paper_literal_c1,
                                      cfg.solver.c2_budget);
    man.has_constants = true;
    man.wall_seconds = timer.seconds();
    write_manifest(cfg.out_dir + "/manifest.json", man);
    std::cout << "solved to t = " << result.final_time << ", wrote "
              << result.times.size() << " slices to " << cfg.out_dir << "\n";
    return 0;
}

int run_compare(const RunConfig& cfg, bool refine) {
    Timer timer;
    fs::create_directories(cfg.out_dir);
    const CompareResult cmp = compare_solvers(cfg.solver);

    CsvTable table;
    table.header = {"t", "sup_diff"};
    for (std::size_t j = 0; j < cmp.times.size(); ++j)
        table.rows.push_back({format_double(cmp.times[j], cfg.csv_precision),
                              format_double(cmp.sup_diff[j], cfg.csv_precision)});
    emit_csv(table, cfg.out_dir + "/difference.csv");
    std::cout << "rel_sup_diff = " << format_double(cmp.rel_sup_diff) << "\n";

    double ratio = 0.0;
    if (refine) {
        RunConfig half = cfg;
        half.solver.dt = cfg.solver.dt / 2.0;
        const CompareResult cmp2 = compare_solvers(half.solver);
        ratio = cmp2.rel_sup_diff > 0.0 ? cmp.rel_sup_diff / cmp2.rel_sup_diff : 0.0;
        std::cout << "rel_sup_diff at dt/2 = " << format_double(cmp2.rel_sup_diff)
                  << ", ratio = " << format_double(ratio) << "\n";
    }

    RunManifest man;
    man.command = "compare";
    man.config = cfg;
    const Mollifier moll{cfg.solver.chi};
    man.constants = compute_constants(cfg.solver.eps, cfg.solver.mu, cfg.solver.nu,
                                      moll, cfg.solver.c_convention,
                                      cfg.solver.paper_literal_c1,
                                      cfg.solver.c2_budget);
    man.has_constants = true;
    man.wall_seconds = timer.seconds();
    man.extra.emplace_back("rel_sup_diff", format_double(cmp.rel_sup_diff));
    if (refine) man.extra.emplace_back("dt_refine_ratio", format_double(ratio));
    write_manifest(cfg.out_dir + "/manifest.json", man);
    return 0;
}

int run_study(const RunConfig& cfg, const std::string& eps_list_s, int seeds) {
    Timer timer;
    fs::create_directories(cfg.out_dir);
    const std::vector<double> eps_list = parse_double_list(eps_list_s);
    const std::vector<StudyRow> rows =
        epsilon_convergence_study(cfg.solver, eps_list, seeds);

    CsvTable table;
    table.header = {"seed", "eps_hi", "eps_lo", "diff_besov", "diff_sup"};
    for (const StudyRow& r : rows)
        table.rows.push_back({std::to_string(r.seed), format_double(r.eps_hi),
                              format_double(r.eps_lo),
                              format_double(r.diff_besov, cfg.csv_precision),
                              format_double(r.diff_sup, cfg.csv_precision)});
    emit_csv(table, cfg.out_dir + "/study_eps.csv");

    // mean differences per eps pair, in list order
    std::cout << "pair means (besov estimator):\n";
    for (std::size_t j = 0; j + 1 < eps_list.size(); ++j) {
        double mean = 0.0;
        int count = 0;
        for (const StudyRow& r : rows)
            if (r.eps_hi == eps_list[j]) {
                mean += r.diff_besov;
                ++count;
            }
        if (count) mean /= count;
        std::cout << "  |u^" << eps_list[j] << " - u^" << eps_list[j + 1]
                  << "| : " << format_double(mean) << "\n";
    }

    RunManifest man;
    man.command = "study-eps";
    man.config = cfg;
    man.wall_seconds = timer.seconds();
    write_manifest(cfg.out_dir + "/manifest.json", man);
    return 0;
}

int run_besov(const std::string& input, double alpha, const std::string& part_s) {
    const Field f = load_field(input);
    const DyadicPartition partition =
        build_partition(f.grid, parse_partition(part_s));
    std::cout << "besov_norm(alpha=" << alpha
              << ") = " << format_double(besov_norm(f, alpha, partition)) << "\n";
    std::cout << "m,weighted_block_sup\n";
    for (const auto& [m, v] : per_block_values(f, alpha, partition))
        std::cout << m << "," << format_double(v) << "\n";
    return 0;
}

int run_identity_check(int n, double eps, std::uint64_t seed, double mu,
                       const std::string& nu_s, const std::string& chi_s,
                       double t) {
    const cplx nu = parse_complex(nu_s);
    const GridSpec grid(n);
    const DyadicPartition partition = build_partition(grid, PartitionProfile::smooth);
    const Mollifier moll{parse_chi(chi_s)};
    const OUParams params{mu, eps};
    const RenormConstants consts = compute_constants(eps, mu, nu, moll);

    const double dt = 1e-3;
    const int steps = int(std::lround(t / dt));
    DriverEngine engine(grid, params, moll, consts, partition, NoiseStream{seed},
                        dt, int(std::lround(1.0 / dt)));
    for (int j = 0; j < steps; ++j) engine.advance();

    // random band-limited (v,w)
    const NoiseStream stream{seed ^ 0x5bf0'3615ULL};
    Field v(grid), w(grid);
    SpectralField vh(grid), wh(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Ivec3 k = grid.wavenumber(i);
        if (k.norm() > n / 4.0) continue;
        vh.coeffs[i] = 0.3 * stream.unit_isotropic(NoiseStream::kTestField, k, 1);
        wh.coeffs[i] = 0.3 * stream.unit_isotropic(NoiseStream::kTestField, k, 2);
    }
    v = inverse(vh);
    w = inverse(wh);

    const IdentityReport rep =
        identity_check(v, w, engine.slice(), consts, nu, partition);
    std::cout << "identity rel_error = " << format_double(rep.rel_error) << "\n";
    return rep.rel_error <= 1e-9 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"paracontrolled stochastic CGL simulation on the 3-torus"};
    app.require_subcommand(1);

    // constants
    std::string eps_list_s = "0.5,0.25,0.125";
    double mu = 1.0;
    std::string nu_s = "1";
    std::string chi_s = "sharp";
    std::string conv_s = "statement";
    bool literal = false;
    std::size_t budget = 18000;
    std::string out = "constants.csv";
    auto* c_cmd = app.add_subcommand("constants", "renormalization constants");
    c_cmd->add_option("--eps-list", eps_list_s);
    c_cmd->add_option("--mu", mu);
    c_cmd->add_option("--nu", nu_s);
    c_cmd->add_option("--chi", chi_s);
    c_cmd->add_option("--convention", conv_s);
    c_cmd->add_flag("--paper-literal-c1", literal);
    c_cmd->add_option("--budget", budget);
    c_cmd->add_option("--out", out);

    // sample-noise
    double sn_eps = 0.5, sn_t = 0.1, sn_dt = 1e-3;
    int sn_n = 16;
    std::uint64_t sn_seed = 1;
    std::string sn_chi = "smooth", sn_out = "noise_out";
    bool sn_tmoll = false;
    auto* sn_cmd = app.add_subcommand("sample-noise", "stationary OU series");
    sn_cmd->add_option("--eps", sn_eps);
    sn_cmd->add_option("--n", sn_n);
    sn_cmd->add_option("--t", sn_t);
    sn_cmd->add_option("--dt", sn_dt);
    sn_cmd->add_option("--seed", sn_seed);
    sn_cmd->add_option("--chi", sn_chi);
    sn_cmd->add_flag("--time-mollify", sn_tmoll);
    sn_cmd->add_option("--out", sn_out);

    // config-driven subcommands
    std::string config_path;
    std::string solve_mode = "para";
    std::string out_dir_override;
    int threads_override = 0;
    bool refine = false;
    std::string st_eps = "0.5,0.25,0.125";
    int st_seeds = 10;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path)->required();
        cmd->add_option("--out", out_dir_override);
        cmd->add_option("--threads", threads_override);
    };

    auto* d_cmd = app.add_subcommand("drive", "build and persist the driving vector");
    add_config(d_cmd);
    auto* s_cmd = app.add_subcommand("solve", "run a solver");
    add_config(s_cmd);
    s_cmd->add_option("--mode", solve_mode)->check(CLI::IsMember({"para", "direct"}));
    auto* cm_cmd = app.add_subcommand("compare", "paracontrolled vs direct");
    add_config(cm_cmd);
    cm_cmd->add_flag("--refine", refine);
    auto* st_cmd = app.add_subcommand("study-eps", "eps-convergence study");
    add_config(st_cmd);
    st_cmd->add_option("--eps", st_eps);
    st_cmd->add_option("--seeds", st_seeds);

    // besov
    std::string b_input;
    double b_alpha = 0.0;
    std::string b_part = "smooth";
    auto* b_cmd = app.add_subcommand("besov", "Besov norm of a stored field");
    b_cmd->add_option("--input", b_input)->required();
    b_cmd->add_option("--alpha", b_alpha)->required();
    b_cmd->add_option("--partition", b_part);

    // identity-check
    int ic_n = 16;
    double ic_eps = 0.25, ic_mu = 1.0, ic_t = 0.05;
    std::uint64_t ic_seed = 7;
    std::string ic_nu = "1+1i", ic_chi = "smooth";
    auto* ic_cmd = app.add_subcommand("identity-check", "exact algebraic identity");
    ic_cmd->add_option("--n", ic_n);
    ic_cmd->add_option("--eps", ic_eps);
    ic_cmd->add_option("--mu", ic_mu);
    ic_cmd->add_option("--nu", ic_nu);
    ic_cmd->add_option("--chi", ic_chi);
    ic_cmd->add_option("--seed", ic_seed);
    ic_cmd->add_option("--t", ic_t);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_cmd->parsed())
            return run_constants(eps_list_s, mu, nu_s, chi_s, literal, conv_s,
                                 budget, out);
        if (sn_cmd->parsed())
            return run_sample_noise(sn_eps, sn_n, sn_t, sn_dt, sn_seed, sn_chi,
                                    sn_tmoll, sn_out);
        if (b_cmd->parsed()) return run_besov(b_input, b_alpha, b_part);
        if (ic_cmd->parsed())
            return run_identity_check(ic_n, ic_eps, ic_seed, ic_mu, ic_nu, ic_chi,
                                      ic_t);

        RunConfig cfg = parse_config(config_path);
        if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
        if (threads_override > 0) cfg.threads = threads_override;
        cfg.validate();
        if (d_cmd->parsed()) return run_drive(cfg);
        if (s_cmd->parsed()) return run_solve(cfg, solve_mode);
        if (cm_cmd->parsed()) return run_compare(cfg, refine);
        if (st_cmd->parsed()) return run_study(cfg, st_eps, st_seeds);
    } catch (const blowup_error& e) {
        std::cerr << "blow-up: " << e.what()
                  << " (survival time " << e.survival_time << ")\n";
        return 3;
    } catch (const resource_error& e) {
        std::cerr << "resource: " << e.what() << "\n";
        return 4;
    } catch (const parse_error& e) {
        std::cerr << "parse: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
