// Command line driver for the two-population nonlocal advection engine.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "nladv/characteristics.hpp"
#include "nladv/csv.hpp"
#include "nladv/scenarios.hpp"

namespace fs = std::filesystem;
using namespace nladv;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string builtin;
    std::string out_dir;
    int n_cells = 0;       // 0 = keep config value
    double t_end = -1;     // <0 = keep config value
};

ScenarioConfig resolve_config(const CommonOpts& o) {
    ScenarioConfig cfg;
    if (!o.config_path.empty())
        cfg = load_config(o.config_path);
    else if (!o.builtin.empty())
        cfg = builtin_scenario(o.builtin);
    else
        throw ConfigError("give either --config or --builtin");
    if (o.n_cells > 0) cfg.n_cells = o.n_cells;
    if (o.t_end >= 0) cfg.t_end = o.t_end;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_builtin = true) {
    cmd->add_option("--config", o.config_path, "scenario config file (json)");
    if (with_builtin)
        cmd->add_option("--builtin", o.builtin, "builtin scenario name")
            ->check(CLI::IsMember(builtin_names()));
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--n-cells", o.n_cells, "override grid resolution");
    cmd->add_option("--t-end", o.t_end, "override end time");
}

int cmd_run(const CommonOpts& o) {
    ScenarioConfig cfg = resolve_config(o);
    ScenarioResult res = run_scenario(cfg, o.out_dir);
    std::cout << "scenario " << cfg.name << ": " << res.stats.steps << " steps, "
              << res.wall_seconds << " s\n";
    if (res.asymptotic) {
        std::cout << "verdict: " << to_string(res.asymptotic->verdict)
                  << "  E_inf=" << res.asymptotic->E_infinity
                  << "  masses=(" << res.asymptotic->mass1_infinity << ", "
                  << res.asymptotic->mass2_infinity << ")\n";
    }
    for (const auto& f : res.failures) std::cout << "assertion failed: " << f << "\n";
    return res.passed() ? 0 : 1;
}

int cmd_compare(const CommonOpts& o, const std::string& config_b, const std::string& builtin_b) {
    ScenarioConfig a = resolve_config(o);
    ScenarioConfig b;
    if (!config_b.empty())
        b = load_config(config_b);
    else if (!builtin_b.empty())
        b = builtin_scenario(builtin_b);
    else
        throw ConfigError("give --config-b or --builtin-b");
    if (o.n_cells > 0) b.n_cells = o.n_cells;
    if (o.t_end >= 0) b.t_end = o.t_end;

    SensitivityReport rep = location_sensitivity(a, b, o.out_dir);
    std::cout << "long-time mean masses\n"
              << "  config a: " << rep.U_inf_a[0] << "  " << rep.U_inf_a[1] << "\n"
              << "  config b: " << rep.U_inf_b[0] << "  " << rep.U_inf_b[1] << "\n"
              << "  |difference|: " << rep.difference[0] << "  " << rep.difference[1] << "\n";
    return rep.result_a.passed() && rep.result_b.passed() ? 0 : 1;
}

int cmd_converge(const CommonOpts& o, int levels) {
    ScenarioConfig cfg = resolve_config(o);
    ConvergenceReport rep = convergence_study(cfg, levels, o.out_dir);
    std::cout << "n_cells    L1 error     order\n";
    for (size_t l = 0; l < rep.errors.size(); ++l) {
        std::cout << rep.n_cells[l] << "  " << rep.errors[l] << "  ";
        if (l < rep.orders.size()) std::cout << rep.orders[l];
        std::cout << "\n";
    }
    std::cout << "observed order: " << rep.observed_order << "\n";
    return rep.observed_order >= 1.0 ? 0 : 1;
}

int cmd_certify(int n_cells, int k_max, int n_max, const std::string& kernel_csv,
                const std::string& out_dir) {
    PeriodicGrid grid(n_cells);
    BaseKernel rho = kernel_csv.empty() ? BaseKernel::gaussian()
                                        : BaseKernel::tabulated_from_csv(kernel_csv);
    PeriodizedKernel K = PeriodizedKernel::periodize(rho, grid, k_max);
    const auto coeffs = K.fourier_coefficients(n_max);

    bool positive = true;
    for (size_t n = 1; n < coeffs.size(); ++n) positive = positive && coeffs[n] > 0;
    std::cout << "modes 0.." << n_max << ", c_0=" << coeffs[0]
              << ", positivity: " << (positive ? "certified" : "VIOLATED") << "\n";
    if (K.imag_max() > 1e-10)
        std::cout << "warning: kernel is not even (max |Im c_n| = " << K.imag_max() << ")\n";

    // smoothness proxy: decay of sum k^6 c_k^2 partial sums
    double decay_sum = 0;
    for (size_t k = 1; k < coeffs.size(); ++k)
        decay_sum += std::pow(static_cast<double>(k), 6.0) * coeffs[k] * coeffs[k];
    std::cout << "sum k^6 c_k^2 = " << decay_sum << " (finite decay proxy)\n";

    if (!out_dir.empty()) {
        auto out = csv::open_out(fs::path(out_dir) / "certificate.csv");
        K.write_certificate_csv(out);
    }
    return positive ? 0 : 1;
}

int cmd_check_characteristics(int n_cells, double tau, const std::string& out_dir) {
    PeriodicGrid grid(n_cells);
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), grid, 4);
    ScenarioConfig cfg = builtin_scenario("coexistence");
    Field u1 = cfg.initial[0].sample(grid);
    Field u2 = cfg.initial[1].sample(grid);
    auto m1 = cfg.reactions[0].build();
    auto m2 = cfg.reactions[1].build();

    CharacteristicsValidation v = validate_characteristics(u1, u2, K, m1, m2, tau);
    write_validation_report(std::cout, v);
    if (!out_dir.empty()) {
        auto out = csv::open_out(fs::path(out_dir) / "characteristics_report.txt");
        write_validation_report(out, v);
    }
    const bool ok = v.converged && v.contraction_ratio < 1.0 &&
                    v.frozen_field_jacobian.max_rel_defect < 1e-4;
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-population nonlocal advection simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    auto* run_cmd = app.add_subcommand("run", "run one scenario and write its outputs");
    add_common(run_cmd, run_opts);

    CommonOpts cmp_opts;
    std::string config_b, builtin_b;
    auto* cmp_cmd = app.add_subcommand(
        "compare-locations", "run two mass-matched configs and compare long-time masses");
    add_common(cmp_cmd, cmp_opts);
    cmp_cmd->add_option("--config-b", config_b, "second scenario config (json)");
    cmp_cmd->add_option("--builtin-b", builtin_b, "second builtin scenario")
        ->check(CLI::IsMember(builtin_names()));

    CommonOpts cvg_opts;
    int levels = 3;
    auto* cvg_cmd = app.add_subcommand("converge", "grid-doubling convergence study");
    add_common(cvg_cmd, cvg_opts);
    cvg_cmd->add_option("--levels", levels, "number of refinement levels (>= 3)");

    int cert_n = 256, cert_kmax = 4, cert_nmax = 16;
    std::string cert_csv, cert_out;
    auto* cert_cmd =
        app.add_subcommand("certify-kernel", "fourier positivity certificate for a kernel");
    cert_cmd->add_option("--n-cells", cert_n, "grid resolution");
    cert_cmd->add_option("--k-max", cert_kmax, "periodization truncation");
    cert_cmd->add_option("--n-max", cert_nmax, "highest reported mode");
    cert_cmd->add_option("--kernel-csv", cert_csv, "tabulated base kernel (x, rho)");
    cert_cmd->add_option("--out", cert_out, "output directory");

    int chk_n = 128;
    double chk_tau = 0.05;
    std::string chk_out;
    auto* chk_cmd = app.add_subcommand("check-characteristics",
                                       "verify the flow-map construction on a short horizon");
    chk_cmd->add_option("--n-cells", chk_n, "grid resolution");
    chk_cmd->add_option("--tau", chk_tau, "horizon length");
    chk_cmd->add_option("--out", chk_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_opts);
        if (cmp_cmd->parsed()) return cmd_compare(cmp_opts, config_b, builtin_b);
        if (cvg_cmd->parsed()) return cmd_converge(cvg_opts, levels);
        if (cert_cmd->parsed())
            return cmd_certify(cert_n, cert_kmax, cert_nmax, cert_csv, cert_out);
        if (chk_cmd->parsed()) return cmd_check_characteristics(chk_n, chk_tau, chk_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
