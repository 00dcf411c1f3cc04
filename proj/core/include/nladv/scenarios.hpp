#pragma once

#include <array>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nladv/diagnostics.hpp"
#include "nladv/grid.hpp"
#include "nladv/kernel.hpp"
#include "nladv/reaction.hpp"
#include "nladv/solver.hpp"

namespace nladv {

enum class ProfileKind { Bump, Step, Tabulated, Constant };

/// Nonnegative initial density profile on [0, 2*pi).
struct InitialProfile {
    ProfileKind kind = ProfileKind::Constant;
    double center = 0, width = 0, height = 0;  // bump: height * cos^2(pi (x-c)/w) on |x-c| < w/2
    double left = 0, right = 0;                // step: height on [left, right)
    double value = 0;                          // constant
    std::string csv_path;                      // tabulated (x, u) samples

    static InitialProfile bump(double center, double width, double height);
    static InitialProfile step(double left, double right, double height);
    static InitialProfile constant(double value);
    static InitialProfile tabulated(std::string csv_path);

    Field sample(const PeriodicGrid& grid) const;
};

enum class KernelKind { Gaussian, Tabulated, Zero };

struct KernelSpec {
    KernelKind kind = KernelKind::Gaussian;
    int k_max = 4;
    double tail_tol = 1e-12;
    std::string csv_path;

    PeriodizedKernel build(const PeriodicGrid& grid) const;
};

struct ReactionSpec {
    enum class Kind { None, Logistic, ContactInhibition };
    Kind kind = Kind::None;
    double b = 0, cap = 0, gamma = 0, mu = 0;

    static ReactionSpec none();
    static ReactionSpec logistic(double b, double cap);
    static ReactionSpec contact_inhibition(double b, double gamma, double mu);
    std::optional<ReactionModel> build() const;
};

struct DiagnosticsConfig {
    double interval = 0.5;            // diagnostics cadence
    int k_report = 16;
    int n_bins = 32;
    double dirac_frac = 0.05;
    bool segregation_monitor = true;  // overlap < factor * mass1 * mass2 after t_start
    double segregation_factor = 1e-6;
    double segregation_t_start = 1.0;
};

struct ScenarioConfig {
    std::string name;
    int n_cells = 256;
    KernelSpec kernel;
    std::array<ReactionSpec, 2> reactions{};
    std::array<InitialProfile, 2> initial{};
    double t_end = 100.0;
    std::vector<double> snapshot_times;  // profile/histogram output times
    DiagnosticsConfig diagnostics;
    double cfl = 0.45;
    Limiter limiter = Limiter::Minmod;
    double dt_max = std::numeric_limits<double>::infinity();
    long seed = 0;
    std::optional<Verdict> expected_verdict;
};

std::string to_json_string(const ScenarioConfig& cfg);
ScenarioConfig config_from_json_string(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path);

/// Built-in configurations: "coexistence", "exclusion", "sensitivity-a",
/// "sensitivity-b", "advection", "reaction-only".
ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_names();

struct ScenarioResult {
    std::optional<SimState> final_state;
    std::vector<DiagnosticsRecord> records;
    std::optional<AsymptoticReport> asymptotic;
    RunStats stats;
    double wall_seconds = 0;
    std::vector<std::string> failures;  // failed run-time assertions
    bool passed() const { return failures.empty(); }
};

/// Execute the solver + diagnostics pipeline. When out_dir is nonempty, writes
/// per-snapshot profile CSVs (x,u1,u2,v), per-snapshot histogram CSVs, the
/// diagnostics time series, the kernel certificate, an asymptotic report and a
/// run manifest into it.
ScenarioResult run_scenario(const ScenarioConfig& cfg,
                            const std::filesystem::path& out_dir = {});

struct SensitivityReport {
    double mass_initial[2] = {0, 0};     // shared per-species initial mean masses
    double U_inf_a[2] = {0, 0};          // long-time mean masses, config A
    double U_inf_b[2] = {0, 0};          // config B
    double difference[2] = {0, 0};       // |A - B| per species
    ScenarioResult result_a, result_b;
};

/// Run two configurations whose per-species initial masses match (to 1e-10;
/// MassMismatch otherwise) and compare the long-time mean masses.
SensitivityReport location_sensitivity(const ScenarioConfig& cfg_a,
                                       const ScenarioConfig& cfg_b,
                                       const std::filesystem::path& out_dir = {});

struct ConvergenceReport {
    std::vector<int> n_cells;       // coarse .. finest (reference)
    std::vector<double> errors;     // L1 error vs the finest level, per coarse level
    std::vector<double> orders;     // log2(e_l / e_{l+1})
    double observed_order = 0;      // mean of orders
};

/// Grid-doubling study against the finest level as reference, at t = cfg.t_end.
ConvergenceReport convergence_study(const ScenarioConfig& base_cfg, int levels,
                                    const std::filesystem::path& out_dir = {});

} // namespace nladv
