// Command-line front end: closed-loop runs, Monte Carlo campaigns, bound prediction and verification.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftac/errors.hpp"
#include "ftac/export.hpp"
#include "ftac/scenario.hpp"
#include "ftac/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Process exit codes.
enum Exit : int {
    ok = 0,
    bound_violated = 1,
    invalid_config = 2,
    gains_rejected = 3,
    io_failure = 4,
    runtime_failure = 5,
};

constexpr const char* kOutputEnv = "FTAC_OUTPUT_DIR";

struct Common {
    std::string scenario = "paper-fault-free";
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    std::optional<double> dt;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--scenario,-s", c.scenario, "Preset name or path to a JSON scenario")->capture_default_str();
    cmd->add_option("--seed", c.seed, "Override the scenario seed");
    cmd->add_option("--duration", c.duration, "Override the run length in seconds");
    cmd->add_option("--dt", c.dt, "Override the integration step in seconds");
    cmd->add_option("--out,-o", c.out, std::string("Output directory (default: $") + kOutputEnv + " or ./out)");
}

ftac::Scenario load(const Common& c) {
    ftac::Scenario s = ftac::load_scenario(c.scenario);
    if (c.seed) s.seed = *c.seed;
    if (c.duration) s.duration = *c.duration;
    if (c.dt) s.dt = *c.dt;
    s.validate();
    return s;
}

fs::path output_dir(const Common& c) {
    if (!c.out.empty()) return c.out;
    if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
    return "out";
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_simulate(const Common& c) {
    const ftac::Scenario s = load(c);
    const ftac::RunTrace trace = ftac::run_scenario(s, s.seed);
    std::string prediction_error;
    const auto prediction = ftac::scenario_prediction(s, 1e-6, true, &prediction_error);

    const fs::path dir = output_dir(c);
    const fs::path csv = dir / (s.name + "-trace.csv");
    const fs::path plot = dir / (s.name + "-plot.json");
    ftac::write_trace_csv(csv, trace);
    ftac::write_json(plot, ftac::plot_data(trace, prediction ? &*prediction : nullptr));

    json j{{"scenario", s.name},
           {"seed", trace.seed},
           {"steps", trace.steps},
           {"rows", trace.rows.size()},
           {"tail", ftac::to_json(ftac::steady_state_stats(trace, s.tail_fraction))},
           {"final_theta_e_deg", trace.rows.back().theta_e_deg},
           {"peak_abs_command", trace.peak_abs_command},
           {"trace_csv", csv.string()},
           {"plot_data", plot.string()}};
    if (prediction) j["prediction"] = ftac::to_json(*prediction);
    print(j);
    return Exit::ok;
}

int cmd_montecarlo(const Common& c, const ftac::CampaignOptions& opt) {
    const ftac::Scenario s = load(c);
    const ftac::CampaignSummary summary = ftac::run_campaign(s, opt);
    const fs::path path = output_dir(c) / (s.name + "-campaign.jsonl");
    ftac::write_campaign_jsonl(path, summary);

    json j{{"scenario", s.name},
           {"instances", summary.instances.size()},
           {"failures", summary.failures},
           {"worst", ftac::to_json(summary.worst)},
           {"all_within_bounds", summary.all_within_bounds()},
           {"campaign_jsonl", path.string()}};
    if (summary.prediction) j["prediction"] = ftac::to_json(*summary.prediction);
    print(j);
    return summary.failures == 0 ? Exit::ok : Exit::runtime_failure;
}

int cmd_predict(const Common& c, double eta, bool no_loop2) {
    const ftac::Scenario s = load(c);
    if (!s.budget) throw ftac::ConfigError("scenario '" + s.name + "' has no uncertainty budget");
    ftac::PredictOptions opt;
    opt.eta = eta;
    opt.loop2 = !no_loop2;
    opt.stated_coefficients = s.stated_coefficients;
    const ftac::Prediction p = ftac::predict(*s.budget, s.gains, opt);
    const fs::path path = output_dir(c) / (s.name + "-bounds.jsonl");
    ftac::write_bound_trace_jsonl(path, p);
    json j = ftac::to_json(p);
    j["bound_trace_jsonl"] = path.string();
    print(j);
    return Exit::ok;
}

int cmd_verify(const Common& c, const ftac::CampaignOptions& opt) {
    const ftac::Scenario s = load(c);
    const ftac::VerifyReport report = ftac::verify(s, opt, false);
    const fs::path path = output_dir(c) / (s.name + "-verify.jsonl");
    ftac::write_campaign_jsonl(path, report.summary);

    json checks = json::array();
    for (const auto& chk : report.checks)
        checks.push_back({{"quantity", chk.quantity},
                          {"simulated", chk.simulated},
                          {"predicted", chk.predicted},
                          {"ratio", chk.ratio()},
                          {"passed", chk.passed}});
    print({{"scenario", s.name},
           {"instances", report.summary.instances.size()},
           {"failures", report.summary.failures},
           {"checks", checks},
           {"passed", report.passed()},
           {"campaign_jsonl", path.string()}});
    if (report.passed()) return Exit::ok;
    // Re-raise the first offending instance for the diagnostic on stderr.
    for (const auto& r : report.summary.instances)
        if (!r.ok || !r.within_bounds)
            std::cerr << "bound violated: instance " << r.index << (r.ok ? "" : " failed: " + r.failure) << '\n';
    return Exit::bound_violated;
}

int cmd_check_gains(const Common& c) {
    const ftac::Scenario s = load(c);
    if (!s.budget) throw ftac::ConfigError("scenario '" + s.name + "' has no uncertainty budget");
    const ftac::RobustCoefficients a = s.controller_coefficients();
    const ftac::GainConditionReport r = ftac::check_gain_conditions(s.gains, a, *s.budget);
    json j = ftac::to_json(r);
    j["a"] = {{"a0", a.a0}, {"a1", a.a1}, {"a2", a.a2}, {"a3", a.a3}};
    print(j);
    return r.passed() ? Exit::ok : Exit::gains_rejected;
}

int cmd_gain_sweep(const Common& c, const ftac::GainGrid& grid, double eta) {
    const ftac::Scenario s = load(c);
    if (!s.budget) throw ftac::ConfigError("scenario '" + s.name + "' has no uncertainty budget");
    const auto rows = ftac::gain_sweep(*s.budget, grid, eta);
    std::cout << std::left << std::setw(8) << "k" << std::setw(8) << "K" << std::setw(10) << "epsilon"
              << std::setw(10) << "gamma" << std::setw(8) << "status" << std::setw(14) << "q_bound" << std::setw(14)
              << "w_bound[d/s]" << std::setw(14) << "theta[deg]" << "iters\n";
    for (const auto& r : rows) {
        std::cout << std::setw(8) << r.gains.k << std::setw(8) << r.K_scale << std::setw(10) << r.gains.epsilon
                  << std::setw(10) << r.gains.gamma << std::setw(8) << (r.passed ? "ok" : "fail");
        if (r.passed)
            std::cout << std::setw(14) << r.q_bound << std::setw(14) << ftac::rad_to_deg(r.omega_bound) << std::setw(14)
                      << ftac::rad_to_deg(r.theta_bound) << r.loop1_iterations << '+' << r.loop2_iterations;
        else
            std::cout << r.failure;
        std::cout << '\n';
    }
    return Exit::ok;
}

int cmd_show(const Common& c, double audit_step) {
    const ftac::Scenario s = load(c);
    const ftac::BudgetAudit a = ftac::audit_budget(s, s.duration, audit_step);
    print({{"scenario", ftac::to_json(s)},
           {"audit",
            {{"rho_J", a.rho_J},
             {"rho_d", a.rho_d},
             {"rho_d_hat", a.rho_d_hat},
             {"rho_v", a.rho_v},
             {"rho_a", a.rho_a},
             {"lambda_min", a.lambda_min},
             {"lambda_max", a.lambda_max},
             {"rho_E", a.rho_E},
             {"J_hat_norm", a.J_hat_norm},
             {"exceeded", a.exceeded}}}});
    return Exit::ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fault-tolerant spacecraft attitude control: simulation and ultimate-bound prediction"};
    app.require_subcommand(1);

    Common common;
    ftac::CampaignOptions campaign;
    double eta = 1e-6;
    bool no_loop2 = false;
    double audit_step = 0.1;
    ftac::GainGrid grid{{0.1, 0.2, 0.3}, {0.5, 0.7, 1.0}, {0.01}, {0.01}};

    auto* simulate = app.add_subcommand("simulate", "Run one closed-loop simulation and export its trace");
    add_common(simulate, common);

    auto* montecarlo = app.add_subcommand("montecarlo", "Run a Monte Carlo campaign");
    add_common(montecarlo, common);
    montecarlo->add_option("-n,--instances", campaign.instances, "Number of instances")->capture_default_str();
    montecarlo->add_option("--threads", campaign.threads, "Worker threads (0: all cores)");

    auto* predict = app.add_subcommand("predict-bounds", "Iterate the ultimate-bound fixed point");
    add_common(predict, common);
    predict->add_option("--eta", eta, "Convergence tolerance")->capture_default_str();
    predict->add_flag("--no-loop2", no_loop2, "Stop after the first loop");

    auto* verify = app.add_subcommand("verify", "Compare campaign tail maxima against the predicted bounds");
    add_common(verify, common);
    verify->add_option("-n,--instances", campaign.instances, "Number of instances")->capture_default_str();
    verify->add_option("--threads", campaign.threads, "Worker threads (0: all cores)");
    verify->add_option("--eta", campaign.eta, "Convergence tolerance")->capture_default_str();
    verify->add_option("--tolerance", campaign.abs_tolerance, "Absolute slack on the predicted bounds")
        ->capture_default_str();

    auto* check = app.add_subcommand("check-gains", "Check the controller gain conditions");
    add_common(check, common);

    auto* sweep = app.add_subcommand("gain-sweep", "Tabulate predicted steady-state bounds over a gain grid");
    add_common(sweep, common);
    sweep->add_option("--k", grid.k, "Sliding-surface gains")->delimiter(',');
    sweep->add_option("--K", grid.K_scale, "Feedback gain scales (K = c·I)")->delimiter(',');
    sweep->add_option("--epsilon", grid.epsilon, "Boundary-layer widths")->delimiter(',');
    sweep->add_option("--gamma", grid.gamma, "Robust-term margins")->delimiter(',');
    sweep->add_option("--eta", eta, "Convergence tolerance")->capture_default_str();

    auto* show = app.add_subcommand("show-scenario", "Print a scenario as JSON with a budget audit");
    add_common(show, common);
    show->add_option("--audit-step", audit_step, "Time step of the audit grid in seconds")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(common);
        if (*montecarlo) return cmd_montecarlo(common, campaign);
        if (*predict) return cmd_predict(common, eta, no_loop2);
        if (*verify) return cmd_verify(common, campaign);
        if (*check) return cmd_check_gains(common);
        if (*sweep) return cmd_gain_sweep(common, grid, eta);
        if (*show) return cmd_show(common, audit_step);
    } catch (const ftac::BoundViolated& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::bound_violated;
    } catch (const ftac::GainConditionViolated& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::gains_rejected;
    } catch (const ftac::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::io_failure;
    } catch (const ftac::ConfigError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return Exit::invalid_config;
    } catch (const ftac::BudgetViolation& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return Exit::invalid_config;
    } catch (const ftac::RankDeficient& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return Exit::invalid_config;
    } catch (const ftac::SingularInertia& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return Exit::invalid_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::runtime_failure;
    }
    return Exit::ok;
}
