#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftac/bound_predictor.hpp"
#include "ftac/scenario.hpp"

namespace ftac {

/// One recorded sample of a closed-loop run.
struct TraceRow {
    double t = 0.0;
    Vec4 qe{1.0, 0.0, 0.0, 0.0};
    Vec3 omega_e;        // rad/s
    double theta_e_deg = 0.0;
    double s_norm = 0.0;
    double s_hat_norm = 0.0;
    std::vector<double> tau_u;  // saturated command per pair, N·m
    double qtilde_norm = 0.0;
    double wtilde_norm = 0.0;
    bool outside_layer = false;
};

struct RunTrace {
    std::uint64_t seed = 0;
    double dt = 0.0;                  // integration step
    std::size_t decimation = 1;       // rows are every `decimation` steps
    std::size_t steps = 0;            // integration steps taken
    SpacecraftState initial;
    std::vector<TraceRow> rows;
    std::vector<double> peak_abs_command;  // per pair, over every step
    double initial_s_norm = 0.0;
    double peak_s_norm = 0.0;
};

/// Draws (q(0), ω(0)) from the scenario's initial-condition distribution: ω uniform per axis,
/// principal angle uniform in [0, θ_max] about a uniformly distributed axis.
[[nodiscard]] SpacecraftState initial_state(const InitialConditions& ic, Rng& rng);

/// Closed loop truth → sensors → observer → controller → allocation → dynamics at fixed dt.
/// The synthetic observer's error directions get a seed-dependent phase offset.
/// Throws NonFiniteState (with step index) on divergence and RankDeficient from the allocation.
[[nodiscard]] RunTrace run_scenario(const Scenario& s, std::uint64_t seed);

struct SteadyStateStats {
    double theta_e_max_deg = 0.0;
    double omega_e_max = 0.0;  // rad/s
    double qe_vec_max = 0.0;
    double s_max = 0.0;
    double qtilde_max = 0.0;
    double wtilde_max = 0.0;
    std::size_t samples = 0;
};

/// Maxima over the final `tail_fraction` of the recorded rows. Throws EmptyTail on an empty trace.
[[nodiscard]] SteadyStateStats steady_state_stats(const RunTrace& trace, double tail_fraction = 0.2);

/// Per-instance seed derived from the campaign seed and the instance index.
[[nodiscard]] std::uint64_t instance_seed(std::uint64_t campaign_seed, std::size_t index);

struct InstanceResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string failure;  // exception message when !ok
    SteadyStateStats stats;
    double initial_s_norm = 0.0;
    double peak_s_norm = 0.0;
    std::vector<double> peak_abs_command;
    bool within_bounds = true;  // against the prediction, when one exists
};

struct CampaignOptions {
    std::size_t instances = 10;
    unsigned threads = 0;  // 0: hardware concurrency
    double eta = 1e-6;
    bool loop2 = true;
    /// Absolute slack added to the predicted ‖q_e‖ and ‖ω_e‖ (rad/s) bounds in verify(); the θ_e slack is
    /// the matching angle. Covers residual transients when the predicted bound is zero.
    double abs_tolerance = 1e-6;
};

struct CampaignSummary {
    std::string scenario;
    std::uint64_t seed = 0;
    double tail_fraction = 0.2;
    std::vector<InstanceResult> instances;  // ordered by index
    SteadyStateStats worst;                 // maxima over the successful instances
    std::optional<Prediction> prediction;
    std::string prediction_error;  // why there is no prediction
    std::size_t failures = 0;

    [[nodiscard]] bool all_within_bounds() const;
};

[[nodiscard]] std::optional<Prediction> scenario_prediction(const Scenario& s, double eta, bool loop2,
                                                            std::string* error = nullptr);

/// Runs `options.instances` independent instances concurrently. Per-instance failures are recorded
/// and the campaign continues.
[[nodiscard]] CampaignSummary run_campaign(const Scenario& s, const CampaignOptions& options);

struct BoundCheck {
    std::string quantity;
    double simulated = 0.0;
    double predicted = 0.0;
    bool passed = false;
    [[nodiscard]] double ratio() const;  // predicted / simulated (conservativeness)
};

struct VerifyReport {
    CampaignSummary summary;
    std::vector<BoundCheck> checks;
    [[nodiscard]] bool passed() const;
};

/// Predicts the bounds, runs the campaign and compares tail maxima. Throws ConfigError without a budget,
/// GainConditionViolated if the gains fail, and BoundViolated naming the first offending instance and
/// quantity when `throw_on_violation` is set.
[[nodiscard]] VerifyReport verify(const Scenario& s, const CampaignOptions& options, bool throw_on_violation = true);

}  // namespace ftac
