#include "ftac/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "ftac/errors.hpp"

namespace ftac {

namespace {

double vec_norm(const Vec4& q) { return std::sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3]); }

}  // namespace

SpacecraftState initial_state(const InitialConditions& ic, Rng& rng) {
    if (ic.mode == InitialConditions::Mode::fixed) return {ic.q0, ic.omega0};
    std::uniform_real_distribution<double> w(-ic.omega_max, ic.omega_max);
    std::uniform_real_distribution<double> angle(0.0, ic.theta_max);
    SpacecraftState x;
    x.omega = {w(rng), w(rng), w(rng)};
    const double theta = angle(rng);
    x.q = UnitQuaternion::from_axis_angle(random_unit_vector(rng), theta);
    return x;
}

RunTrace run_scenario(const Scenario& s, std::uint64_t seed) {
    s.validate();
    const InertiaMatrix J(s.inertia);
    const double k = s.gains.k;
    const RobustCoefficients a = s.controller_coefficients();
    const Assumption1Budget observer_budget =
        s.budget ? Assumption1Budget{s.budget->rho_q, s.budget->rho_w}
                 : Assumption1Budget{s.synthetic.q_amplitude, s.synthetic.w_amplitude};

    Rng rng(seed);
    SpacecraftState x = initial_state(s.initial, rng);
    SyntheticErrorProfile synthetic = s.synthetic;
    if (s.observer == ObserverKind::synthetic) {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        synthetic.q_phase += phase(rng);
        synthetic.w_phase += phase(rng);
    }
    DesiredPropagator desired({s.qd0, [&s](double t) { return evaluate(s.omega_d, t); },
                               [&s](double t) { return evaluate_rate(s.omega_d, t); }});
    GyroState gyro{s.initial_bias};
    BiasObserverState bias_state{x.q, {}};
    bool bias_initialized = false;

    RunTrace trace;
    trace.seed = seed;
    trace.dt = s.dt;
    trace.decimation = s.decimation;
    trace.initial = x;
    trace.peak_abs_command.assign(s.bank.size(), 0.0);

    const std::size_t n = s.step_count();
    trace.rows.reserve(n / s.decimation + 2);
    for (std::size_t step = 0;; ++step) {
        const double t = static_cast<double>(step) * s.dt;
        const DesiredState d = desired.current();

        ObserverOutput obs{x.q, x.omega};
        switch (s.observer) {
            case ObserverKind::exact:
                break;
            case ObserverKind::synthetic:
                obs = synthetic_observer(x, observer_budget, synthetic, t);
                break;
            case ObserverKind::bias: {
                const auto [sample, next_gyro] = sensor_sample(x, gyro, s.noise, rng, s.dt);
                gyro = next_gyro;
                if (!bias_initialized) {
                    bias_state = {sample.qm, {}};
                    bias_initialized = true;
                }
                const BiasObserverResult r = bias_observer_step(bias_state, sample, s.bias_gains, s.dt);
                bias_state = r.next;
                obs = r.output;
                break;
            }
        }

        const std::vector<double> e_hat = s.health_estimate.at(t);
        const ModelEstimates model{s.J_hat, evaluate(s.tau_d_hat, t)};
        const ControlOutput control = control_step(obs, d, s.gains, model, a, s.bank, e_hat);
        for (std::size_t i = 0; i < control.tau_u.size(); ++i)
            trace.peak_abs_command[i] = std::max(trace.peak_abs_command[i], std::abs(control.tau_u[i]));

        const TrackingError err = tracking_errors(x, d, k);
        const double s_norm = norm(err.s);
        if (step == 0) trace.initial_s_norm = s_norm;
        trace.peak_s_norm = std::max(trace.peak_s_norm, s_norm);

        if (step % s.decimation == 0 || step == n) {
            const EstimationError est = estimation_error(x, obs);
            TraceRow row;
            row.t = t;
            row.qe = err.qe.as_array();
            row.omega_e = err.omega_e;
            row.theta_e_deg = rad_to_deg(principal_angle(err.qe));
            row.s_norm = s_norm;
            row.s_hat_norm = norm(control.diagnostics.errors.s_hat);
            row.tau_u = control.tau_u;
            row.qtilde_norm = norm(est.q_tilde.vec());
            row.wtilde_norm = norm(est.w_tilde);
            row.outside_layer = control.diagnostics.outside_layer;
            trace.rows.push_back(std::move(row));
        }
        if (step == n) break;

        const auto& tau_u = control.tau_u;
        x = rk4_step(
            J, x, t, s.dt,
            [&](double ts, const SpacecraftState&) { return effective_torque(s.bank, s.health, tau_u, ts); },
            [&](double ts, const SpacecraftState&) { return evaluate(s.disturbance, ts); }, step);
        desired.advance(s.dt);
        trace.steps = step + 1;
    }
    return trace;
}

SteadyStateStats steady_state_stats(const RunTrace& trace, double tail_fraction) {
    const std::size_t start = tail_start_index(trace.rows.size(), tail_fraction);
    SteadyStateStats st;
    for (std::size_t i = start; i < trace.rows.size(); ++i) {
        const TraceRow& r = trace.rows[i];
        st.theta_e_max_deg = std::max(st.theta_e_max_deg, r.theta_e_deg);
        st.omega_e_max = std::max(st.omega_e_max, norm(r.omega_e));
        st.qe_vec_max = std::max(st.qe_vec_max, vec_norm(r.qe));
        st.s_max = std::max(st.s_max, r.s_norm);
        st.qtilde_max = std::max(st.qtilde_max, r.qtilde_norm);
        st.wtilde_max = std::max(st.wtilde_max, r.wtilde_norm);
    }
    st.samples = trace.rows.size() - start;
    return st;
}

std::uint64_t instance_seed(std::uint64_t campaign_seed, std::size_t index) {
    std::uint64_t z = campaign_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

bool CampaignSummary::all_within_bounds() const {
    return failures == 0 && std::all_of(instances.begin(), instances.end(),
                                        [](const InstanceResult& r) { return r.within_bounds; });
}

std::optional<Prediction> scenario_prediction(const Scenario& s, double eta, bool loop2, std::string* error) {
    if (!s.budget) {
        if (error) *error = "scenario has no uncertainty budget";
        return std::nullopt;
    }
    try {
        PredictOptions opt;
        opt.eta = eta;
        opt.loop2 = loop2;
        opt.stated_coefficients = s.stated_coefficients;
        return predict(*s.budget, s.gains, opt);
    } catch (const Error& e) {
        if (error) *error = e.what();
        return std::nullopt;
    }
}

namespace {

struct BoundLimits {
    double q;
    double omega;
    double theta_deg;
};

BoundLimits bound_limits(const Prediction& p, double tol) {
    const double q = p.q_bound + tol;
    return {q, p.omega_bound + tol, rad_to_deg(2.0 * std::asin(std::min(q, 1.0)))};
}

}  // namespace

CampaignSummary run_campaign(const Scenario& s, const CampaignOptions& options) {
    if (options.instances == 0) throw ConfigError("a campaign needs at least one instance");
    s.validate();

    CampaignSummary summary;
    summary.scenario = s.name;
    summary.seed = s.seed;
    summary.tail_fraction = s.tail_fraction;
    summary.prediction = scenario_prediction(s, options.eta, options.loop2, &summary.prediction_error);
    summary.instances.resize(options.instances);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < options.instances; i = next.fetch_add(1)) {
            InstanceResult& r = summary.instances[i];
            r.index = i;
            r.seed = instance_seed(s.seed, i);
            try {
                const RunTrace trace = run_scenario(s, r.seed);
                r.stats = steady_state_stats(trace, s.tail_fraction);
                r.initial_s_norm = trace.initial_s_norm;
                r.peak_s_norm = trace.peak_s_norm;
                r.peak_abs_command = trace.peak_abs_command;
                r.ok = true;
            } catch (const std::exception& e) {
                r.ok = false;
                r.failure = e.what();
            }
        }
    };
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, options.instances));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
        worker();
    }

    for (InstanceResult& r : summary.instances) {
        if (!r.ok) {
            ++summary.failures;
            r.within_bounds = false;
            continue;
        }
        auto& w = summary.worst;
        w.theta_e_max_deg = std::max(w.theta_e_max_deg, r.stats.theta_e_max_deg);
        w.omega_e_max = std::max(w.omega_e_max, r.stats.omega_e_max);
        w.qe_vec_max = std::max(w.qe_vec_max, r.stats.qe_vec_max);
        w.s_max = std::max(w.s_max, r.stats.s_max);
        w.qtilde_max = std::max(w.qtilde_max, r.stats.qtilde_max);
        w.wtilde_max = std::max(w.wtilde_max, r.stats.wtilde_max);
        w.samples = std::max(w.samples, r.stats.samples);
        if (summary.prediction) {
            const BoundLimits lim = bound_limits(*summary.prediction, options.abs_tolerance);
            r.within_bounds = r.stats.qe_vec_max <= lim.q && r.stats.omega_e_max <= lim.omega &&
                              r.stats.theta_e_max_deg <= lim.theta_deg;
        }
    }
    return summary;
}

double BoundCheck::ratio() const {
    if (simulated > 0.0) return predicted / simulated;
    return predicted > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

bool VerifyReport::passed() const {
    return summary.failures == 0 &&
           std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
}

VerifyReport verify(const Scenario& s, const CampaignOptions& options, bool throw_on_violation) {
    if (!s.budget) throw ConfigError("verify needs a scenario with an uncertainty budget");
    PredictOptions popt;
    popt.eta = options.eta;
    popt.loop2 = options.loop2;
    popt.stated_coefficients = s.stated_coefficients;
    const Prediction p = predict(*s.budget, s.gains, popt);

    VerifyReport report;
    report.summary = run_campaign(s, options);
    report.summary.prediction = p;
    const SteadyStateStats& w = report.summary.worst;
    const double theta_bound_deg = rad_to_deg(p.theta_bound);
    const BoundLimits lim = bound_limits(p, options.abs_tolerance);
    report.checks = {{"q_e", w.qe_vec_max, p.q_bound, w.qe_vec_max <= lim.q},
                     {"omega_e", w.omega_e_max, p.omega_bound, w.omega_e_max <= lim.omega},
                     {"theta_e_deg", w.theta_e_max_deg, theta_bound_deg, w.theta_e_max_deg <= lim.theta_deg}};

    if (throw_on_violation) {
        for (const InstanceResult& r : report.summary.instances) {
            if (!r.ok) throw BoundViolated("instance " + std::to_string(r.index) + " failed: " + r.failure, r.index, "run");
            const std::pair<const char*, bool> exceeded[] = {
                {"q_e", r.stats.qe_vec_max > lim.q},
                {"omega_e", r.stats.omega_e_max > lim.omega},
                {"theta_e_deg", r.stats.theta_e_max_deg > lim.theta_deg}};
            for (const auto& [name, bad] : exceeded)
                if (bad)
                    throw BoundViolated("instance " + std::to_string(r.index) + " exceeds the predicted " + name +
                                            " bound",
                                        r.index, name);
        }
    }
    return report;
}

}  // namespace ftac
