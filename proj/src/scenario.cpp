#include "ftac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "ftac/errors.hpp"
#include "ftac/rigid_body.hpp"

namespace ftac {

using nlohmann::json;

namespace {

constexpr double kOrbitRate = 1e-3;  // rad/s, frequency of the reference and disturbance signals

Mat3 paper_inertia() {
    Mat3 j{};
    j.data = {8.0, 0.15, -0.27, 0.15, 6.75, -0.1, -0.27, -0.1, 6.25};
    return j;
}

VectorProfile reference_omega_d() {
    return {TimeProfile::cosine(0.0, 2e-3, kOrbitRate), TimeProfile::sine(0.0, 2e-3, kOrbitRate),
            TimeProfile::sine(0.0, 1e-3, kOrbitRate)};
}

VectorProfile reference_disturbance() {
    return {TimeProfile::sine(0.0, 2.5e-6, kOrbitRate), TimeProfile::cosine(0.0, -2.5e-6, kOrbitRate),
            TimeProfile::cosine(0.0, 2.5e-6, kOrbitRate)};
}

UncertaintyBudget reference_budget(double rho_E) {
    UncertaintyBudget b;
    b.rho_q = 2.15e-5;
    b.rho_w = 1.56e-5;
    b.rho_J = 0.5;
    b.rho_d = 3e-6;
    b.rho_d_hat = 3e-6;
    b.lambda_l = 6.0;
    b.lambda_r = 8.5;
    b.rho_v = 0.0022;
    b.rho_a = 2.2e-6;
    b.rho_E = rho_E;
    b.J_hat_norm = 8.0;
    return b;
}

// ---- JSON helpers -------------------------------------------------------------------------

double get_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

Mat3 mat3_from_json(const json& j) {
    if (j.is_number()) return j.get<double>() * Mat3::identity();
    if (!j.is_array() || j.size() != 3) throw ConfigError("3x3 matrix expected");
    Mat3 m{};
    for (std::size_t r = 0; r < 3; ++r) {
        if (!j[r].is_array() || j[r].size() != 3) throw ConfigError("3x3 matrix expected");
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

json mat3_to_json(const Mat3& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
    return rows;
}

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("3-vector expected");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to_json(const Vec3& v) { return {v.x, v.y, v.z}; }

UnitQuaternion quat_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ConfigError("quaternion [q0, q1, q2, q3] expected");
    return UnitQuaternion(Vec4{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()});
}

json quat_to_json(const UnitQuaternion& q) {
    const auto a = q.as_array();
    return {a[0], a[1], a[2], a[3]};
}

TimeProfile profile_from_json(const json& j) {
    if (j.is_number()) return TimeProfile::constant(j.get<double>());
    if (!j.is_object()) throw ConfigError("time profile must be a number or an object");
    TimeProfile p;
    p.kind = profile_kind_from_string(j.value("type", std::string("constant")));
    if (p.kind == TimeProfile::Kind::constant) {
        p.offset = j.contains("value") ? j.at("value").get<double>() : get_or(j, "offset", 0.0);
        return p;
    }
    p.offset = get_or(j, "offset", 0.0);
    p.amplitude = get_or(j, "amplitude", 0.0);
    p.frequency = get_or(j, "frequency", 0.0);
    p.phase = get_or(j, "phase", 0.0);
    return p;
}

json profile_to_json(const TimeProfile& p) {
    if (p.kind == TimeProfile::Kind::constant) return {{"type", "constant"}, {"value", p.offset}};
    return {{"type", to_string(p.kind)},
            {"offset", p.offset},
            {"amplitude", p.amplitude},
            {"frequency", p.frequency},
            {"phase", p.phase}};
}

std::vector<TimeProfile> profiles_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("list of time profiles expected");
    std::vector<TimeProfile> out;
    for (const auto& e : j) out.push_back(profile_from_json(e));
    return out;
}

VectorProfile vector_profile_from_json(const json& j) {
    const auto v = profiles_from_json(j);
    if (v.size() != 3) throw ConfigError("vector profile needs exactly 3 components");
    return {v[0], v[1], v[2]};
}

template <typename Range>
json profiles_to_json(const Range& r) {
    json a = json::array();
    for (const auto& p : r) a.push_back(profile_to_json(p));
    return a;
}

std::vector<double> time_grid(double horizon, double step) {
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
    g.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g.push_back(static_cast<double>(i) * step);
    return g;
}

}  // namespace

std::string to_string(ObserverKind kind) {
    switch (kind) {
        case ObserverKind::exact:
            return "exact";
        case ObserverKind::synthetic:
            return "synthetic";
        case ObserverKind::bias:
            return "bias";
    }
    return "exact";
}

ObserverKind observer_kind_from_string(const std::string& name) {
    if (name == "exact") return ObserverKind::exact;
    if (name == "synthetic") return ObserverKind::synthetic;
    if (name == "bias") return ObserverKind::bias;
    throw ConfigError("unknown observer type '" + name + "'");
}

ActuatorBank paper_actuator_bank() {
    const double c = 1.0 / std::numbers::sqrt3;
    return ActuatorBank({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {c, c, c}}, 0.02);
}

void Scenario::validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(duration >= 10.0 * dt)) throw ConfigError("duration must be at least 10 steps");
    if (decimation == 0) throw ConfigError("decimation must be at least 1");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ConfigError("tail_fraction must lie in (0, 1]");
    (void)InertiaMatrix(inertia);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = r + 1; c < 3; ++c)
            if (std::abs(J_hat(r, c) - J_hat(c, r)) > 1e-12) throw ConfigError("J_hat must be symmetric");
    gains.validate();
    if (health.size() != bank.size() || health_estimate.size() != bank.size())
        throw ConfigError("health profiles must have one entry per thruster pair");
    if (budget) budget->validate();
    if (observer == ObserverKind::synthetic) {
        if (synthetic.q_amplitude < 0.0 || synthetic.w_amplitude < 0.0 || !(synthetic.q_amplitude < 1.0))
            throw BudgetViolation("synthetic observer amplitudes must lie in [0, 1)");
        if (budget && (synthetic.q_amplitude > budget->rho_q || synthetic.w_amplitude > budget->rho_w))
            throw BudgetViolation("synthetic observer error exceeds the declared rho_q / rho_w");
    }
    if (observer == ObserverKind::bias && !(bias_gains.k_o > 0.0 && bias_gains.k_b > 0.0))
        throw ConfigError("bias observer gains must be positive");
    if (initial.omega_max < 0.0 || initial.theta_max < 0.0) throw ConfigError("initial-condition ranges must be >= 0");
    const auto grid = time_grid(duration, std::max(dt, duration / 2000.0));
    check_full_actuation(bank, health_estimate, grid);
}

std::size_t Scenario::step_count() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

RobustCoefficients Scenario::controller_coefficients() const {
    if (stated_coefficients) return *stated_coefficients;
    if (budget) return robust_coefficients(*budget, gains.k);
    return {};
}

Scenario paper_fault_free() {
    Scenario s;
    s.name = "paper-fault-free";
    s.inertia = paper_inertia();
    s.J_hat = diag(8.0, 7.0, 6.0);
    s.tau_d_hat = zero_profile();
    s.qd0 = UnitQuaternion::identity();
    s.omega_d = reference_omega_d();
    s.disturbance = reference_disturbance();
    s.bank = paper_actuator_bank();
    s.health = HealthProfile::healthy(4);
    s.health_estimate = HealthProfile::healthy(4);
    s.noise = {deg_to_rad(0.01), 3e-6, 1e-7};
    s.initial_bias = {deg_per_hour_to_rad_per_sec(-5.0), deg_per_hour_to_rad_per_sec(15.0),
                      deg_per_hour_to_rad_per_sec(-10.0)};
    s.observer = ObserverKind::synthetic;
    s.synthetic.q_amplitude = 2.15e-5;
    s.synthetic.w_amplitude = 1.56e-5;
    s.bias_gains = {1.0, 0.1};
    s.gains = {0.2, 0.7 * Mat3::identity(), 0.01, 0.01};
    s.budget = reference_budget(0.0);
    s.initial = {};
    s.duration = 600.0;
    s.dt = 0.01;
    s.seed = 1;
    return s;
}

Scenario paper_faulty() {
    Scenario s = paper_fault_free();
    s.name = "paper-faulty";
    s.health.indicators = {TimeProfile::abs_sine(1.0, -0.1, 1.0), TimeProfile::cosine(0.7, -0.1, 1.0),
                           TimeProfile::constant(0.0), TimeProfile::sine(0.5, -0.1, 1.0)};
    s.health_estimate.indicators = {TimeProfile::constant(1.0), TimeProfile::constant(1.0),
                                    TimeProfile::constant(0.0), TimeProfile::constant(0.7)};
    s.budget = reference_budget(0.08);
    return s;
}

Scenario zero_uncertainty() {
    Scenario s = paper_fault_free();
    s.name = "zero-uncertainty";
    s.J_hat = s.inertia;
    s.tau_d_hat = s.disturbance;
    s.observer = ObserverKind::exact;
    s.synthetic = {};
    const InertiaMatrix j(s.inertia);
    UncertaintyBudget b;
    b.lambda_l = j.lambda_min();
    b.lambda_r = j.lambda_max();
    b.J_hat_norm = spectral_norm(s.J_hat);
    s.budget = b;
    s.initial.mode = InitialConditions::Mode::fixed;
    s.initial.q0 = UnitQuaternion::from_axis_angle({1.0, 1.0, 1.0}, deg_to_rad(5.0));
    s.initial.omega0 = {};
    s.duration = 200.0;
    return s;
}

std::vector<std::string> preset_names() { return {"paper-fault-free", "paper-faulty", "zero-uncertainty"}; }

Scenario load_scenario(const std::string& name_or_path) {
    if (name_or_path == "paper-fault-free") return paper_fault_free();
    if (name_or_path == "paper-faulty") return paper_faulty();
    if (name_or_path == "zero-uncertainty") return zero_uncertainty();
    std::ifstream in(name_or_path);
    if (!in) throw IoError("cannot open scenario '" + name_or_path + "' (not a preset or readable file)");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("scenario '" + name_or_path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

UncertaintyBudget budget_from_json(const json& j, const Mat3& J_hat) {
    UncertaintyBudget b;
    b.rho_q = get_or(j, "rho_q", 0.0);
    b.rho_w = get_or(j, "rho_w", 0.0);
    b.rho_J = get_or(j, "rho_J", 0.0);
    b.rho_d = get_or(j, "rho_d", 0.0);
    b.rho_d_hat = get_or(j, "rho_d_hat", 0.0);
    b.lambda_l = get_or(j, "lambda_l", 1.0);
    b.lambda_r = get_or(j, "lambda_r", 1.0);
    b.rho_v = get_or(j, "rho_v", 0.0);
    b.rho_a = get_or(j, "rho_a", 0.0);
    b.rho_E = get_or(j, "rho_E", 0.0);
    b.J_hat_norm = j.contains("J_hat_norm") ? j.at("J_hat_norm").get<double>() : spectral_norm(J_hat);
    return b;
}

json to_json(const UncertaintyBudget& b) {
    return {{"rho_q", b.rho_q},       {"rho_w", b.rho_w},       {"rho_J", b.rho_J},
            {"rho_d", b.rho_d},       {"rho_d_hat", b.rho_d_hat}, {"lambda_l", b.lambda_l},
            {"lambda_r", b.lambda_r}, {"rho_v", b.rho_v},       {"rho_a", b.rho_a},
            {"rho_E", b.rho_E},       {"J_hat_norm", b.J_hat_norm}};
}

Scenario scenario_from_json(const json& j) {
    try {
        Scenario s;
        s.name = j.value("name", std::string("custom"));
        if (j.contains("inertia")) s.inertia = mat3_from_json(j.at("inertia"));
        s.J_hat = s.inertia;
        if (j.contains("model")) {
            const auto& m = j.at("model");
            if (m.contains("J_hat")) s.J_hat = mat3_from_json(m.at("J_hat"));
            if (m.contains("tau_d_hat")) s.tau_d_hat = vector_profile_from_json(m.at("tau_d_hat"));
        }
        if (j.contains("desired")) {
            const auto& d = j.at("desired");
            if (d.contains("q_d0")) s.qd0 = quat_from_json(d.at("q_d0"));
            if (d.contains("omega_d")) s.omega_d = vector_profile_from_json(d.at("omega_d"));
        }
        if (j.contains("disturbance")) s.disturbance = vector_profile_from_json(j.at("disturbance"));
        if (j.contains("actuators")) {
            const auto& a = j.at("actuators");
            const double tau_max = get_or(a, "tau_max", 0.02);
            if (a.contains("D"))
                s.bank = ActuatorBank::from_rows(a.at("D").get<std::vector<std::vector<double>>>(), tau_max);
            else
                s.bank = ActuatorBank(s.bank.directions(), tau_max);
            s.health = a.contains("health") ? HealthProfile{profiles_from_json(a.at("health"))}
                                            : HealthProfile::healthy(s.bank.size());
            s.health_estimate = a.contains("health_estimate")
                                    ? HealthProfile{profiles_from_json(a.at("health_estimate"))}
                                    : HealthProfile::healthy(s.bank.size());
        }
        if (j.contains("sensors")) {
            const auto& n = j.at("sensors");
            s.noise.attitude_sigma = deg_to_rad(get_or(n, "attitude_sigma_deg", 0.0));
            s.noise.gyro_sigma = get_or(n, "gyro_sigma", 0.0);
            s.noise.bias_walk = get_or(n, "bias_walk", 0.0);
            if (n.contains("initial_bias_deg_per_hour")) {
                const Vec3 b = vec3_from_json(n.at("initial_bias_deg_per_hour"));
                s.initial_bias = {deg_per_hour_to_rad_per_sec(b.x), deg_per_hour_to_rad_per_sec(b.y),
                                  deg_per_hour_to_rad_per_sec(b.z)};
            }
        }
        if (j.contains("observer")) {
            const auto& o = j.at("observer");
            s.observer = observer_kind_from_string(o.value("type", std::string("exact")));
            s.synthetic.q_amplitude = get_or(o, "q_amplitude", 0.0);
            s.synthetic.w_amplitude = get_or(o, "w_amplitude", 0.0);
            s.synthetic.q_frequency = get_or(o, "q_frequency", s.synthetic.q_frequency);
            s.synthetic.w_frequency = get_or(o, "w_frequency", s.synthetic.w_frequency);
            s.synthetic.q_phase = get_or(o, "q_phase", s.synthetic.q_phase);
            s.synthetic.w_phase = get_or(o, "w_phase", s.synthetic.w_phase);
            s.bias_gains.k_o = get_or(o, "k_o", s.bias_gains.k_o);
            s.bias_gains.k_b = get_or(o, "k_b", s.bias_gains.k_b);
        }
        if (j.contains("gains")) {
            const auto& g = j.at("gains");
            s.gains.k = get_or(g, "k", s.gains.k);
            if (g.contains("K")) s.gains.K = mat3_from_json(g.at("K"));
            s.gains.epsilon = get_or(g, "epsilon", s.gains.epsilon);
            s.gains.gamma = get_or(g, "gamma", s.gains.gamma);
        }
        if (j.contains("budget") && !j.at("budget").is_null()) {
            const auto& b = j.at("budget");
            s.budget = budget_from_json(b, s.J_hat);
            if (b.contains("stated_a1") || b.contains("stated_a0")) {
                RobustCoefficients a = robust_coefficients(*s.budget, s.gains.k);
                a.a1 = get_or(b, "stated_a1", a.a1);
                a.a0 = get_or(b, "stated_a0", a.a0);
                s.stated_coefficients = a;
            }
        }
        if (j.contains("initial")) {
            const auto& ic = j.at("initial");
            const std::string mode = ic.value("mode", std::string("random"));
            if (mode == "random") {
                s.initial.mode = InitialConditions::Mode::random;
                s.initial.omega_max = get_or(ic, "omega_max", s.initial.omega_max);
                if (ic.contains("theta_max_deg")) s.initial.theta_max = deg_to_rad(ic.at("theta_max_deg").get<double>());
            } else if (mode == "fixed") {
                s.initial.mode = InitialConditions::Mode::fixed;
                s.initial.q0 = quat_from_json(ic.at("q0"));
                s.initial.omega0 = vec3_from_json(ic.at("omega0"));
            } else {
                throw ConfigError("initial.mode must be 'random' or 'fixed'");
            }
        }
        s.duration = get_or(j, "duration", s.duration);
        s.dt = get_or(j, "dt", s.dt);
        s.seed = j.value("seed", s.seed);
        s.decimation = j.value("decimation", s.decimation);
        s.tail_fraction = get_or(j, "tail_fraction", s.tail_fraction);
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
}

json to_json(const Scenario& s) {
    json D = json::array();
    for (std::size_t r = 0; r < 3; ++r) {
        json row = json::array();
        for (const auto& d : s.bank.directions()) row.push_back(d[r]);
        D.push_back(row);
    }
    json j;
    j["name"] = s.name;
    j["inertia"] = mat3_to_json(s.inertia);
    j["model"] = {{"J_hat", mat3_to_json(s.J_hat)}, {"tau_d_hat", profiles_to_json(s.tau_d_hat)}};
    j["desired"] = {{"q_d0", quat_to_json(s.qd0)}, {"omega_d", profiles_to_json(s.omega_d)}};
    j["disturbance"] = profiles_to_json(s.disturbance);
    j["actuators"] = {{"D", D},
                      {"tau_max", s.bank.tau_max()},
                      {"health", profiles_to_json(s.health.indicators)},
                      {"health_estimate", profiles_to_json(s.health_estimate.indicators)}};
    const Vec3 b = s.initial_bias * (3600.0 * kRadToDeg);
    j["sensors"] = {{"attitude_sigma_deg", rad_to_deg(s.noise.attitude_sigma)},
                    {"gyro_sigma", s.noise.gyro_sigma},
                    {"bias_walk", s.noise.bias_walk},
                    {"initial_bias_deg_per_hour", vec3_to_json(b)}};
    j["observer"] = {{"type", to_string(s.observer)},
                     {"q_amplitude", s.synthetic.q_amplitude},
                     {"w_amplitude", s.synthetic.w_amplitude},
                     {"q_frequency", s.synthetic.q_frequency},
                     {"w_frequency", s.synthetic.w_frequency},
                     {"q_phase", s.synthetic.q_phase},
                     {"w_phase", s.synthetic.w_phase},
                     {"k_o", s.bias_gains.k_o},
                     {"k_b", s.bias_gains.k_b}};
    j["gains"] = {{"k", s.gains.k}, {"K", mat3_to_json(s.gains.K)}, {"epsilon", s.gains.epsilon}, {"gamma", s.gains.gamma}};
    if (s.budget) {
        j["budget"] = to_json(*s.budget);
        if (s.stated_coefficients) {
            j["budget"]["stated_a1"] = s.stated_coefficients->a1;
            j["budget"]["stated_a0"] = s.stated_coefficients->a0;
        }
    } else {
        j["budget"] = nullptr;
    }
    if (s.initial.mode == InitialConditions::Mode::random)
        j["initial"] = {{"mode", "random"},
                        {"omega_max", s.initial.omega_max},
                        {"theta_max_deg", rad_to_deg(s.initial.theta_max)}};
    else
        j["initial"] = {{"mode", "fixed"}, {"q0", quat_to_json(s.initial.q0)}, {"omega0", vec3_to_json(s.initial.omega0)}};
    j["duration"] = s.duration;
    j["dt"] = s.dt;
    j["seed"] = s.seed;
    j["decimation"] = s.decimation;
    j["tail_fraction"] = s.tail_fraction;
    return j;
}

BudgetAudit audit_budget(const Scenario& s, double horizon, double step) {
    BudgetAudit a;
    const InertiaMatrix j(s.inertia);
    a.lambda_min = j.lambda_min();
    a.lambda_max = j.lambda_max();
    a.rho_J = spectral_norm(s.J_hat - s.inertia);
    a.J_hat_norm = spectral_norm(s.J_hat);
    const auto grid = time_grid(horizon, step);
    for (double t : grid) {
        const Vec3 td = evaluate(s.disturbance, t);
        const Vec3 tdh = evaluate(s.tau_d_hat, t);
        a.rho_d = std::max(a.rho_d, norm(tdh - td));
        a.rho_d_hat = std::max(a.rho_d_hat, norm(tdh));
        a.rho_v = std::max(a.rho_v, norm(evaluate(s.omega_d, t)));
        a.rho_a = std::max(a.rho_a, norm(evaluate_rate(s.omega_d, t)));
    }
    a.rho_E = rho_E_estimate(s.bank, s.health, s.health_estimate, grid);
    if (s.budget) {
        const auto& b = *s.budget;
        auto over = [&](const char* name, double realized, double declared) {
            if (realized > declared * (1.0 + 1e-12) + 1e-300) a.exceeded.emplace_back(name);
        };
        over("rho_J", a.rho_J, b.rho_J);
        over("rho_d", a.rho_d, b.rho_d);
        over("rho_d_hat", a.rho_d_hat, b.rho_d_hat);
        over("rho_v", a.rho_v, b.rho_v);
        over("rho_a", a.rho_a, b.rho_a);
        over("rho_E", a.rho_E, b.rho_E);
        if (a.lambda_min < b.lambda_l * (1.0 - 1e-12)) a.exceeded.emplace_back("lambda_l");
        if (a.lambda_max > b.lambda_r * (1.0 + 1e-12)) a.exceeded.emplace_back("lambda_r");
        if (std::abs(a.J_hat_norm - b.J_hat_norm) > 1e-9 * std::max(1.0, b.J_hat_norm))
            a.exceeded.emplace_back("J_hat_norm");
    }
    return a;
}

}  // namespace ftac
