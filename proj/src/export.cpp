#include "ftac/export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ftac/errors.hpp"

namespace ftac {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.precision(17);
    return out;
}

void check_stream(const std::ostream& out, const std::filesystem::path& path) {
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

double parse_double(const std::string& field) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw IoError("malformed CSV number '" + field + "'");
    return v;
}

}  // namespace

std::vector<std::string> trace_csv_header(std::size_t m) {
    std::vector<std::string> h{"t", "qe0", "qe1", "qe2", "qe3", "wex", "wey", "wez", "theta_e_deg", "snorm", "shatnorm"};
    for (std::size_t i = 1; i <= m; ++i) h.push_back("tau_u" + std::to_string(i));
    h.emplace_back("qtilde_norm");
    h.emplace_back("wtilde_norm");
    return h;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    const std::size_t m = trace.peak_abs_command.size();
    const auto header = trace_csv_header(m);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    out.precision(17);
    for (const TraceRow& r : trace.rows) {
        out << r.t << ',' << r.qe[0] << ',' << r.qe[1] << ',' << r.qe[2] << ',' << r.qe[3] << ',' << r.omega_e.x << ','
            << r.omega_e.y << ',' << r.omega_e.z << ',' << r.theta_e_deg << ',' << r.s_norm << ',' << r.s_hat_norm;
        for (double v : r.tau_u) out << ',' << v;
        out << ',' << r.qtilde_norm << ',' << r.wtilde_norm << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace) {
    auto out = open_out(path);
    write_trace_csv(out, trace);
    check_stream(out, path);
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty trace CSV");
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 13) throw IoError("trace CSV header has too few columns");
    const std::size_t m = columns - 13;
    std::vector<TraceRow> rows;
    std::vector<double> v;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        v.clear();
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) v.push_back(parse_double(field));
        if (v.size() != columns) throw IoError("trace CSV row has " + std::to_string(v.size()) + " fields");
        TraceRow r;
        r.t = v[0];
        r.qe = {v[1], v[2], v[3], v[4]};
        r.omega_e = {v[5], v[6], v[7]};
        r.theta_e_deg = v[8];
        r.s_norm = v[9];
        r.s_hat_norm = v[10];
        r.tau_u.assign(v.begin() + 11, v.begin() + 11 + static_cast<std::ptrdiff_t>(m));
        r.qtilde_norm = v[11 + m];
        r.wtilde_norm = v[12 + m];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_trace_csv(in);
}

json to_json(const GainConditionReport& r) {
    return {{"lambda_min_K", r.lambda_min_K}, {"threshold", r.threshold},   {"margin", r.margin},
            {"lyapunov_ok", r.lyapunov_ok},   {"rho_s", r.rho_s},           {"epsilon_margin", r.epsilon_margin},
            {"boundary_ok", r.boundary_ok},   {"passed", r.passed()}};
}

json to_json(const Prediction& p) {
    const auto& c = p.coefficients;
    json j;
    j["coefficients"] = {{"rho_0", c.rho_0}, {"rho_s", c.rho_s},   {"a0", c.a.a0},     {"a1", c.a.a1},
                         {"a2", c.a.a2},     {"a3", c.a.a3},       {"b0", c.b.b0},     {"b1", c.b.b1},
                         {"b2", c.b.b2},     {"b3", c.b.b3},       {"kappa", c.kappa}, {"kappa_prime", c.kappa_prime}};
    j["gain_conditions"] = to_json(p.gains_report);
    j["eta"] = p.eta;
    j["loop1_iterations"] = p.trace.loop1.size();
    j["loop2_iterations"] = p.trace.loop2.size();
    j["total_iterations"] = p.trace.total_iterations();
    j["loop2_active"] = p.trace.loop2_active;
    j["s_inf"] = p.trace.s_inf;
    j["q_inf"] = p.trace.q_inf;
    j["s_inf_prime"] = p.trace.loop2_active ? json(p.trace.s_inf_prime) : json(nullptr);
    j["q_inf_prime"] = p.trace.loop2_active ? json(p.trace.q_inf_prime) : json(nullptr);
    j["q_bound"] = p.q_bound;
    j["omega_bound_rad_s"] = p.omega_bound;
    j["omega_bound_deg_s"] = rad_to_deg(p.omega_bound);
    j["theta_bound_deg"] = rad_to_deg(p.theta_bound);
    return j;
}

void write_bound_trace_jsonl(std::ostream& out, const Prediction& p) {
    for (std::size_t i = 0; i < p.trace.loop1.size(); ++i)
        out << json{{"loop", 1}, {"i", i + 1}, {"s", p.trace.loop1[i].s}, {"q", p.trace.loop1[i].q}}.dump() << '\n';
    for (std::size_t i = 0; i < p.trace.loop2.size(); ++i)
        out << json{{"loop", 2}, {"i", p.trace.loop1.size() + i + 1}, {"s", p.trace.loop2[i].s}, {"q", p.trace.loop2[i].q}}
                   .dump()
            << '\n';
    json summary = to_json(p);
    summary["summary"] = true;
    out << summary.dump() << '\n';
}

void write_bound_trace_jsonl(const std::filesystem::path& path, const Prediction& p) {
    auto out = open_out(path);
    write_bound_trace_jsonl(out, p);
    check_stream(out, path);
}

json to_json(const SteadyStateStats& s) {
    return {{"theta_e_max_deg", s.theta_e_max_deg},
            {"omega_e_max_rad_s", s.omega_e_max},
            {"omega_e_max_deg_s", rad_to_deg(s.omega_e_max)},
            {"qe_vec_max", s.qe_vec_max},
            {"s_max", s.s_max},
            {"qtilde_max", s.qtilde_max},
            {"wtilde_max", s.wtilde_max},
            {"samples", s.samples}};
}

void write_campaign_jsonl(std::ostream& out, const CampaignSummary& summary) {
    for (const InstanceResult& r : summary.instances) {
        json j{{"instance", r.index}, {"seed", r.seed}, {"ok", r.ok}};
        if (r.ok) {
            j["tail"] = to_json(r.stats);
            j["initial_s_norm"] = r.initial_s_norm;
            j["peak_s_norm"] = r.peak_s_norm;
            j["peak_abs_command"] = r.peak_abs_command;
            j["within_bounds"] = r.within_bounds;
        } else {
            j["failure"] = r.failure;
        }
        out << j.dump() << '\n';
    }
    json c{{"campaign", summary.scenario},
           {"seed", summary.seed},
           {"instances", summary.instances.size()},
           {"failures", summary.failures},
           {"tail_fraction", summary.tail_fraction},
           {"worst", to_json(summary.worst)},
           {"all_within_bounds", summary.all_within_bounds()}};
    if (summary.prediction)
        c["prediction"] = to_json(*summary.prediction);
    else
        c["prediction_error"] = summary.prediction_error;
    out << c.dump() << '\n';
}

void write_campaign_jsonl(const std::filesystem::path& path, const CampaignSummary& summary) {
    auto out = open_out(path);
    write_campaign_jsonl(out, summary);
    check_stream(out, path);
}

json plot_data(const RunTrace& trace, const Prediction* prediction) {
    const std::size_t m = trace.peak_abs_command.size();
    std::vector<double> t, theta, wnorm, qnorm, snorm, qtilde, wtilde;
    std::vector<std::vector<double>> tau(m);
    for (const TraceRow& r : trace.rows) {
        t.push_back(r.t);
        theta.push_back(r.theta_e_deg);
        wnorm.push_back(rad_to_deg(norm(r.omega_e)));
        qnorm.push_back(std::sqrt(r.qe[1] * r.qe[1] + r.qe[2] * r.qe[2] + r.qe[3] * r.qe[3]));
        snorm.push_back(r.s_norm);
        qtilde.push_back(r.qtilde_norm);
        wtilde.push_back(r.wtilde_norm);
        for (std::size_t i = 0; i < m && i < r.tau_u.size(); ++i) tau[i].push_back(r.tau_u[i]);
    }
    auto series = [&](const std::string& name, const std::string& label, const std::string& unit,
                      const std::vector<double>& y) {
        return json{{"name", name},
                    {"x", {{"label", "time"}, {"unit", "s"}}},
                    {"y", {{"label", label}, {"unit", unit}}},
                    {"values", y}};
    };
    json j;
    j["seed"] = trace.seed;
    j["t"] = t;
    j["series"] = json::array({series("theta_e", "attitude error angle", "deg", theta),
                               series("omega_e_norm", "angular velocity error norm", "deg/s", wnorm),
                               series("qe_vec_norm", "error quaternion vector norm", "1", qnorm),
                               series("s_norm", "sliding variable norm", "rad/s", snorm),
                               series("qtilde_norm", "attitude estimation error norm", "1", qtilde),
                               series("wtilde_norm", "rate estimation error norm", "rad/s", wtilde)});
    for (std::size_t i = 0; i < m; ++i)
        j["series"].push_back(series("tau_u" + std::to_string(i + 1), "thruster pair " + std::to_string(i + 1) + " command",
                                     "N·m", tau[i]));
    if (prediction) {
        j["bounds"] = {{"theta_e", {{"value", rad_to_deg(prediction->theta_bound)}, {"unit", "deg"}}},
                       {"omega_e_norm", {{"value", rad_to_deg(prediction->omega_bound)}, {"unit", "deg/s"}}},
                       {"qe_vec_norm", {{"value", prediction->q_bound}, {"unit", "1"}}}};
    }
    return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    check_stream(out, path);
}

}  // namespace ftac
