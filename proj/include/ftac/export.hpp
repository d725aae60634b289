#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftac/bound_predictor.hpp"
#include "ftac/simulation.hpp"

namespace ftac {

/// t,qe0..qe3,wex,wey,wez,theta_e_deg,snorm,shatnorm,tau_u1..m,qtilde_norm,wtilde_norm (13 + m columns).
[[nodiscard]] std::vector<std::string> trace_csv_header(std::size_t m);

void write_trace_csv(std::ostream& out, const RunTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);

/// Parses a file produced by write_trace_csv. Only the exported columns are restored.
[[nodiscard]] std::vector<TraceRow> read_trace_csv(std::istream& in);
[[nodiscard]] std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

/// One record per iteration {"loop","i","s","q"} followed by a single summary record.
void write_bound_trace_jsonl(std::ostream& out, const Prediction& p);
void write_bound_trace_jsonl(const std::filesystem::path& path, const Prediction& p);

[[nodiscard]] nlohmann::json to_json(const SteadyStateStats& s);
[[nodiscard]] nlohmann::json to_json(const Prediction& p);
[[nodiscard]] nlohmann::json to_json(const GainConditionReport& r);

/// One record per instance followed by a campaign record.
void write_campaign_jsonl(std::ostream& out, const CampaignSummary& summary);
void write_campaign_jsonl(const std::filesystem::path& path, const CampaignSummary& summary);

/// Series of a trace, each paired with its axis label and unit, plus the predicted bounds if given.
[[nodiscard]] nlohmann::json plot_data(const RunTrace& trace, const Prediction* prediction = nullptr);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace ftac
