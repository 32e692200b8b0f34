#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "seqmem/bounds.hpp"
#include "seqmem/experiments.hpp"
#include "seqmem/multi_pass.hpp"
#include "seqmem/single_pass.hpp"

namespace seqmem {

// Hexadecimal significand encoding of a binary64 value ("1.8p-3" style).
// The round trip is lossless for every finite double.
std::string double_to_hex(double value);
double double_from_hex(std::string_view text);

inline constexpr int kNetworkFormatVersion = 1;

// Network files are versioned JSON documents
//   {format_version, mode, L, p, theta, eta_tilde, weights}
// with p, theta, eta_tilde stored as hex-significand strings. Single-pass
// weights are the integer count vectors plus |J_l| (lossless by
// construction); dense weights are per-entry hex-significand strings, so a
// reloaded network reproduces identical margins.
using NetworkVariant = std::variant<SinglePassNetwork, DenseNetwork>;

void write_network(std::ostream& out, const SinglePassNetwork& network);
void write_network(std::ostream& out, const DenseNetwork& network);
void write_network_file(const std::string& path, const NetworkVariant& network);
NetworkVariant read_network(std::istream& in);
NetworkVariant read_network_file(const std::string& path);

nlohmann::ordered_json verification_json(const VerificationReport& report);

// Snake_case report document. elapsed_seconds is the only field that varies
// between identically-seeded runs; drop it for byte comparison. The worker
// count is a performance knob and is never echoed.
nlohmann::ordered_json report_json(const ExperimentReport& report,
                                   bool include_elapsed = true);

nlohmann::ordered_json mgf_json(const MgfDiagnostic& diag);
nlohmann::ordered_json capacity_json(const CapacitySummary& summary);
nlohmann::ordered_json bound_json(const BoundResult& result);

// CSV: "N,target,L_min,bound_at_L_min,term_hebb,term_binom".
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

// The same rows as a JSON array (for --format json).
nlohmann::ordered_json sweep_json(std::span<const SweepRow> rows);

// Single-record CSV: the object's keys as the header, its scalar values as
// one data row; nested objects and arrays are skipped.
void write_record_csv(std::ostream& out, const nlohmann::ordered_json& record);

// CSV: "update_index,residual_max,residual_l2".
void write_residual_csv(std::ostream& out, std::span<const ResidualSample> history);

// CSV: "trial_index,perfect,failure_count".
void write_trials_csv(std::ostream& out, std::span<const TrialOutcome> outcomes);

}  // namespace seqmem
