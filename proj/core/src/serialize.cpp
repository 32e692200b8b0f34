#include "seqmem/serialize.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace seqmem {

namespace {

using nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

ordered_json hex_triplet(const NetworkParams& params) {
  ordered_json j;
  j["L"] = params.neuron_count;
  j["p"] = double_to_hex(params.p);
  j["theta"] = double_to_hex(params.theta);
  j["eta_tilde"] = double_to_hex(params.eta_tilde);
  return j;
}

NetworkParams params_from_json(const ordered_json& j) {
  NetworkParams params;
  params.neuron_count = j.at("L").get<std::size_t>();
  params.p = double_from_hex(j.at("p").get<std::string>());
  params.theta = double_from_hex(j.at("theta").get<std::string>());
  params.eta_tilde = double_from_hex(j.at("eta_tilde").get<std::string>());
  return params;
}

}  // namespace

std::string double_to_hex(double value) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::hex);
  if (res.ec != std::errc()) {
    throw std::runtime_error("cannot format double as hex");
  }
  return std::string(buf, res.ptr);
}

double double_from_hex(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(),
                                   value, std::chars_format::hex);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("malformed hex float: " + std::string(text));
  }
  return value;
}

void write_network(std::ostream& out, const SinglePassNetwork& network) {
  ordered_json j;
  j["format_version"] = kNetworkFormatVersion;
  j["mode"] = "single-pass";
  j.update(hex_triplet(network.params()));
  ordered_json weights;
  ordered_json counts = ordered_json::array();
  ordered_json j_card = ordered_json::array();
  for (std::size_t l = 0; l < network.neuron_count(); ++l) {
    const auto c = network.counts(l);
    counts.push_back(std::vector<std::uint32_t>(c.begin(), c.end()));
    j_card.push_back(network.j_cardinality(l));
  }
  weights["j_card"] = std::move(j_card);
  weights["counts"] = std::move(counts);
  j["weights"] = std::move(weights);
  out << j.dump(1) << '\n';
}

void write_network(std::ostream& out, const DenseNetwork& network) {
  ordered_json j;
  j["format_version"] = kNetworkFormatVersion;
  j["mode"] = "multi-pass";
  j.update(hex_triplet(network.params()));
  ordered_json weights = ordered_json::array();
  for (std::size_t l = 0; l < network.neuron_count(); ++l) {
    ordered_json row = ordered_json::array();
    for (const double w : network.weight_vector(l)) {
      row.push_back(double_to_hex(w));
    }
    weights.push_back(std::move(row));
  }
  j["weights"] = std::move(weights);
  out << j.dump(1) << '\n';
}

void write_network_file(const std::string& path, const NetworkVariant& network) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  std::visit([&out](const auto& net) { write_network(out, net); }, network);
}

NetworkVariant read_network(std::istream& in) {
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed network file: ") + e.what());
  }
  if (!j.contains("format_version") ||
      j["format_version"].get<int>() != kNetworkFormatVersion) {
    throw std::runtime_error("unsupported network file format version");
  }
  const std::string mode = j.at("mode").get<std::string>();
  const NetworkParams params = params_from_json(j);
  if (mode == "single-pass") {
    const auto& weights = j.at("weights");
    auto j_card = weights.at("j_card").get<std::vector<std::uint32_t>>();
    auto counts =
        weights.at("counts").get<std::vector<std::vector<std::uint32_t>>>();
    return SinglePassNetwork(std::move(counts), std::move(j_card), params);
  }
  if (mode == "multi-pass") {
    const auto& rows = j.at("weights");
    std::vector<std::vector<double>> weights;
    weights.reserve(rows.size());
    for (const auto& row : rows) {
      std::vector<double> w;
      w.reserve(row.size());
      for (const auto& entry : row) {
        w.push_back(double_from_hex(entry.get<std::string>()));
      }
      weights.push_back(std::move(w));
    }
    return DenseNetwork(std::move(weights), params);
  }
  throw std::runtime_error("unknown network mode: " + mode);
}

NetworkVariant read_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open network file: " + path);
  }
  return read_network(in);
}

nlohmann::ordered_json verification_json(const VerificationReport& report) {
  ordered_json j;
  j["perfect"] = report.perfect;
  ordered_json failures = ordered_json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"neuron", f.neuron},
                        {"time", f.time},
                        {"kind", f.kind == FailureKind::kShouldFire
                                     ? "should-fire"
                                     : "should-not-fire"}});
  }
  j["failures"] = std::move(failures);
  j["min_fire_margin"] = report.min_fire_margin;
  j["min_silence_margin"] = report.min_silence_margin;
  ordered_json pairs = ordered_json::array();
  for (const auto& [a, b] : report.inconsistencies) {
    pairs.push_back({a, b});
  }
  j["inconsistencies"] = std::move(pairs);
  return j;
}

nlohmann::ordered_json report_json(const ExperimentReport& report,
                                   bool include_elapsed) {
  ordered_json j;
  j["L"] = report.config.neuron_count;
  j["N"] = report.config.sequence_length;
  j["p"] = report.config.p;
  j["eta_tilde"] = report.config.eta_tilde;
  j["mode"] = report.config.mode == TrainMode::kSinglePass ? "single-pass"
                                                           : "multi-pass";
  if (report.config.mode == TrainMode::kMultiPass) {
    const TrainConfig& m = report.config.multi;
    j["multi"] = {{"schedule", m.schedule == StepSchedule::kKaczmarz
                                   ? "kaczmarz"
                                   : "constant"},
                  {"beta", m.beta},
                  {"max_updates", m.max_updates},
                  {"tolerance", m.tolerance},
                  {"order", m.order == VisitOrder::kCyclic ? "cyclic" : "random"}};
  }
  j["trials"] = report.config.trials;
  j["seed"] = report.config.seed;
  j["confidence"] = report.config.confidence;
  j["failures"] = report.failures;
  j["rate"] = report.rate;
  j["ci_low"] = report.ci_low;
  j["ci_high"] = report.ci_high;
  j["bound_total"] = report.bound_total;
  j["generator"] = report.generator;
  if (include_elapsed) {
    j["elapsed_seconds"] = report.elapsed_seconds;
  }
  return j;
}

nlohmann::ordered_json mgf_json(const MgfDiagnostic& diag) {
  ordered_json j;
  j["L"] = diag.neuron_count;
  j["N"] = diag.sequence_length;
  j["p"] = diag.p;
  j["t"] = diag.t;
  j["samples"] = diag.samples;
  j["seed"] = diag.seed;
  j["estimate"] = diag.estimate;
  j["bound"] = diag.bound;
  j["std_error"] = diag.std_error;
  j["mean_s"] = diag.mean_s;
  j["mean_s_std_error"] = diag.mean_s_std_error;
  return j;
}

nlohmann::ordered_json capacity_json(const CapacitySummary& summary) {
  ordered_json j;
  j["typical_set_bits"] = summary.typical_set_bits;
  j["capacity_constant"] = summary.capacity_constant;
  j["single_pass_per_neuron_lb"] = summary.single_pass_per_neuron_lb;
  j["multi_pass_per_neuron_lb"] = summary.multi_pass_per_neuron_lb;
  j["single_pass_per_connection_lb"] = summary.single_pass_per_connection_lb;
  j["multi_pass_per_connection_lb"] = summary.multi_pass_per_connection_lb;
  j["hopfield_hebbian_reference"] = summary.hopfield_hebbian_reference;
  j["hopfield_storkey_reference"] = summary.hopfield_storkey_reference;
  j["units"] = "bits";
  return j;
}

nlohmann::ordered_json bound_json(const BoundResult& result) {
  ordered_json j;
  j["term_hebb"] = result.term_hebb;
  j["term_binom"] = result.term_binom;
  j["total"] = result.total;
  j["clamped"] = result.clamped;
  return j;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "N,target,L_min,bound_at_L_min,term_hebb,term_binom\n";
  for (const SweepRow& row : rows) {
    out << row.sequence_length << ',' << format_double(row.target) << ','
        << row.min_neuron_count << ',' << format_double(row.bound_at_min)
        << ',' << format_double(row.term_hebb) << ','
        << format_double(row.term_binom) << '\n';
  }
}

nlohmann::ordered_json sweep_json(std::span<const SweepRow> rows) {
  ordered_json array = ordered_json::array();
  for (const SweepRow& row : rows) {
    ordered_json j;
    j["N"] = row.sequence_length;
    j["target"] = row.target;
    j["L_min"] = row.min_neuron_count;
    j["bound_at_L_min"] = row.bound_at_min;
    j["term_hebb"] = row.term_hebb;
    j["term_binom"] = row.term_binom;
    array.push_back(std::move(j));
  }
  return array;
}

void write_record_csv(std::ostream& out, const nlohmann::ordered_json& record) {
  std::string header;
  std::string row;
  for (const auto& [key, value] : record.items()) {
    if (value.is_object() || value.is_array()) continue;
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += key;
    if (value.is_number_float()) {
      row += format_double(value.get<double>());
    } else if (value.is_string()) {
      row += value.get<std::string>();
    } else {
      row += value.dump();
    }
  }
  out << header << '\n' << row << '\n';
}

void write_residual_csv(std::ostream& out,
                        std::span<const ResidualSample> history) {
  out << "update_index,residual_max,residual_l2\n";
  for (const ResidualSample& s : history) {
    out << s.update_index << ',' << format_double(s.residual_max) << ','
        << format_double(s.residual_l2) << '\n';
  }
}

void write_trials_csv(std::ostream& out, std::span<const TrialOutcome> outcomes) {
  out << "trial_index,perfect,failure_count\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    out << i << ',' << (outcomes[i].perfect ? 1 : 0) << ','
        << outcomes[i].failure_count << '\n';
  }
}

}  // namespace seqmem
