#include "qecml/io.h"

#include <cctype>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qecml::io {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) {
  throw std::invalid_argument(what);
}

json parse_json(const std::string& text, const char* label) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) parse_fail(std::string(label) + ": malformed JSON");
  return doc;
}

void check_schema(const json& doc, const char* label) {
  if (!doc.is_object() || !doc.contains("schema_version"))
    parse_fail(std::string(label) + ": missing schema_version");
  const int version = doc.at("schema_version").get<int>();
  if (version != kSchemaVersion)
    parse_fail(std::string(label) + ": unsupported schema_version " +
               std::to_string(version));
}

template <typename T>
T field(const json& doc, const char* key, const char* label) {
  if (!doc.contains(key))
    parse_fail(std::string(label) + ": missing field '" + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    parse_fail(std::string(label) + ": field '" + key + "' has the wrong type");
  }
}

const char* model_name(NoiseModel model) {
  return model == NoiseModel::kGate ? "gate" : "environmental";
}

NoiseModel model_from_name(const std::string& name, const char* label) {
  if (name == "gate") return NoiseModel::kGate;
  if (name == "environmental") return NoiseModel::kEnvironmental;
  parse_fail(std::string(label) + ": unknown noise model '" + name + "'");
}

json trace_to_json_value(const trainer::TrainingTrace& trace) {
  json records = json::array();
  for (const auto& r : trace.records)
    records.push_back({{"accuracy", r.accuracy},
                       {"loss", r.loss},
                       {"avg_sq_gradient", r.avg_sq_gradient},
                       {"discard_rate", r.discard_rate}});
  return {{"schema_version", kSchemaVersion},
          {"seed", trace.seed},
          {"config_hash", trace.config_hash},
          {"final_params", trace.final_params},
          {"records", std::move(records)}};
}

trainer::TrainingTrace trace_from_json_value(const json& doc, const char* label) {
  check_schema(doc, label);
  trainer::TrainingTrace trace;
  trace.seed = field<uint64_t>(doc, "seed", label);
  trace.config_hash = field<uint64_t>(doc, "config_hash", label);
  trace.final_params = field<std::vector<double>>(doc, "final_params", label);
  const json& records = doc.at("records");
  if (!records.is_array()) parse_fail(std::string(label) + ": records must be a list");
  for (const json& r : records) {
    trainer::IterationRecord record;
    record.accuracy = field<double>(r, "accuracy", label);
    record.loss = field<double>(r, "loss", label);
    record.avg_sq_gradient = field<double>(r, "avg_sq_gradient", label);
    record.discard_rate = field<double>(r, "discard_rate", label);
    trace.records.push_back(record);
  }
  return trace;
}

std::string format_double(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string trim(const std::string& s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::string strip_comment(const std::string& line) {
  const size_t cut = line.find_first_of("#;");
  return cut == std::string::npos ? line : line.substr(0, cut);
}

[[noreturn]] void value_fail(const std::string& section, const std::string& key,
                             const std::string& what) {
  parse_fail("config value [" + section + "] " + key + ": " + what);
}

double parse_double_token(const std::string& token, const std::string& section,
                          const std::string& key) {
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty())
    value_fail(section, key, "expected a number, got '" + token + "'");
  return value;
}

long long parse_int_token(const std::string& token, const std::string& section,
                          const std::string& key) {
  char* end = nullptr;
  const long long value = std::strtoll(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || token.empty())
    value_fail(section, key, "expected an integer, got '" + token + "'");
  return value;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> tokens;
  std::string token;
  for (const char c : value) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) tokens.push_back(std::move(token));
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) tokens.push_back(std::move(token));
  return tokens;
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON documents.
// ---------------------------------------------------------------------------

std::string resource_estimate_to_json(const ResourceEstimate& estimate) {
  const json doc = {
      {"schema_version", kSchemaVersion},
      {"code_distance", estimate.code_distance},
      {"epsilon_l", estimate.epsilon_l},
      {"epsilon_t", estimate.epsilon_t},
      {"distillation", estimate.distillation_name},
      {"data_qubits", estimate.data_qubits},
      {"factory_qubits", estimate.factory_qubits},
      {"n_rotations", estimate.n_rotations},
      {"t_per_rotation", estimate.t_per_rotation},
      {"n_t_gates", estimate.n_t_gates},
      {"n_logical_cycles", estimate.n_logical_cycles},
      {"n_patch_cycles", estimate.n_patch_cycles},
      {"cycle_time_us", estimate.cycle_time_us},
      {"runtime_ms", estimate.runtime_ms},
      {"total_failure_probability", estimate.total_failure_probability},
      {"budget",
       {{"total", estimate.budget.total},
        {"logical", estimate.budget.logical},
        {"distillation", estimate.budget.distillation},
        {"synthesis", estimate.budget.synthesis}}},
  };
  return doc.dump(2);
}

ResourceEstimate resource_estimate_from_json(const std::string& text) {
  const char* label = "resource estimate";
  const json doc = parse_json(text, label);
  check_schema(doc, label);
  ResourceEstimate estimate;
  estimate.code_distance = field<int>(doc, "code_distance", label);
  estimate.epsilon_l = field<double>(doc, "epsilon_l", label);
  estimate.epsilon_t = field<double>(doc, "epsilon_t", label);
  estimate.distillation_name = field<std::string>(doc, "distillation", label);
  estimate.data_qubits = field<double>(doc, "data_qubits", label);
  estimate.factory_qubits = field<double>(doc, "factory_qubits", label);
  estimate.n_rotations = field<double>(doc, "n_rotations", label);
  estimate.t_per_rotation = field<int>(doc, "t_per_rotation", label);
  estimate.n_t_gates = field<double>(doc, "n_t_gates", label);
  estimate.n_logical_cycles = field<double>(doc, "n_logical_cycles", label);
  estimate.n_patch_cycles = field<double>(doc, "n_patch_cycles", label);
  estimate.cycle_time_us = field<double>(doc, "cycle_time_us", label);
  estimate.runtime_ms = field<double>(doc, "runtime_ms", label);
  estimate.total_failure_probability =
      field<double>(doc, "total_failure_probability", label);
  const json& budget = doc.at("budget");
  estimate.budget.total = field<double>(budget, "total", label);
  estimate.budget.logical = field<double>(budget, "logical", label);
  estimate.budget.distillation = field<double>(budget, "distillation", label);
  estimate.budget.synthesis = field<double>(budget, "synthesis", label);
  return estimate;
}

std::string sweep_summary_to_json(const trainer::SweepSummary& summary) {
  json cells = json::array();
  for (const auto& cell : summary.cells)
    cells.push_back({{"model", model_name(cell.cell.model)},
                     {"p", cell.cell.p},
                     {"rounds", cell.cell.rounds},
                     {"f_anc", cell.cell.f_anc},
                     {"mean_final_accuracy", cell.mean_final_accuracy},
                     {"std_final_accuracy", cell.std_final_accuracy},
                     {"final_accuracies", cell.final_accuracies}});
  json doc = {{"schema_version", kSchemaVersion},
              {"seeds", summary.seeds},
              {"cells", std::move(cells)}};
  if (!summary.traces.empty()) {
    json traces = json::array();
    for (const auto& per_cell : summary.traces) {
      json row = json::array();
      for (const auto& trace : per_cell) row.push_back(trace_to_json_value(trace));
      traces.push_back(std::move(row));
    }
    doc["traces"] = std::move(traces);
  }
  return doc.dump(2);
}

trainer::SweepSummary sweep_summary_from_json(const std::string& text) {
  const char* label = "sweep summary";
  const json doc = parse_json(text, label);
  check_schema(doc, label);
  trainer::SweepSummary summary;
  summary.seeds = field<std::vector<uint64_t>>(doc, "seeds", label);
  const json& cells = doc.at("cells");
  if (!cells.is_array()) parse_fail(std::string(label) + ": cells must be a list");
  for (const json& c : cells) {
    trainer::CellSummary cell;
    cell.cell.model = model_from_name(field<std::string>(c, "model", label), label);
    cell.cell.p = field<double>(c, "p", label);
    cell.cell.rounds = field<int>(c, "rounds", label);
    cell.cell.f_anc = field<double>(c, "f_anc", label);
    cell.mean_final_accuracy = field<double>(c, "mean_final_accuracy", label);
    cell.std_final_accuracy = field<double>(c, "std_final_accuracy", label);
    cell.final_accuracies = field<std::vector<double>>(c, "final_accuracies", label);
    summary.cells.push_back(std::move(cell));
  }
  if (doc.contains("traces")) {
    for (const json& row : doc.at("traces")) {
      std::vector<trainer::TrainingTrace> per_cell;
      for (const json& t : row) per_cell.push_back(trace_from_json_value(t, label));
      summary.traces.push_back(std::move(per_cell));
    }
  }
  return summary;
}

std::string trace_to_json(const trainer::TrainingTrace& trace) {
  return trace_to_json_value(trace).dump(2);
}

trainer::TrainingTrace trace_from_json(const std::string& text) {
  const char* label = "training trace";
  return trace_from_json_value(parse_json(text, label), label);
}

std::string error_to_json(const std::string& kind, const std::string& message) {
  const json doc = {{"schema_version", kSchemaVersion},
                    {"error", {{"kind", kind}, {"message", message}}}};
  return doc.dump();
}

// ---------------------------------------------------------------------------
// CSV trace.
// ---------------------------------------------------------------------------

std::string trace_to_csv(const trainer::TrainingTrace& trace) {
  std::ostringstream out;
  out << "# schema_version = " << kSchemaVersion << "\n";
  out << "# seed = " << trace.seed << "\n";
  out << "# config_hash = " << trace.config_hash << "\n";
  out << "# final_params =";
  for (const double p : trace.final_params) out << ' ' << format_double(p);
  out << "\n";
  out << "iteration,accuracy,loss,avg_sq_gradient,discard_rate\n";
  for (size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    out << i << ',' << format_double(r.accuracy) << ',' << format_double(r.loss)
        << ',' << format_double(r.avg_sq_gradient) << ','
        << format_double(r.discard_rate) << "\n";
  }
  return out.str();
}

trainer::TrainingTrace trace_from_csv(const std::string& text) {
  const std::string section = "trace csv";
  trainer::TrainingTrace trace;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  size_t next_iteration = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string meta = trim(line.substr(1));
      const size_t eq = meta.find('=');
      if (eq == std::string::npos) parse_fail("trace csv: malformed metadata line");
      const std::string key = trim(meta.substr(0, eq));
      const std::string value = trim(meta.substr(eq + 1));
      if (key == "schema_version") {
        if (parse_int_token(value, section, key) != kSchemaVersion)
          parse_fail("trace csv: unsupported schema_version " + value);
      } else if (key == "seed") {
        trace.seed = static_cast<uint64_t>(
            std::strtoull(value.c_str(), nullptr, 10));
      } else if (key == "config_hash") {
        trace.config_hash = static_cast<uint64_t>(
            std::strtoull(value.c_str(), nullptr, 10));
      } else if (key == "final_params") {
        for (const std::string& token : split_list(value))
          trace.final_params.push_back(parse_double_token(token, section, key));
      } else {
        parse_fail("trace csv: unknown metadata key '" + key + "'");
      }
      continue;
    }
    if (!header_seen) {
      if (line != "iteration,accuracy,loss,avg_sq_gradient,discard_rate")
        parse_fail("trace csv: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string token;
    std::istringstream row(line);
    while (std::getline(row, token, ',')) fields.push_back(trim(token));
    if (fields.size() != 5) parse_fail("trace csv: expected 5 columns");
    if (static_cast<size_t>(parse_int_token(fields[0], section, "iteration")) !=
        next_iteration)
      parse_fail("trace csv: iterations must count up from 0");
    ++next_iteration;
    trainer::IterationRecord record;
    record.accuracy = parse_double_token(fields[1], section, "accuracy");
    record.loss = parse_double_token(fields[2], section, "loss");
    record.avg_sq_gradient = parse_double_token(fields[3], section, "avg_sq_gradient");
    record.discard_rate = parse_double_token(fields[4], section, "discard_rate");
    trace.records.push_back(record);
  }
  if (!header_seen) parse_fail("trace csv: missing header row");
  return trace;
}

// ---------------------------------------------------------------------------
// JSON-lines trajectory log.
// ---------------------------------------------------------------------------

std::string shot_outcome_to_json_line(const qed422::ShotOutcome& outcome) {
  json flags = json::array();
  for (const auto& f : outcome.flags)
    flags.push_back({{"x", f.x_stabilizer}, {"z", f.z_stabilizer}});
  json injections = json::array();
  for (const auto& e : outcome.injections)
    injections.push_back(
        {{"position", e.position}, {"qubit", e.qubit}, {"pauli", e.pauli}});
  const json doc = {{"discarded", outcome.discarded},
                    {"logical_state", outcome.logical_state},
                    {"flags", std::move(flags)},
                    {"injections", std::move(injections)}};
  return doc.dump();
}

qed422::ShotOutcome shot_outcome_from_json_line(const std::string& line) {
  const char* label = "trajectory log";
  const json doc = parse_json(line, label);
  qed422::ShotOutcome outcome;
  outcome.discarded = field<bool>(doc, "discarded", label);
  outcome.logical_state = field<int>(doc, "logical_state", label);
  for (const json& f : doc.at("flags")) {
    qed422::SyndromeFlags flags;
    flags.x_stabilizer = field<bool>(f, "x", label);
    flags.z_stabilizer = field<bool>(f, "z", label);
    outcome.flags.push_back(flags);
  }
  for (const json& e : doc.at("injections")) {
    InjectionEvent event;
    event.position = field<int>(e, "position", label);
    event.qubit = field<int>(e, "qubit", label);
    event.pauli = field<int>(e, "pauli", label);
    outcome.injections.push_back(event);
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Config files.
// ---------------------------------------------------------------------------

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

const std::string& ConfigFile::at(const std::string& section,
                                  const std::string& key) const {
  return sections.at(section).at(key);
}

ConfigFile parse_config(const std::string& text) {
  ConfigFile out;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        parse_fail("config line " + std::to_string(line_no) +
                   ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        parse_fail("config line " + std::to_string(line_no) + ": empty section name");
      out.sections[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      parse_fail("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      parse_fail("config line " + std::to_string(line_no) + ": empty key");
    if (!out.sections[section].emplace(key, value).second)
      parse_fail("config line " + std::to_string(line_no) + ": duplicate key '" +
                 key + "' in section [" + section + "]");
  }
  return out;
}

std::string serialize_config(const ConfigFile& config) {
  std::ostringstream out;
  bool first = true;
  const auto emit = [&](const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) out << key << " = " << value << "\n";
  };
  if (const auto top = config.sections.find(""); top != config.sections.end()) {
    emit(top->second);
    first = false;
  }
  for (const auto& [section, values] : config.sections) {
    if (section.empty()) continue;
    if (!first) out << "\n";
    first = false;
    out << "[" << section << "]\n";
    emit(values);
  }
  return out.str();
}

void reject_unknown_keys(
    const ConfigFile& config,
    const std::map<std::string, std::set<std::string>>& allowed) {
  for (const auto& [section, values] : config.sections) {
    const auto ok = allowed.find(section);
    if (ok == allowed.end())
      parse_fail("config: unknown section [" + section + "]");
    for (const auto& [key, value] : values)
      if (!ok->second.count(key))
        parse_fail("config: unknown key '" + key + "' in section [" + section + "]");
  }
}

double config_double(const ConfigFile& config, const std::string& section,
                     const std::string& key, double fallback) {
  if (!config.has(section, key)) return fallback;
  return parse_double_token(config.at(section, key), section, key);
}

int config_int(const ConfigFile& config, const std::string& section,
               const std::string& key, int fallback) {
  if (!config.has(section, key)) return fallback;
  const long long value = parse_int_token(config.at(section, key), section, key);
  if (value < INT_MIN || value > INT_MAX)
    value_fail(section, key, "integer out of range");
  return static_cast<int>(value);
}

uint64_t config_u64(const ConfigFile& config, const std::string& section,
                    const std::string& key, uint64_t fallback) {
  if (!config.has(section, key)) return fallback;
  const std::string& token = config.at(section, key);
  char* end = nullptr;
  const uint64_t value = std::strtoull(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || token.empty() || token[0] == '-')
    value_fail(section, key, "expected an unsigned integer, got '" + token + "'");
  return value;
}

bool config_bool(const ConfigFile& config, const std::string& section,
                 const std::string& key, bool fallback) {
  if (!config.has(section, key)) return fallback;
  std::string token = config.at(section, key);
  for (auto& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (token == "true" || token == "1" || token == "yes" || token == "on") return true;
  if (token == "false" || token == "0" || token == "no" || token == "off") return false;
  value_fail(section, key, "expected a boolean, got '" + token + "'");
}

std::string config_string(const ConfigFile& config, const std::string& section,
                          const std::string& key, const std::string& fallback) {
  return config.has(section, key) ? config.at(section, key) : fallback;
}

std::vector<double> config_double_list(const ConfigFile& config,
                                       const std::string& section,
                                       const std::string& key,
                                       const std::vector<double>& fallback) {
  if (!config.has(section, key)) return fallback;
  std::vector<double> out;
  for (const std::string& token : split_list(config.at(section, key)))
    out.push_back(parse_double_token(token, section, key));
  return out;
}

std::vector<int> config_int_list(const ConfigFile& config, const std::string& section,
                                 const std::string& key,
                                 const std::vector<int>& fallback) {
  if (!config.has(section, key)) return fallback;
  std::vector<int> out;
  for (const std::string& token : split_list(config.at(section, key)))
    out.push_back(static_cast<int>(parse_int_token(token, section, key)));
  return out;
}

std::vector<uint64_t> config_u64_list(const ConfigFile& config,
                                      const std::string& section,
                                      const std::string& key,
                                      const std::vector<uint64_t>& fallback) {
  if (!config.has(section, key)) return fallback;
  std::vector<uint64_t> out;
  for (const std::string& token : split_list(config.at(section, key))) {
    char* end = nullptr;
    const uint64_t value = std::strtoull(token.c_str(), &end, 10);
    if (end != token.c_str() + token.size() || token.empty())
      value_fail(section, key, "expected an unsigned integer, got '" + token + "'");
    out.push_back(value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files.
// ---------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failed on " + path.string());
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed on " + path.string());
}

}  // namespace qecml::io
