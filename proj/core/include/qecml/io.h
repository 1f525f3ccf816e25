#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "qecml/costmodel.h"
#include "qecml/qed422.h"
#include "qecml/trainer.h"

namespace qecml::io {

// Bump when any emitted schema changes shape; every emitted document carries
// it as `schema_version` (JSON) or a `# schema_version = N` header (CSV).
inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// JSON documents. Doubles are written with 17 significant digits, so every
// emitter round-trips bit-exactly through its parser.
// ---------------------------------------------------------------------------

std::string resource_estimate_to_json(const ResourceEstimate& estimate);
ResourceEstimate resource_estimate_from_json(const std::string& text);

std::string sweep_summary_to_json(const trainer::SweepSummary& summary);
trainer::SweepSummary sweep_summary_from_json(const std::string& text);

std::string trace_to_json(const trainer::TrainingTrace& trace);
trainer::TrainingTrace trace_from_json(const std::string& text);

// Machine-readable error document for CLI failures.
std::string error_to_json(const std::string& kind, const std::string& message);

// ---------------------------------------------------------------------------
// CSV trace. Layout: `# key = value` metadata lines (schema_version, seed,
// config_hash, final_params), one header row, one row per iteration.
// ---------------------------------------------------------------------------

std::string trace_to_csv(const trainer::TrainingTrace& trace);
trainer::TrainingTrace trace_from_csv(const std::string& text);

// ---------------------------------------------------------------------------
// JSON-lines debug trajectory log: one shot outcome per line.
// ---------------------------------------------------------------------------

std::string shot_outcome_to_json_line(const qed422::ShotOutcome& outcome);
qed422::ShotOutcome shot_outcome_from_json_line(const std::string& line);

// ---------------------------------------------------------------------------
// Experiment config files: `key = value` pairs grouped by `[section]`
// headers; `#` and `;` start comments; keys before any header land in the
// "" section. Duplicate keys within a section are rejected.
// ---------------------------------------------------------------------------

struct ConfigFile {
  // section -> key -> value, insertion-ordered within the maps' key order.
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  // Returns the raw value; throws std::out_of_range when missing.
  const std::string& at(const std::string& section, const std::string& key) const;
};

ConfigFile parse_config(const std::string& text);
std::string serialize_config(const ConfigFile& config);

// Throws std::invalid_argument naming the first key not covered by `allowed`
// (section -> permitted keys). Sections absent from `allowed` are unknown.
void reject_unknown_keys(const ConfigFile& config,
                         const std::map<std::string, std::set<std::string>>& allowed);

// Typed value parsers with range diagnostics mentioning section and key.
double config_double(const ConfigFile& config, const std::string& section,
                     const std::string& key, double fallback);
int config_int(const ConfigFile& config, const std::string& section,
               const std::string& key, int fallback);
uint64_t config_u64(const ConfigFile& config, const std::string& section,
                    const std::string& key, uint64_t fallback);
bool config_bool(const ConfigFile& config, const std::string& section,
                 const std::string& key, bool fallback);
std::string config_string(const ConfigFile& config, const std::string& section,
                          const std::string& key, const std::string& fallback);
// Whitespace- or comma-separated lists.
std::vector<double> config_double_list(const ConfigFile& config,
                                       const std::string& section,
                                       const std::string& key,
                                       const std::vector<double>& fallback);
std::vector<int> config_int_list(const ConfigFile& config, const std::string& section,
                                 const std::string& key,
                                 const std::vector<int>& fallback);
std::vector<uint64_t> config_u64_list(const ConfigFile& config,
                                      const std::string& section,
                                      const std::string& key,
                                      const std::vector<uint64_t>& fallback);

// ---------------------------------------------------------------------------
// Files.
// ---------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace qecml::io
