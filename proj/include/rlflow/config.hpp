#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rlflow/corpus.hpp"
#include "rlflow/leadership.hpp"
#include "rlflow/proximity.hpp"
#include "rlflow/synth.hpp"
#include "rlflow/topicmodel.hpp"

namespace rlflow {

using KeyValues = std::map<std::string, std::string>;

// `key = value` lines; `#` starts a comment; blank lines ignored.
KeyValues parse_key_values(std::istream& in);
// Applies one `key=value` override.
void apply_override(KeyValues& values, std::string_view assignment);

struct SubPeriod {
  Period outcome;
  Period lag;
};

struct RunConfig {
  std::filesystem::path papers = "papers.jsonl";
  std::filesystem::path registry = "registry.csv";
  std::filesystem::path out_dir = "out";
  Period lag_period{2008, 2012};
  Period outcome_period{2013, 2017};
  std::vector<SubPeriod> subperiods;
  std::optional<std::string> field;
  // Fields fitted separately with the full model.
  std::vector<std::string> field_runs;
  Counting counting = Counting::Fractional;
  LdaSettings lda;
  TransformGuards guards;
  bool tobit = true;
  bool zinb = false;
  std::size_t top_k = 20;
  IngestMode mode = IngestMode::Strict;
  int threads = 1;
  std::uint64_t seed = 1;
  DgpConfig synth;

  // Throws InvalidArgument.
  void validate() const;
};

// Builds a config from key-values; unknown keys are rejected. Relative input
// paths are resolved against `base_dir`.
RunConfig make_run_config(const KeyValues& values, const std::filesystem::path& base_dir = {});

// Keys understood by make_run_config, for help output.
const std::vector<std::string>& config_keys();

}  // namespace rlflow
