#include "rlflow/config.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "rlflow/csv.hpp"
#include "rlflow/error.hpp"

namespace rlflow {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  try {
    long long x = csv::parse_int(v);
    if (x < 0) throw Error(ErrorCode::InvalidArgument, "negative");
    return static_cast<std::size_t>(x);
  } catch (const Error&) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected a non-negative integer, got " + v);
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    return csv::parse_double(v);
  } catch (const Error&) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected a number, got " + v);
  }
}

Period parse_period(const std::string& key, const std::string& v) {
  try {
    return Period::parse(v);
  } catch (const Error&) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected YYYY-YYYY, got " + v);
  }
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::filesystem::path&)>;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  std::filesystem::path p(v);
  return p.is_absolute() || base.empty() ? p : base / p;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["papers"] = [](RunConfig& c, const std::string& v, const auto& base) { c.papers = resolve(base, v); };
    t["registry"] = [](RunConfig& c, const std::string& v, const auto& base) { c.registry = resolve(base, v); };
    t["out_dir"] = [](RunConfig& c, const std::string& v, const auto& base) { c.out_dir = resolve(base, v); };
    t["lag_period"] = [](RunConfig& c, const std::string& v, const auto&) { c.lag_period = parse_period("lag_period", v); };
    t["outcome_period"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.outcome_period = parse_period("outcome_period", v);
    };
    // "2013-2014/2011-2012, 2016-2017/2014-2015": outcome/lag pairs.
    t["subperiods"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.subperiods.clear();
      for (const auto& item : split_list(v)) {
        const auto slash = item.find('/');
        if (slash == std::string::npos)
          throw Error(ErrorCode::InvalidArgument, "subperiods: expected OUTCOME/LAG, got " + item);
        c.subperiods.push_back({parse_period("subperiods", trim(item.substr(0, slash))),
                                parse_period("subperiods", trim(item.substr(slash + 1)))});
      }
    };
    t["field"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.field = v.empty() ? std::nullopt : std::optional<std::string>(v);
    };
    t["field_runs"] = [](RunConfig& c, const std::string& v, const auto&) { c.field_runs = split_list(v); };
    t["counting"] = [](RunConfig& c, const std::string& v, const auto&) { c.counting = parse_counting(v); };
    t["models"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.tobit = c.zinb = false;
      for (const auto& m : split_list(v)) {
        if (m == "tobit") c.tobit = true;
        else if (m == "zinb") c.zinb = true;
        else throw Error(ErrorCode::InvalidArgument, "models: unknown model " + m);
      }
    };
    t["top_k"] = [](RunConfig& c, const std::string& v, const auto&) { c.top_k = parse_size("top_k", v); };
    t["mode"] = [](RunConfig& c, const std::string& v, const auto&) {
      if (v == "strict") c.mode = IngestMode::Strict;
      else if (v == "lenient") c.mode = IngestMode::Lenient;
      else throw Error(ErrorCode::InvalidArgument, "mode: expected strict or lenient");
    };
    t["threads"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.threads = static_cast<int>(std::max<std::size_t>(1, parse_size("threads", v)));
    };
    t["seed"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.seed = parse_size("seed", v);
      c.lda.seed = c.seed;
      c.synth.seed = c.seed;
    };
    t["lda.topics"] = [](RunConfig& c, const std::string& v, const auto&) { c.lda.topics = parse_size("lda.topics", v); };
    t["lda.alpha"] = [](RunConfig& c, const std::string& v, const auto&) { c.lda.alpha = parse_real("lda.alpha", v); };
    t["lda.beta"] = [](RunConfig& c, const std::string& v, const auto&) { c.lda.beta = parse_real("lda.beta", v); };
    t["lda.iterations"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.lda.iterations = parse_size("lda.iterations", v);
    };
    t["lda.burn_in"] = [](RunConfig& c, const std::string& v, const auto&) { c.lda.burn_in = parse_size("lda.burn_in", v); };
    t["lda.thin"] = [](RunConfig& c, const std::string& v, const auto&) { c.lda.thin = parse_size("lda.thin", v); };
    t["lda.seed"] = [](RunConfig& c, const std::string& v, const auto&) { c.lda.seed = parse_size("lda.seed", v); };
    t["guards.geo_floor_km"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.guards.geo_floor_km = parse_real("guards.geo_floor_km", v);
    };
    t["guards.cogn_floor"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.guards.cogn_floor = parse_real("guards.cogn_floor", v);
    };
    t["synth.institutions"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.institutions = parse_size("synth.institutions", v);
    };
    t["synth.provinces"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.provinces = parse_size("synth.provinces", v);
    };
    t["synth.papers_per_year"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.papers_per_year = parse_size("synth.papers_per_year", v);
    };
    t["synth.topics"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.planted_topics = parse_size("synth.topics", v);
    };
    t["synth.words_per_topic"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.words_per_topic = parse_size("synth.words_per_topic", v);
    };
    t["synth.keywords_per_paper"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.keywords_per_paper = parse_size("synth.keywords_per_paper", v);
    };
    t["synth.fields"] = [](RunConfig& c, const std::string& v, const auto&) { c.synth.fields = parse_size("synth.fields", v); };
    t["synth.utility.mass"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.utility.mass = parse_real("synth.utility.mass", v);
    };
    t["synth.utility.geo"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.utility.geo = parse_real("synth.utility.geo", v);
    };
    t["synth.utility.cogn"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.utility.cogn = parse_real("synth.utility.cogn", v);
    };
    t["synth.utility.inst"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.utility.inst = parse_real("synth.utility.inst", v);
    };
    t["synth.utility.soc"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.utility.soc = parse_real("synth.utility.soc", v);
    };
    t["synth.utility.econ"] = [](RunConfig& c, const std::string& v, const auto&) {
      c.synth.utility.econ = parse_real("synth.utility.econ", v);
    };
    return t;
  }();
  return table;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(line_no) + ": expected key = value");
    values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return values;
}

void apply_override(KeyValues& values, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || trim(assignment.substr(0, eq)).empty())
    throw Error(ErrorCode::InvalidArgument, "override must be key=value: " + std::string(assignment));
  values[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig make_run_config(const KeyValues& values, const std::filesystem::path& base_dir) {
  RunConfig config;
  for (auto* path : {&config.papers, &config.registry, &config.out_dir}) *path = resolve(base_dir, path->string());
  // Seed first so explicit lda.seed overrides it.
  if (auto it = values.find("seed"); it != values.end()) setters().at("seed")(config, it->second, base_dir);
  for (const auto& [key, value] : values) {
    if (key == "seed") continue;
    auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorCode::InvalidArgument, "unknown config key: " + key);
    it->second(config, value, base_dir);
  }
  config.synth.lag_period = config.lag_period;
  config.synth.outcome_period = config.outcome_period;
  config.synth.nsfc_periods.clear();
  for (const auto& s : config.subperiods) config.synth.nsfc_periods.push_back(s.lag);
  config.validate();
  return config;
}

void RunConfig::validate() const {
  if (lag_period.end_year >= outcome_period.start_year)
    throw Error(ErrorCode::InvalidArgument, "lag period must strictly precede the outcome period");
  for (std::size_t a = 0; a < subperiods.size(); ++a) {
    const auto& s = subperiods[a];
    if (s.outcome.start_year < outcome_period.start_year || s.outcome.end_year > outcome_period.end_year)
      throw Error(ErrorCode::InvalidArgument, "sub-period " + s.outcome.label() + " is outside the outcome period");
    if (s.lag.end_year >= s.outcome.start_year)
      throw Error(ErrorCode::InvalidArgument, "sub-period lag " + s.lag.label() + " must precede " + s.outcome.label());
    for (std::size_t b = 0; b < a; ++b) {
      const auto& o = subperiods[b].outcome;
      if (!(s.outcome.end_year < o.start_year || o.end_year < s.outcome.start_year))
        throw Error(ErrorCode::InvalidArgument, "sub-periods overlap: " + s.outcome.label() + ", " + o.label());
    }
  }
  if (!subperiods.empty() && subperiods.size() != 2)
    throw Error(ErrorCode::InvalidArgument, "the structural-break test needs exactly two sub-periods");
  if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be positive");
  if (!(guards.geo_floor_km > 0.0) || !(guards.cogn_floor > 0.0))
    throw Error(ErrorCode::InvalidArgument, "transform guards must be positive");
  synth.validate();
}

}  // namespace rlflow
