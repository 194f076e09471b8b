#include "rlflow/report.hpp"

#include <cstdio>
#include <map>

#include "rlflow/csv.hpp"

namespace rlflow {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

std::string starred(double estimate, double p, int decimals) {
  return fixed(estimate, decimals) + significance_stars(p);
}

void write_model_table(std::ostream& out, const std::vector<std::string>& model_labels,
                       const std::vector<ModelFit>& fits) {
  // Row order: first appearance across models, equation-qualified.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::string>> cells;
  for (std::size_t m = 0; m < fits.size(); ++m) {
    for (const auto& row : fits[m].coefficient_table()) {
      const std::string key = row.equation == "main" ? row.name : row.equation + ":" + row.name;
      auto [it, inserted] = cells.try_emplace(key, std::vector<std::string>(fits.size()));
      if (inserted) order.push_back(key);
      it->second[m] = starred(row.estimate, row.p) + " (" + fixed(row.std_err, 3) + ")";
    }
  }
  csv::Row header = {"variable"};
  header.insert(header.end(), model_labels.begin(), model_labels.end());
  csv::write_row(out, header);
  for (const auto& key : order) {
    csv::Row row = {key};
    row.insert(row.end(), cells[key].begin(), cells[key].end());
    csv::write_row(out, row);
  }
  auto stat_row = [&](const std::string& name, auto get) {
    csv::Row row = {name};
    for (const auto& f : fits) row.push_back(get(f));
    csv::write_row(out, row);
  };
  stat_row("LL", [](const ModelFit& f) { return fixed(f.loglik, 3); });
  stat_row("LR chi2", [](const ModelFit& f) { return fixed(f.lr_chi2, 3); });
  stat_row("Pseudo R2", [](const ModelFit& f) { return fixed(f.pseudo_r2, 4); });
  stat_row("Number of obs", [](const ModelFit& f) { return std::to_string(f.n); });
  stat_row("Left-censored", [](const ModelFit& f) {
    return f.kind == ModelKind::Tobit ? std::to_string(f.n_censored) : std::string();
  });
  stat_row("Uncensored", [](const ModelFit& f) {
    return f.kind == ModelKind::Tobit ? std::to_string(f.n_uncensored) : std::string();
  });
  stat_row("Nonzero obs", [](const ModelFit& f) {
    return f.kind == ModelKind::Zinb || f.kind == ModelKind::NegBin2 ? std::to_string(f.n - f.n_zero) : std::string();
  });
}

void write_tests(std::ostream& out, const std::vector<TestResult>& tests) {
  csv::write_row(out, {"test", "statistic", "df", "p", "stars", "note"});
  for (const auto& t : tests) {
    csv::write_row(out, {t.name, t.statistic ? csv::format_double(*t.statistic) : "undefined",
                         std::to_string(t.df), t.statistic ? csv::format_double(t.p_value) : "",
                         t.statistic ? significance_stars(t.p_value) : "", t.undefined_reason});
  }
}

}  // namespace rlflow
