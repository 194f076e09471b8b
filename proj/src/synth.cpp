#include "rlflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <boost/math/special_functions/erf.hpp>

#include "rlflow/error.hpp"
#include "rlflow/proximity.hpp"
#include "rlflow/random.hpp"

namespace rlflow {

Coefficients default_tobit_beta() {
  return {{"const", -41.178}, {"ln_LM_i", 4.417}, {"ln_LM_j", 3.232}, {"ln_geo", -1.590},
          {"ln_cogn", 201.403}, {"inst", 12.648}, {"soc", 13.210},   {"ln_econ", 0.277}};
}

void DgpConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail("sigma must be >= 0");
  if (!(alpha > 0.0)) fail("alpha must be > 0");
  if (institutions < 3) fail("need at least 3 institutions");
  if (rows == 0) fail("rows must be positive");
  if (censoring_target && !(*censoring_target > 0.0 && *censoring_target < 1.0))
    fail("censoring target must lie in (0, 1)");
  if (lag_period.end_year >= outcome_period.start_year) fail("lag period must precede the outcome period");
  if (planted_topics == 0 || words_per_topic == 0 || keywords_per_paper == 0) fail("empty topic plan");
  if (provinces == 0 || fields == 0) fail("need at least one province and field");
  for (const auto& [name, m] : moments)
    if (!(m.second >= 0.0)) fail("moment sd must be >= 0 for " + name);
}

namespace {

double normal_quantile(double p) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct DyadMoment {
  const char* name;
  double mean;
  double sd;
  bool binary;
};

// Moments of the dyad regressors and their correlation matrix.
constexpr DyadMoment kDyadMoments[] = {
    {"ln_LM_i", 4.84, 1.27, false}, {"ln_LM_j", 4.84, 1.27, false}, {"ln_geo", 6.59, 1.24, false},
    {"ln_cogn", -0.07, 0.04, false}, {"inst", 0.07, 0.25, true},    {"soc", 0.13, 0.34, true},
    {"ln_econ", 4.54, 1.70, false}};
constexpr double kDyadCorrLower[7][7] = {
    {1, 0, 0, 0, 0, 0, 0},
    {0.00, 1, 0, 0, 0, 0, 0},
    {-0.04, -0.04, 1, 0, 0, 0, 0},
    {0.43, 0.43, 0.03, 1, 0, 0, 0},
    {0.02, 0.02, -0.75, -0.04, 1, 0, 0},
    {0.35, 0.28, -0.18, 0.31, 0.18, 1, 0},
    {0.36, 0.36, -0.03, 0.32, -0.01, 0.23, 1}};

int dyad_index(const std::string& name) {
  for (int k = 0; k < 7; ++k)
    if (name == kDyadMoments[k].name) return k;
  return -1;
}

// Nearest correlation matrix by eigenvalue clipping, Cholesky factor returned.
Eigen::MatrixXd correlation_factor(const std::vector<int>& idx) {
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd R(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) {
      const int i = idx[static_cast<std::size_t>(std::max(a, b))];
      const int j = idx[static_cast<std::size_t>(std::min(a, b))];
      R(a, b) = i >= j ? kDyadCorrLower[i][j] : kDyadCorrLower[j][i];
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
  Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(1e-3);
  Eigen::MatrixXd P = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
  Eigen::VectorXd d = P.diagonal().cwiseSqrt().cwiseInverse();
  P = d.asDiagonal() * P * d.asDiagonal();
  return P.llt().matrixL();
}

Eigen::MatrixXd draw_design(const std::vector<std::string>& names, const DgpConfig& config, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(config.rows);
  const auto p = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd X(n, p);

  std::vector<int> copula;  // dyad-moment index per correlated column
  std::vector<Eigen::Index> copula_cols;
  for (Eigen::Index c = 0; c < p; ++c) {
    const auto& name = names[static_cast<std::size_t>(c)];
    if (name != "const" && !config.moments.count(name) && dyad_index(name) >= 0) {
      copula.push_back(dyad_index(name));
      copula_cols.push_back(c);
    }
  }
  const Eigen::MatrixXd L = copula.empty() ? Eigen::MatrixXd() : correlation_factor(copula);
  std::vector<double> thresholds;
  for (int k : copula) thresholds.push_back(kDyadMoments[k].binary ? normal_quantile(1.0 - kDyadMoments[k].mean) : 0.0);

  Eigen::VectorXd e(static_cast<Eigen::Index>(copula.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index k = 0; k < e.size(); ++k) e(k) = rng.normal();
    const Eigen::VectorXd z = copula.empty() ? Eigen::VectorXd() : Eigen::VectorXd(L * e);
    std::size_t next = 0;
    for (Eigen::Index c = 0; c < p; ++c) {
      const auto& name = names[static_cast<std::size_t>(c)];
      if (name == "const") {
        X(r, c) = 1.0;
      } else if (auto it = config.moments.find(name); it != config.moments.end()) {
        X(r, c) = rng.normal(it->second.first, it->second.second);
      } else if (next < copula_cols.size() && copula_cols[next] == c) {
        const DyadMoment& m = kDyadMoments[copula[next]];
        const double zi = z(static_cast<Eigen::Index>(next));
        if (m.binary) {
          X(r, c) = zi > thresholds[next] ? 1.0 : 0.0;
        } else {
          X(r, c) = m.mean + m.sd * zi;
          if (name == "ln_cogn") X(r, c) = std::min(X(r, c), 0.0);
          if (name == "ln_econ") X(r, c) = std::max(X(r, c), 0.0);
        }
        ++next;
      } else {
        X(r, c) = rng.normal();
      }
    }
  }
  return X;
}

double expected_censoring(const Eigen::VectorXd& index, double shift, double sigma) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < index.size(); ++i) {
    const double mu = index(i) + shift;
    total += sigma > 0.0 ? normal_cdf(-mu / sigma) : (mu <= 0.0 ? 1.0 : 0.0);
  }
  return total / static_cast<double>(index.size());
}

}  // namespace

TobitDataset gen_tobit_dataset(const DgpConfig& config) {
  config.validate();
  TobitDataset d;
  for (const auto& entry : config.beta) d.names.push_back(entry.first);
  const auto p = static_cast<Eigen::Index>(d.names.size());
  d.beta.resize(p);
  for (Eigen::Index c = 0; c < p; ++c) d.beta(c) = config.beta[static_cast<std::size_t>(c)].second;
  d.sigma = config.sigma;

  Rng design_rng = Rng::derive(config.seed, 1);
  Rng noise_rng = Rng::derive(config.seed, 2);
  d.X = draw_design(d.names, config, design_rng);

  if (config.censoring_target) {
    auto it = std::find(d.names.begin(), d.names.end(), "const");
    if (it == d.names.end()) throw Error(ErrorCode::InvalidArgument, "censoring target needs a const column");
    const auto c0 = it - d.names.begin();
    Eigen::VectorXd index = d.X * d.beta - d.beta(c0) * d.X.col(c0);
    // Expected censoring decreases in the intercept.
    const double scale = std::max(1.0, index.cwiseAbs().maxCoeff() + 10.0 * d.sigma);
    double lo = -scale, hi = scale;
    for (int k = 0; k < 200 && hi - lo > 1e-12 * scale; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (expected_censoring(index, mid, d.sigma) > *config.censoring_target) lo = mid;
      else hi = mid;
    }
    d.beta(c0) = 0.5 * (lo + hi);
  }

  const auto n = static_cast<Eigen::Index>(config.rows);
  d.y.resize(n);
  std::size_t censored = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double latent = d.X.row(r).dot(d.beta) + d.sigma * noise_rng.normal();
    d.y(r) = latent > 0.0 ? latent : 0.0;
    if (d.y(r) == 0.0) ++censored;
  }
  d.censoring_share = static_cast<double>(censored) / static_cast<double>(n);
  return d;
}

CountKind parse_count_kind(std::string_view text) {
  if (text == "poisson") return CountKind::Poisson;
  if (text == "nb" || text == "nb2") return CountKind::NegBin;
  if (text == "zinb") return CountKind::Zinb;
  throw Error(ErrorCode::InvalidArgument, "unknown count kind: " + std::string(text));
}

CountDataset gen_count_dataset(const DgpConfig& config, CountKind kind) {
  config.validate();
  CountDataset d;
  d.kind = kind;
  d.alpha = kind == CountKind::Poisson ? 0.0 : config.alpha;
  const auto n = static_cast<Eigen::Index>(config.rows);
  Rng design_rng = Rng::derive(config.seed, 11);
  Rng draw_rng = Rng::derive(config.seed, 12);

  std::map<std::string, Eigen::VectorXd> columns;
  auto column = [&](const std::string& name) -> const Eigen::VectorXd& {
    auto it = columns.find(name);
    if (it != columns.end()) return it->second;
    Eigen::VectorXd v(n);
    for (Eigen::Index r = 0; r < n; ++r) v(r) = name == "const" ? 1.0 : design_rng.normal();
    return columns.emplace(name, std::move(v)).first->second;
  };
  d.X.resize(n, static_cast<Eigen::Index>(config.count_beta.size()));
  d.beta.resize(d.X.cols());
  for (std::size_t k = 0; k < config.count_beta.size(); ++k) {
    d.names.push_back(config.count_beta[k].first);
    d.beta(static_cast<Eigen::Index>(k)) = config.count_beta[k].second;
    d.X.col(static_cast<Eigen::Index>(k)) = column(config.count_beta[k].first);
  }
  if (kind == CountKind::Zinb) {
    d.X_inflate.resize(n, static_cast<Eigen::Index>(config.inflate_gamma.size()));
    d.gamma.resize(d.X_inflate.cols());
    for (std::size_t k = 0; k < config.inflate_gamma.size(); ++k) {
      d.inflate_names.push_back(config.inflate_gamma[k].first);
      d.gamma(static_cast<Eigen::Index>(k)) = config.inflate_gamma[k].second;
      d.X_inflate.col(static_cast<Eigen::Index>(k)) = column(config.inflate_gamma[k].first);
    }
  }

  d.y.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mu = std::exp(d.X.row(r).dot(d.beta));
    switch (kind) {
      case CountKind::Poisson:
        d.y(r) = static_cast<double>(draw_rng.poisson(mu));
        break;
      case CountKind::NegBin:
        d.y(r) = static_cast<double>(draw_rng.negative_binomial(mu, d.alpha));
        break;
      case CountKind::Zinb: {
        const double pi = 1.0 / (1.0 + std::exp(-d.X_inflate.row(r).dot(d.gamma)));
        const bool structural = draw_rng.uniform() < pi;
        const long long count = draw_rng.negative_binomial(mu, d.alpha);
        d.y(r) = structural ? 0.0 : static_cast<double>(count);
        break;
      }
    }
  }
  return d;
}

namespace {

std::string padded(const char* prefix, std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, value);
  return buf;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace

Corpus gen_corpus(const DgpConfig& config) {
  config.validate();
  const std::size_t N = config.institutions;
  const std::size_t T = config.planted_topics;
  Rng inst_rng = Rng::derive(config.seed, 21);
  Rng paper_rng = Rng::derive(config.seed, 22);

  // Province centres inside a mainland bounding box; institutions scatter
  // around a centre and take the province of the nearest centre.
  constexpr double kLatLo = 21.0, kLatHi = 45.0, kLonLo = 100.0, kLonHi = 122.0;
  std::vector<std::pair<double, double>> centres;
  for (std::size_t p = 0; p < config.provinces; ++p)
    centres.emplace_back(inst_rng.uniform(kLatLo, kLatHi), inst_rng.uniform(kLonLo, kLonHi));

  std::vector<InstitutionRecord> registry(N);
  std::vector<double> log_mass(N);
  std::vector<std::vector<double>> pref(N);
  std::vector<double> nsfc_base(N);
  const std::vector<double> concentration(T, 0.3);
  for (std::size_t k = 0; k < N; ++k) {
    auto& r = registry[k];
    r.institution_id = padded("I", k, 3);
    r.display_name = "Institution " + std::to_string(k);
    const auto& c = centres[inst_rng.below(centres.size())];
    r.latitude = std::clamp(c.first + inst_rng.normal(0.0, 1.0), 18.0, 53.0);
    r.longitude = std::clamp(c.second + inst_rng.normal(0.0, 1.0), 74.0, 134.0);
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t p = 0; p < centres.size(); ++p) {
      const double d = geo_distance(r.latitude, r.longitude, centres[p].first, centres[p].second);
      if (d < best_d) {
        best_d = d;
        best = p;
      }
    }
    r.province = padded("P", best, 2);
    log_mass[k] = inst_rng.normal(0.0, config.mass_log_sd);
    pref[k] = inst_rng.dirichlet(concentration);
    nsfc_base[k] = std::exp(3.5 + 0.8 * log_mass[k] + inst_rng.normal(0.0, 0.5));
  }
  std::set<Period> nsfc_periods(config.nsfc_periods.begin(), config.nsfc_periods.end());
  nsfc_periods.insert(config.lag_period);
  nsfc_periods.insert(config.outcome_period);
  for (std::size_t k = 0; k < N; ++k)
    for (const auto& period : nsfc_periods) {
      const double scale = static_cast<double>(period.length()) / 5.0;
      registry[k].nsfc_counts[period.label()] =
          std::llround(nsfc_base[k] * scale * std::exp(inst_rng.normal(0.0, 0.1)));
    }

  // Static part of the participant utility for every ordered pair.
  std::vector<std::vector<double>> base(N, std::vector<double>(N, 0.0));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      const double d = std::max(1.0, geo_distance(registry[i].latitude, registry[i].longitude,
                                                  registry[j].latitude, registry[j].longitude));
      const auto& ni = registry[i].nsfc_counts.at(config.lag_period.label());
      const auto& nj = registry[j].nsfc_counts.at(config.lag_period.label());
      const auto& u = config.utility;
      base[i][j] = u.mass * log_mass[j] + u.geo * std::log(d) + u.cogn * cosine(pref[i], pref[j]) +
                   u.inst * (registry[i].province == registry[j].province ? 1.0 : 0.0) +
                   u.econ * std::log1p(static_cast<double>(std::llabs(ni - nj)));
    }

  std::vector<double> mass_weight(N);
  for (std::size_t k = 0; k < N; ++k) mass_weight[k] = std::exp(log_mass[k]);

  std::vector<std::vector<char>> prior(N, std::vector<char>(N, 0));
  std::vector<std::vector<char>> lag_links(N, std::vector<char>(N, 0));
  std::vector<PaperRecord> papers;
  std::vector<double> weights(N);
  for (int year = config.lag_period.start_year; year <= config.outcome_period.end_year; ++year) {
    const bool in_lag = config.lag_period.contains(year);
    if (!in_lag && !config.outcome_period.contains(year)) continue;
    if (year == config.outcome_period.start_year) prior = lag_links;
    std::vector<std::pair<std::size_t, std::size_t>> new_links;
    for (std::size_t q = 0; q < config.papers_per_year; ++q) {
      PaperRecord paper;
      paper.paper_id = "P" + std::to_string(year) + "-" + padded("", q, 5);
      paper.year = year;
      const std::size_t leader = paper_rng.categorical(mass_weight);
      std::vector<std::size_t> members = {leader};
      if (!paper_rng.bernoulli(config.single_institution_share)) {
        const std::size_t m = std::min<std::size_t>(N - 1, 1 + static_cast<std::size_t>(paper_rng.poisson(config.extra_participants_mean)));
        for (std::size_t j = 0; j < N; ++j)
          weights[j] = j == leader ? 0.0 : std::exp(base[leader][j] + config.utility.soc * prior[leader][j]);
        for (std::size_t c = 0; c < m; ++c) {
          const std::size_t j = paper_rng.categorical(weights);
          members.push_back(j);
          weights[j] = 0.0;
        }
      }
      const bool co_lead = members.size() > 1 && paper_rng.bernoulli(config.co_leader_share);
      for (std::size_t k = 0; k < members.size(); ++k)
        paper.affiliations.push_back({registry[members[k]].institution_id, k == 0 || (co_lead && k == 1)});

      std::vector<double> mix(T, 0.0);
      for (std::size_t k = 0; k < members.size(); ++k)
        for (std::size_t t = 0; t < T; ++t) mix[t] += (k == 0 ? 1.0 : 0.5 / static_cast<double>(members.size() - 1)) * pref[members[k]][t];
      std::set<std::string> words;
      for (std::size_t w = 0; w < config.keywords_per_paper; ++w) {
        const std::size_t t = paper_rng.categorical(mix);
        words.insert(padded("t", t, 2) + padded("w", paper_rng.below(config.words_per_topic), 2));
      }
      paper.keywords.assign(words.begin(), words.end());
      const auto dominant = static_cast<std::size_t>(std::max_element(pref[leader].begin(), pref[leader].end()) - pref[leader].begin());
      paper.field = padded("F", dominant % config.fields, 1);

      for (std::size_t k = 1; k < members.size(); ++k) new_links.emplace_back(leader, members[k]);
      papers.push_back(std::move(paper));
    }
    if (in_lag)
      for (auto [a, b] : new_links) {
        lag_links[a][b] = lag_links[b][a] = 1;
        prior[a][b] = prior[b][a] = 1;
      }
  }
  return assemble_corpus(std::move(papers), std::move(registry)).corpus;
}

}  // namespace rlflow
