#include "rlflow/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "rlflow/error.hpp"

namespace rlflow {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr Eigen::Index kChunkRows = 2048;

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Factors of the NB2 log-likelihood that depend on the integer count y:
// lnG(y+r) - lnG(r), psi(y+r) - psi(r) and psi'(y+r) - psi'(r).
struct GammaDiffs {
  double lgamma_diff = 0.0;
  double digamma_diff = 0.0;
  double trigamma_diff = 0.0;
};

GammaDiffs gamma_diffs(double y, double r, bool need_second) {
  GammaDiffs g;
  if (y <= 0.0) return g;
  if (y <= 1000.0 && y == std::floor(y)) {
    const auto count = static_cast<long long>(y);
    for (long long k = 0; k < count; ++k) {
      const double t = r + static_cast<double>(k);
      g.lgamma_diff += std::log(t);
      g.digamma_diff += 1.0 / t;
      if (need_second) g.trigamma_diff -= 1.0 / (t * t);
    }
    return g;
  }
  g.lgamma_diff = std::lgamma(y + r) - std::lgamma(r);
  g.digamma_diff = boost::math::digamma(y + r) - boost::math::digamma(r);
  if (need_second) g.trigamma_diff = boost::math::trigamma(y + r) - boost::math::trigamma(r);
  return g;
}

// NB2 at one observation with respect to (eta = ln mu, a = ln alpha).
struct NbTerms {
  double value, d_eta, d_a, h_ee, h_ea, h_aa;
};

NbTerms nb_terms(double y, double eta, double a, bool need_grad, bool need_hess) {
  NbTerms t{};
  const double mu = std::exp(eta);
  const double alpha = std::exp(a);
  const double r = 1.0 / alpha;
  const double rpm = r + mu;
  const double log1p_am = std::log1p(alpha * mu);  // ln((r + mu) / r)
  auto g = gamma_diffs(y, r, need_hess);
  t.value = g.lgamma_diff - std::lgamma(y + 1.0) - r * log1p_am;
  if (y > 0.0) t.value += y * (std::log(alpha * mu) - log1p_am);
  if (!need_grad) return t;

  t.d_eta = r * (y - mu) / rpm;
  const double g_r = g.digamma_diff - log1p_am + (mu - y) / rpm;
  t.d_a = -r * g_r;
  if (!need_hess) return t;

  t.h_ee = -mu * r * (r + y) / (rpm * rpm);
  t.h_ea = -r * mu * (y - mu) / (rpm * rpm);
  const double g_rr = g.trigamma_diff + 1.0 / r - 1.0 / rpm - (mu - y) / (rpm * rpm);
  t.h_aa = r * g_r + r * r * g_rr;
  return t;
}

}  // namespace

double log_normal_cdf(double x) {
  if (x > 5.0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
  if (x > -30.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  const double x2 = 1.0 / (x * x);
  const double series =
      1.0 + x2 * (-1.0 + x2 * (3.0 + x2 * (-15.0 + x2 * (105.0 + x2 * (-945.0)))));
  return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double inverse_mills(double x) {
  if (x > -30.0) return std::exp(-0.5 * x * x - kLogSqrt2Pi - log_normal_cdf(x));
  const double x2 = 1.0 / (x * x);
  const double series =
      1.0 + x2 * (-1.0 + x2 * (3.0 + x2 * (-15.0 + x2 * (105.0 + x2 * (-945.0)))));
  return -x / series;
}

double TobitKernel::evaluate(std::size_t row, std::span<const double> eta, std::span<double> grad,
                             std::span<double> hess) const {
  const double xb = eta[0];
  const double s = eta[1];
  const double sigma = std::exp(s);
  const double y = y_(static_cast<Eigen::Index>(row));
  if (y <= limit_) {
    const double c = (limit_ - xb) / sigma;
    const double value = log_normal_cdf(c);
    if (grad.empty()) return value;
    const double lam = inverse_mills(c);
    grad[0] = -lam / sigma;
    grad[1] = -lam * c;
    if (!hess.empty()) {
      const double k = c + lam;
      hess[0] = -lam * k / (sigma * sigma);
      hess[1] = hess[2] = (lam / sigma) * (1.0 - c * k);
      hess[3] = lam * c * (1.0 - c * k);
    }
    return value;
  }
  const double z = (y - xb) / sigma;
  const double value = -kLogSqrt2Pi - s - 0.5 * z * z;
  if (grad.empty()) return value;
  grad[0] = z / sigma;
  grad[1] = z * z - 1.0;
  if (!hess.empty()) {
    hess[0] = -1.0 / (sigma * sigma);
    hess[1] = hess[2] = -2.0 * z / sigma;
    hess[3] = -2.0 * z * z;
  }
  return value;
}

double NegBinKernel::evaluate(std::size_t row, std::span<const double> eta, std::span<double> grad,
                              std::span<double> hess) const {
  const double y = y_(static_cast<Eigen::Index>(row));
  auto t = nb_terms(y, eta[0], eta[1], !grad.empty(), !hess.empty());
  if (!grad.empty()) {
    grad[0] = t.d_eta;
    grad[1] = t.d_a;
  }
  if (!hess.empty()) {
    hess[0] = t.h_ee;
    hess[1] = hess[2] = t.h_ea;
    hess[3] = t.h_aa;
  }
  return t.value;
}

double ZinbKernel::evaluate(std::size_t row, std::span<const double> eta, std::span<double> grad,
                            std::span<double> hess) const {
  const double y = y_(static_cast<Eigen::Index>(row));
  const double zeta = eta[1];
  const bool need_grad = !grad.empty(), need_hess = !hess.empty();
  const double pi = logistic(zeta);
  // hess layout: index order (count, inflate, ln alpha), row-major 3 x 3.
  if (y > 0.0) {
    auto t = nb_terms(y, eta[0], eta[2], need_grad, need_hess);
    if (need_grad) {
      grad[0] = t.d_eta;
      grad[1] = -pi;
      grad[2] = t.d_a;
    }
    if (need_hess) {
      hess[0] = t.h_ee;
      hess[1] = hess[3] = 0.0;
      hess[2] = hess[6] = t.h_ea;
      hess[4] = -pi * (1.0 - pi);
      hess[5] = hess[7] = 0.0;
      hess[8] = t.h_aa;
    }
    return t.value - softplus(zeta);
  }
  // Zero: l = ln(e^zeta + p0) - softplus(zeta), with L0 = ln p0 the NB zero
  // log-probability, whose derivatives are the NB terms at y = 0.
  auto t0 = nb_terms(0.0, eta[0], eta[2], need_grad, need_hess);
  const double l0 = t0.value;
  const double value = log_add_exp(zeta, l0) - softplus(zeta);
  if (!need_grad) return value;
  const double w = logistic(l0 - zeta);  // posterior weight of the NB component
  grad[0] = w * t0.d_eta;
  grad[1] = (1.0 - w) - pi;
  grad[2] = w * t0.d_a;
  if (need_hess) {
    const double ww = w * (1.0 - w);
    hess[0] = w * t0.h_ee + ww * t0.d_eta * t0.d_eta;
    hess[2] = hess[6] = w * t0.h_ea + ww * t0.d_eta * t0.d_a;
    hess[8] = w * t0.h_aa + ww * t0.d_a * t0.d_a;
    hess[4] = ww - pi * (1.0 - pi);
    hess[1] = hess[3] = -ww * t0.d_eta;
    hess[5] = hess[7] = -ww * t0.d_a;
  }
  return value;
}

LogLikelihood::LogLikelihood(std::vector<RowMatrix> blocks,
                             std::shared_ptr<const ObservationKernel> kernel, int threads)
    : blocks_(std::move(blocks)), kernel_(std::move(kernel)), threads_(std::max(1, threads)) {
  if (static_cast<int>(blocks_.size()) != kernel_->index_count())
    throw Error(ErrorCode::InvalidArgument, "block count does not match kernel index count");
  rows_ = blocks_.front().rows();
  for (const auto& b : blocks_) {
    if (b.rows() != rows_) throw Error(ErrorCode::InvalidArgument, "design blocks differ in rows");
    offsets_.push_back(dim_);
    dim_ += b.cols();
  }
}

Evaluation LogLikelihood::evaluate(const Eigen::VectorXd& theta, int order) const {
  if (theta.size() != dim_) throw Error(ErrorCode::InvalidArgument, "parameter dimension");
  const int m = kernel_->index_count();
  const Eigen::Index chunks = (rows_ + kChunkRows - 1) / kChunkRows;
  std::vector<Evaluation> partial(static_cast<std::size_t>(chunks));

  auto run_chunk = [&](Eigen::Index c) {
    Evaluation& ev = partial[static_cast<std::size_t>(c)];
    if (order >= 1) ev.gradient = Eigen::VectorXd::Zero(dim_);
    if (order >= 2) ev.hessian = Eigen::MatrixXd::Zero(dim_, dim_);
    double eta[3], grad[3], hess[9];
    std::span<double> gspan = order >= 1 ? std::span<double>(grad, static_cast<std::size_t>(m)) : std::span<double>();
    std::span<double> hspan = order >= 2 ? std::span<double>(hess, static_cast<std::size_t>(m * m)) : std::span<double>();
    const Eigen::Index end = std::min(rows_, (c + 1) * kChunkRows);
    for (Eigen::Index i = c * kChunkRows; i < end; ++i) {
      for (int b = 0; b < m; ++b) {
        const auto& X = blocks_[static_cast<std::size_t>(b)];
        eta[b] = X.row(i).dot(theta.segment(offsets_[static_cast<std::size_t>(b)], X.cols()));
      }
      ev.value += kernel_->evaluate(static_cast<std::size_t>(i), std::span<const double>(eta, static_cast<std::size_t>(m)),
                                    gspan, hspan);
      if (order < 1) continue;
      for (int b = 0; b < m; ++b) {
        const auto& X = blocks_[static_cast<std::size_t>(b)];
        ev.gradient.segment(offsets_[static_cast<std::size_t>(b)], X.cols()) += grad[b] * X.row(i).transpose();
      }
      if (order < 2) continue;
      for (int b = 0; b < m; ++b) {
        const auto& Xb = blocks_[static_cast<std::size_t>(b)];
        for (int d = 0; d <= b; ++d) {
          const auto& Xd = blocks_[static_cast<std::size_t>(d)];
          const double h = hess[b * m + d];
          if (h == 0.0) continue;
          ev.hessian.block(offsets_[static_cast<std::size_t>(b)], offsets_[static_cast<std::size_t>(d)], Xb.cols(), Xd.cols())
              .noalias() += h * Xb.row(i).transpose() * Xd.row(i);
        }
      }
    }
  };

  const int workers = static_cast<int>(std::min<Eigen::Index>(threads_, chunks));
  if (workers <= 1) {
    for (Eigen::Index c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (Eigen::Index c = w; c < chunks; c += workers) run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }

  Evaluation out;
  if (order >= 1) out.gradient = Eigen::VectorXd::Zero(dim_);
  if (order >= 2) out.hessian = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const auto& p : partial) {
    out.value += p.value;
    if (order >= 1) out.gradient += p.gradient;
    if (order >= 2) out.hessian += p.hessian;
  }
  if (order >= 2) {
    // Only blocks on and below the block diagonal were accumulated; within
    // diagonal blocks the full outer product was, so mirror the strict
    // lower block triangle.
    for (int b = 0; b < m; ++b)
      for (int d = 0; d < b; ++d) {
        const auto ob = offsets_[static_cast<std::size_t>(b)], od = offsets_[static_cast<std::size_t>(d)];
        const auto nb = blocks_[static_cast<std::size_t>(b)].cols(), nd = blocks_[static_cast<std::size_t>(d)].cols();
        out.hessian.block(od, ob, nd, nb) = out.hessian.block(ob, od, nb, nd).transpose();
      }
  }
  return out;
}

Eigen::VectorXd LogLikelihood::pointwise(const Eigen::VectorXd& theta) const {
  if (theta.size() != dim_) throw Error(ErrorCode::InvalidArgument, "parameter dimension");
  const int m = kernel_->index_count();
  Eigen::VectorXd out(rows_);
  double eta[3];
  for (Eigen::Index i = 0; i < rows_; ++i) {
    for (int b = 0; b < m; ++b) {
      const auto& X = blocks_[static_cast<std::size_t>(b)];
      eta[b] = X.row(i).dot(theta.segment(offsets_[static_cast<std::size_t>(b)], X.cols()));
    }
    out(i) = kernel_->evaluate(static_cast<std::size_t>(i), std::span<const double>(eta, static_cast<std::size_t>(m)), {}, {});
  }
  return out;
}

}  // namespace rlflow
