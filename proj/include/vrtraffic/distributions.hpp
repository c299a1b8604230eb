#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "vrtraffic/errors.hpp"

namespace vrtraffic {

// Loglogistic: ln X follows a logistic(mu, sigma) law.
struct LogLogisticParams {
  double mu = 0.0;     // location of ln x
  double sigma = 1.0;  // scale, > 0
};

// Burr XII: alpha scales x, c and k shape the body and tail.
struct BurrParams {
  double alpha = 1.0;  // scale, > 0
  double c = 1.0;      // shape, > 0
  double k = 1.0;      // shape, > 0
};

namespace detail {

inline void check_params(const LogLogisticParams& p) {
  if (!(p.sigma > 0.0)) throw DomainError("loglogistic sigma must be positive");
}

inline void check_params(const BurrParams& p) {
  if (!(p.alpha > 0.0 && p.c > 0.0 && p.k > 0.0))
    throw DomainError("burr parameters must be positive");
}

inline void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("probability must lie in (0, 1)");
}

// log(1 + e^t) without overflow.
inline double softplus(double t) {
  if (t > 36.0) return t;
  if (t < -36.0) return std::exp(t);
  return std::log1p(std::exp(t));
}

// Uniform draw in the open interval (0, 1); bit-stable across platforms
// because mt19937_64 output is standardized.
inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

inline double loglogistic_log_pdf(double x, const LogLogisticParams& p) {
  detail::check_params(p);
  if (!(x > 0.0)) throw DomainError("loglogistic pdf requires x > 0");
  const double z = (std::log(x) - p.mu) / p.sigma;
  return z - std::log(p.sigma) - std::log(x) - 2.0 * detail::softplus(z);
}

inline double loglogistic_pdf(double x, const LogLogisticParams& p) {
  detail::check_params(p);
  if (!(x > 0.0)) throw DomainError("loglogistic pdf requires x > 0");
  const double z = (std::log(x) - p.mu) / p.sigma;
  // e^z / (1+e^z)^2 == sech^2(z/2) / 4, stable for large |z|
  const double sech = 1.0 / std::cosh(0.5 * z);
  return sech * sech / (4.0 * p.sigma * x);
}

inline double loglogistic_cdf(double x, const LogLogisticParams& p) {
  detail::check_params(p);
  if (x <= 0.0) return 0.0;
  const double z = (std::log(x) - p.mu) / p.sigma;
  // logistic in z, kept in full relative precision on the small side
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double ez = std::exp(z);
  return ez / (1.0 + ez);
}

inline double loglogistic_quantile(double prob, const LogLogisticParams& p) {
  detail::check_params(p);
  detail::check_probability(prob);
  return std::exp(p.mu + p.sigma * std::log(prob / (1.0 - prob)));
}

// E[X] = e^mu * pi*sigma / sin(pi*sigma), finite only for sigma < 1.
inline double loglogistic_mean(const LogLogisticParams& p) {
  detail::check_params(p);
  if (p.sigma >= 1.0)
    throw DomainError("loglogistic mean is infinite for sigma >= 1");
  const double a = M_PI * p.sigma;
  return std::exp(p.mu) * a / std::sin(a);
}

inline double burr_log_pdf(double x, const BurrParams& p) {
  detail::check_params(p);
  if (!(x > 0.0)) throw DomainError("burr pdf requires x > 0");
  const double r = std::log(x) - std::log(p.alpha);
  return std::log(p.k) + std::log(p.c) - std::log(p.alpha) + (p.c - 1.0) * r -
         (p.k + 1.0) * detail::softplus(p.c * r);
}

inline double burr_pdf(double x, const BurrParams& p) {
  return std::exp(burr_log_pdf(x, p));
}

inline double burr_cdf(double x, const BurrParams& p) {
  detail::check_params(p);
  if (x <= 0.0) return 0.0;
  const double t = p.c * (std::log(x) - std::log(p.alpha));
  // 1 - (1 + e^t)^-k  ==  -expm1(-k * softplus(t))
  return -std::expm1(-p.k * detail::softplus(t));
}

inline double burr_quantile(double prob, const BurrParams& p) {
  detail::check_params(p);
  detail::check_probability(prob);
  // ((1-prob)^(-1/k) - 1)^(1/c), in logs to survive extreme shapes
  const double inner = std::expm1(-std::log1p(-prob) / p.k);
  return p.alpha * std::exp(std::log(inner) / p.c);
}

// E[X] = alpha * Gamma(k - 1/c) * Gamma(1 + 1/c) / Gamma(k), needs k*c > 1.
inline double burr_mean(const BurrParams& p) {
  detail::check_params(p);
  if (p.k * p.c <= 1.0) throw DomainError("burr mean is infinite for k*c <= 1");
  return p.alpha * std::tgamma(p.k - 1.0 / p.c) * std::tgamma(1.0 + 1.0 / p.c) /
         std::tgamma(p.k);
}

struct DistributionModel {
  std::variant<LogLogisticParams, BurrParams> params;

  bool is_loglogistic() const {
    return std::holds_alternative<LogLogisticParams>(params);
  }
};

inline double pdf(const DistributionModel& m, double x) {
  return std::visit([x](const auto& p) {
    if constexpr (std::is_same_v<std::decay_t<decltype(p)>, LogLogisticParams>)
      return loglogistic_pdf(x, p);
    else
      return burr_pdf(x, p);
  }, m.params);
}

inline double cdf(const DistributionModel& m, double x) {
  return std::visit([x](const auto& p) {
    if constexpr (std::is_same_v<std::decay_t<decltype(p)>, LogLogisticParams>)
      return loglogistic_cdf(x, p);
    else
      return burr_cdf(x, p);
  }, m.params);
}

inline double quantile(const DistributionModel& m, double prob) {
  return std::visit([prob](const auto& p) {
    if constexpr (std::is_same_v<std::decay_t<decltype(p)>, LogLogisticParams>)
      return loglogistic_quantile(prob, p);
    else
      return burr_quantile(prob, p);
  }, m.params);
}

// Inverse-CDF sampling from a seeded deterministic generator: the same seed
// always produces the same sequence.
template <typename Params>
inline std::vector<double> sample(const Params& p, std::size_t n,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  if constexpr (std::is_same_v<Params, DistributionModel>) {
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(quantile(p, detail::uniform01(rng)));
  } else if constexpr (std::is_same_v<Params, LogLogisticParams>) {
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(loglogistic_quantile(detail::uniform01(rng), p));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(burr_quantile(detail::uniform01(rng), p));
  }
  return out;
}

}  // namespace vrtraffic
