#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vrtraffic/distributions.hpp"
#include "vrtraffic/errors.hpp"

namespace vrtraffic {

struct FitOptions {
  int bins = 100;              // histogram bins for the R^2 score
  int max_iterations = 10000;  // per start
  double tolerance = 1e-8;     // simplex diameter in optimized-parameter space
  std::size_t min_samples = 50;
};

struct FitResult {
  DistributionModel model;
  double r_squared = 0.0;
  double log_likelihood = 0.0;
  std::size_t n_samples = 0;
  int bins = 0;
};

namespace detail {

struct NelderMeadResult {
  std::vector<double> x;
  double fx = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

// Standard downhill simplex (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). Terminates when the simplex inf-norm diameter drops under tol.
inline NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x0, double step, double tol, int max_iter) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> pts(d + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += step;
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fv[i] = f(pts[i]);

  NelderMeadResult result;
  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), trial(d), trial2(d);
  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back();
    const std::size_t second_worst = order[d - 1];

    double diameter = 0.0;
    for (std::size_t i = 1; i <= d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        diameter = std::max(diameter, std::abs(pts[order[i]][j] - pts[best][j]));
    if (diameter < tol) {
      result.x = pts[best];
      result.fx = fv[best];
      result.converged = true;
      result.iterations = iter;
      return result;
    }

    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i <= d; ++i)
        if (i != worst) s += pts[i][j];
      centroid[j] = s / static_cast<double>(d);
    }

    auto blend = [&](std::vector<double>& out, double coef) {
      for (std::size_t j = 0; j < d; ++j)
        out[j] = centroid[j] + coef * (pts[worst][j] - centroid[j]);
    };

    blend(trial, -1.0);  // reflect
    const double fr = f(trial);
    if (fr < fv[best]) {
      blend(trial2, -2.0);  // expand
      const double fe = f(trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        fv[worst] = fe;
      } else {
        pts[worst] = trial;
        fv[worst] = fr;
      }
    } else if (fr < fv[second_worst]) {
      pts[worst] = trial;
      fv[worst] = fr;
    } else {
      blend(trial2, fr < fv[worst] ? -0.5 : 0.5);  // contract
      const double fc = f(trial2);
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = trial2;
        fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {  // shrink toward best
          if (i == best) continue;
          for (std::size_t j = 0; j < d; ++j)
            pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  // Ran out of iterations: report the best vertex, unconverged.
  std::size_t best = 0;
  for (std::size_t i = 1; i <= d; ++i)
    if (fv[i] < fv[best]) best = i;
  result.x = pts[best];
  result.fx = fv[best];
  result.iterations = max_iter;
  return result;
}

inline void check_fit_samples(std::span<const double> samples,
                              const FitOptions& opt) {
  if (samples.size() < opt.min_samples)
    throw DomainError("need at least " + std::to_string(opt.min_samples) +
                      " samples to fit, got " + std::to_string(samples.size()));
  double lo = samples[0], hi = samples[0];
  for (double x : samples) {
    if (!(x > 0.0)) throw DomainError("samples must be strictly positive");
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (lo == hi) throw DomainError("degenerate samples: zero variance");
}

inline double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

inline double quantile_of(std::vector<double> v, double q) {
  const std::size_t idx = static_cast<std::size_t>(
      q * static_cast<double>(v.size() - 1) + 0.5);
  std::nth_element(v.begin(), v.begin() + idx, v.end());
  return v[idx];
}

struct MultiStartOutcome {
  std::vector<double> x;
  double nll = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  int starts_converged = 0;
};

inline MultiStartOutcome run_starts(
    const std::function<double(std::span<const double>)>& objective,
    const std::vector<std::vector<double>>& starts, const FitOptions& opt) {
  MultiStartOutcome out;
  for (const auto& x0 : starts) {
    NelderMeadResult r =
        nelder_mead(objective, x0, 0.25, opt.tolerance, opt.max_iterations);
    if (!r.converged) continue;
    out.any_converged = true;
    out.starts_converged += 1;
    if (r.fx < out.nll) {
      out.nll = r.fx;
      out.x = r.x;
    }
  }
  return out;
}

}  // namespace detail

// Coefficient of determination between a density-normalized histogram of the
// samples and the pdf evaluated at bin centers.
template <typename Pdf>
inline double r_squared(std::span<const double> samples, Pdf&& pdf_fn, int bins) {
  if (bins < 10) throw DomainError("r_squared needs at least 10 bins");
  if (samples.empty()) throw DomainError("r_squared needs samples");
  double lo = samples[0], hi = samples[0];
  for (double x : samples) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (lo == hi) throw DomainError("degenerate range: max == min");

  const double width = (hi - lo) / bins;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double x : samples) {
    auto idx = static_cast<std::size_t>((x - lo) / width);
    if (idx >= counts.size()) idx = counts.size() - 1;  // x == hi
    counts[idx] += 1.0;
  }

  const double n = static_cast<double>(samples.size());
  double mean_density = 0.0;
  for (double& c : counts) {
    c /= n * width;  // density
    mean_density += c;
  }
  mean_density /= static_cast<double>(bins);

  double ss_res = 0.0, ss_tot = 0.0;
  for (int i = 0; i < bins; ++i) {
    const double center = lo + (i + 0.5) * width;
    const double resid = counts[static_cast<std::size_t>(i)] - pdf_fn(center);
    ss_res += resid * resid;
    const double dev = counts[static_cast<std::size_t>(i)] - mean_density;
    ss_tot += dev * dev;
  }
  if (ss_tot == 0.0) throw DomainError("degenerate histogram: zero variance");
  return 1.0 - ss_res / ss_tot;
}

// Maximum-likelihood loglogistic fit. Optimizes (mu, ln sigma) by simplex
// from a quantile-based init, with 4 sigma-scaled starts.
inline FitResult fit_loglogistic(std::span<const double> samples,
                                 const FitOptions& opt = {}) {
  detail::check_fit_samples(samples, opt);

  std::vector<double> lx(samples.size());
  std::transform(samples.begin(), samples.end(), lx.begin(),
                 [](double x) { return std::log(x); });

  const double mu0 = detail::median_of(lx);
  const double iqr = detail::quantile_of(lx, 0.75) - detail::quantile_of(lx, 0.25);
  double sigma0 = iqr / (2.0 * std::log(3.0));
  if (!(sigma0 > 0.0)) {
    double mean = 0.0;
    for (double v : lx) mean += v;
    mean /= static_cast<double>(lx.size());
    double var = 0.0;
    for (double v : lx) var += (v - mean) * (v - mean);
    sigma0 = std::max(std::sqrt(var / static_cast<double>(lx.size())), 1e-3);
  }

  auto objective = [&lx](std::span<const double> theta) {
    const double mu = theta[0];
    const double sigma = std::exp(theta[1]);
    const double log_sigma = theta[1];
    double nll = 0.0;
    for (double l : lx) {
      const double z = (l - mu) / sigma;
      nll -= z - log_sigma - l - 2.0 * detail::softplus(z);
    }
    return std::isfinite(nll) ? nll : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> starts;
  for (double scale : {1.0, 0.5, 2.0, 4.0})
    starts.push_back({mu0, std::log(sigma0 * scale)});

  detail::MultiStartOutcome best = detail::run_starts(objective, starts, opt);
  if (!best.any_converged)
    throw DomainError("loglogistic fit did not converge (0/" +
                      std::to_string(starts.size()) + " starts, n=" +
                      std::to_string(samples.size()) + ")");

  LogLogisticParams params{best.x[0], std::exp(best.x[1])};
  FitResult result;
  result.model = DistributionModel{params};
  result.log_likelihood = -best.nll;
  result.n_samples = samples.size();
  result.bins = opt.bins;
  result.r_squared = r_squared(
      samples, [&](double x) { return loglogistic_pdf(x, params); }, opt.bins);
  return result;
}

// Maximum-likelihood Burr fit. Optimizes (ln alpha, ln c, ln k) from
// alpha0 = median(x), k0 = 1 and four c0 starts spanning flat to very peaked.
inline FitResult fit_burr(std::span<const double> samples,
                          const FitOptions& opt = {}) {
  detail::check_fit_samples(samples, opt);

  std::vector<double> lx(samples.size());
  std::transform(samples.begin(), samples.end(), lx.begin(),
                 [](double x) { return std::log(x); });
  const double alpha0 =
      detail::median_of(std::vector<double>(samples.begin(), samples.end()));

  auto objective = [&lx](std::span<const double> theta) {
    const double log_alpha = theta[0];
    const double c = std::exp(theta[1]);
    const double k = std::exp(theta[2]);
    double nll = 0.0;
    for (double l : lx) {
      const double r = l - log_alpha;
      nll -= theta[2] + theta[1] - log_alpha + (c - 1.0) * r -
             (k + 1.0) * detail::softplus(c * r);
    }
    return std::isfinite(nll) ? nll : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> starts;
  for (double c0 : {1.0, 5.0, 20.0, 50.0})
    starts.push_back({std::log(alpha0), std::log(c0), 0.0});

  detail::MultiStartOutcome best = detail::run_starts(objective, starts, opt);
  if (!best.any_converged)
    throw DomainError("burr fit did not converge (0/" +
                      std::to_string(starts.size()) + " starts, n=" +
                      std::to_string(samples.size()) + ")");

  BurrParams params{std::exp(best.x[0]), std::exp(best.x[1]),
                    std::exp(best.x[2])};
  FitResult result;
  result.model = DistributionModel{params};
  result.log_likelihood = -best.nll;
  result.n_samples = samples.size();
  result.bins = opt.bins;
  result.r_squared = r_squared(
      samples, [&](double x) { return burr_pdf(x, params); }, opt.bins);
  return result;
}

inline double log_likelihood(std::span<const double> samples,
                             const DistributionModel& model) {
  double ll = 0.0;
  for (double x : samples) {
    ll += std::visit([x](const auto& p) {
      if constexpr (std::is_same_v<std::decay_t<decltype(p)>, LogLogisticParams>)
        return loglogistic_log_pdf(x, p);
      else
        return burr_log_pdf(x, p);
    }, model.params);
  }
  return ll;
}

// --- model file: the exchange format between `fit` and `generate` ---

struct ModelFile {
  DistributionModel model;
  double r2 = 0.0;
  std::size_t n = 0;
};

inline ModelFile to_model_file(const FitResult& fit) {
  return ModelFile{fit.model, fit.r_squared, fit.n_samples};
}

inline std::string model_to_json(const ModelFile& mf) {
  nlohmann::ordered_json j;
  if (mf.model.is_loglogistic()) {
    const auto& p = std::get<LogLogisticParams>(mf.model.params);
    j["dist"] = "loglogistic";
    j["params"] = {{"mu", p.mu}, {"sigma", p.sigma}};
  } else {
    const auto& p = std::get<BurrParams>(mf.model.params);
    j["dist"] = "burr";
    j["params"] = {{"alpha", p.alpha}, {"c", p.c}, {"k", p.k}};
  }
  j["r2"] = mf.r2;
  j["n"] = mf.n;
  return j.dump();
}

inline std::string model_to_json(const FitResult& fit) {
  return model_to_json(to_model_file(fit));
}

inline ModelFile model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid model json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dist") || !j.contains("params"))
    throw ParseError("model json needs 'dist' and 'params'");
  ModelFile mf;
  const std::string dist = j["dist"].get<std::string>();
  const auto& params = j["params"];
  auto need = [&](const char* key) -> double {
    if (!params.contains(key) || !params[key].is_number())
      throw ParseError("model params missing numeric field", 0, key);
    return params[key].get<double>();
  };
  if (dist == "loglogistic") {
    LogLogisticParams p{need("mu"), need("sigma")};
    detail::check_params(p);
    mf.model = DistributionModel{p};
  } else if (dist == "burr") {
    BurrParams p{need("alpha"), need("c"), need("k")};
    detail::check_params(p);
    mf.model = DistributionModel{p};
  } else {
    throw ParseError("unknown dist '" + dist + "'", 0, "dist");
  }
  if (j.contains("r2") && j["r2"].is_number()) mf.r2 = j["r2"].get<double>();
  if (j.contains("n") && j["n"].is_number_integer())
    mf.n = j["n"].get<std::size_t>();
  return mf;
}

}  // namespace vrtraffic
