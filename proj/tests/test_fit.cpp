#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "vrtraffic/fit.hpp"

#include "oracles.hpp"
#include "reference_models.hpp"

using namespace vrtraffic;
using test_helpers::kBeatSaberCloudIat;
using test_helpers::kBeatSaberCloudSize;

TEST_CASE("fitting rejects degenerate inputs") {
  const std::vector<double> constant(100, 5.0);
  CHECK_THROWS_WITH(fit_loglogistic(constant),
                    "degenerate samples: zero variance");
  CHECK_THROWS_AS(fit_burr(constant), DomainError);

  std::vector<double> with_zero(100, 2.0);
  with_zero[3] = 0.0;
  CHECK_THROWS_AS(fit_loglogistic(with_zero), DomainError);
  std::vector<double> negative(100, 2.0);
  negative[7] = -1.0;
  CHECK_THROWS_AS(fit_burr(negative), DomainError);

  const std::vector<double> few{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(fit_loglogistic(few), DomainError);
}

TEST_CASE("loglogistic fit recovers the generating model") {
  const auto xs = sample(kBeatSaberCloudSize, 50000, 2024);
  const FitResult fit = fit_loglogistic(xs);
  REQUIRE(fit.model.is_loglogistic());
  const auto fitted = std::get<LogLogisticParams>(fit.model.params);

  const double ks = test_oracles::ks_distance(
      [&](double x) { return loglogistic_cdf(x, fitted); },
      [&](double x) { return loglogistic_cdf(x, kBeatSaberCloudSize); },
      loglogistic_quantile(1e-4, kBeatSaberCloudSize),
      loglogistic_quantile(1.0 - 1e-4, kBeatSaberCloudSize));
  CHECK(ks < 0.01);
  CHECK(fit.n_samples == xs.size());

  // MLE by definition beats the true parameters on the sample
  CHECK(fit.log_likelihood >=
        log_likelihood(xs, DistributionModel{kBeatSaberCloudSize}) - 1e-6);
}

TEST_CASE("burr fit recovers the generating model") {
  const auto xs = sample(kBeatSaberCloudIat, 50000, 4096);
  const FitResult fit = fit_burr(xs);
  REQUIRE_FALSE(fit.model.is_loglogistic());
  const auto fitted = std::get<BurrParams>(fit.model.params);

  // c and k trade off; compare CDFs, not raw parameters
  const double ks = test_oracles::ks_distance(
      [&](double x) { return burr_cdf(x, fitted); },
      [&](double x) { return burr_cdf(x, kBeatSaberCloudIat); },
      burr_quantile(1e-4, kBeatSaberCloudIat),
      burr_quantile(1.0 - 1e-4, kBeatSaberCloudIat));
  CHECK(ks < 0.01);
  CHECK(fit.log_likelihood >=
        log_likelihood(xs, DistributionModel{kBeatSaberCloudIat}) - 1e-6);
}

TEST_CASE("r_squared is near one when the model is the truth") {
  const auto xs = sample(kBeatSaberCloudSize, 1000000, 555);
  const double r2 = r_squared(
      xs, [&](double x) { return loglogistic_pdf(x, kBeatSaberCloudSize); },
      100);
  CHECK(r2 > 0.99);
}

TEST_CASE("r_squared input validation") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  auto flat = [](double) { return 0.5; };
  CHECK_THROWS_AS(r_squared(xs, flat, 5), DomainError);  // bins < 10
  const std::vector<double> constant(20, 2.0);
  CHECK_THROWS_WITH(r_squared(constant, flat, 10), "degenerate range: max == min");
}

TEST_CASE("fit results serialize to the model-file format and back") {
  const auto xs = sample(kBeatSaberCloudSize, 5000, 1);
  const FitResult fit = fit_loglogistic(xs);
  const std::string json = model_to_json(fit);
  CHECK(json.find("\"dist\":\"loglogistic\"") != std::string::npos);
  CHECK(json.find("\"params\":{\"mu\":") != std::string::npos);
  CHECK(json.find("\"r2\":") != std::string::npos);
  CHECK(json.find("\"n\":5000") != std::string::npos);

  const ModelFile back = model_from_json(json);
  REQUIRE(back.model.is_loglogistic());
  const auto p1 = std::get<LogLogisticParams>(fit.model.params);
  const auto p2 = std::get<LogLogisticParams>(back.model.params);
  CHECK(p1.mu == Catch::Approx(p2.mu).epsilon(1e-12));
  CHECK(p1.sigma == Catch::Approx(p2.sigma).epsilon(1e-12));
  CHECK(back.n == 5000);
}

TEST_CASE("burr model files round-trip") {
  const std::string json =
      R"({"dist":"burr","params":{"alpha":10.56,"c":19.21,"k":0.61},"r2":0.98,"n":1000})";
  const ModelFile mf = model_from_json(json);
  REQUIRE_FALSE(mf.model.is_loglogistic());
  const auto p = std::get<BurrParams>(mf.model.params);
  CHECK(p.alpha == 10.56);
  CHECK(p.c == 19.21);
  CHECK(p.k == 0.61);
  CHECK(mf.r2 == 0.98);
}

TEST_CASE("model json errors are parse errors") {
  CHECK_THROWS_AS(model_from_json("{"), ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"dist":"gamma","params":{}})"), ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"dist":"burr","params":{"alpha":1}})"),
                  ParseError);
}
