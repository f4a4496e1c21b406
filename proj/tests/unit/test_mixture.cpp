#include "doctest.h"

#include <cmath>

#include "delaycorr/errors.hpp"
#include "delaycorr/mixture.hpp"
#include "delaycorr/random.hpp"

using namespace delaycorr;

namespace {

const MixtureParams kRef{0.5, 100.0, 300.0, 50.0};
const MixtureParams kTruth{0.15, 60.0, 400.0, 80.0};

// Values from tests/oracles/mixture_oracle.py (mpmath, 40 digits).
constexpr double kRawAt300 = 0.72510646581606802851;
constexpr double kRenormAt300 = 0.72510646568046474618;
constexpr double kNormalAtZero = 9.865876450376981407e-10;
constexpr double kTruncAt150 = 0.38959272073494122729;
constexpr double kSurvAt3650 = 7.0343085657007147974e-17;
constexpr double kRenormAt665 = 0.99935298894687596733;
constexpr double kTruthRenormAt15 = 0.033180280448915105507;
constexpr double kTruthSurvAt1000 = 8.666652013370938595e-9;

bool rel_close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::fabs(b); }

MixtureParams random_params(Random& rng) {
  return {0.01 + 0.98 * rng.uniform(), std::exp(rng.uniform() * std::log(2000.0)), -500.0 + 2500.0 * rng.uniform(),
          std::exp(rng.uniform() * std::log(2000.0))};
}

}  // namespace

TEST_SUITE("mixture") {

TEST_CASE("raw mixture") {
  CHECK(rel_close(raw_mixture_cdf(kRef, 300.0), kRawAt300, 1e-13));
  CHECK(raw_mixture_cdf(kRef, 1e7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(raw_mixture_cdf({1e-12, 100.0, 300.0, 50.0}, 300.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("normal tails") {
  CHECK(rel_close(normal_cdf(0.0, 300.0, 50.0), kNormalAtZero, 1e-11));
  CHECK(normal_cdf(300.0, 300.0, 50.0) == 0.5);
  CHECK(normal_sf(-1e4, 0.0, 1.0) == 1.0);
  CHECK(rel_close(normal_cdf(-200.0, 0.0, 50.0), normal_sf(200.0, 0.0, 50.0), 1e-14));
}

TEST_CASE("renormalized mixture") {
  CHECK(rel_close(renormalized_cdf(kRef, 300.0), kRenormAt300, 1e-13));
  CHECK(renormalized_cdf(kRef, 300.0) < raw_mixture_cdf(kRef, 300.0));
  CHECK(renormalized_cdf(kRef, 0.0) == 0.0);
  CHECK(renormalized_cdf(kRef, 1e7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel_close(renormalized_cdf(kRef, 665.0), kRenormAt665, 1e-13));
  CHECK(rel_close(renormalized_cdf(kTruth, 15.0), kTruthRenormAt15, 1e-12));
  CHECK(MixtureModel(kRef).cdf(300.0) == renormalized_cdf(kRef, 300.0));
}

TEST_CASE("truncated mixture") {
  CHECK(truncated_cdf(kRef, 600.0, 600.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(truncated_cdf(kRef, 0.0, 600.0) == 0.0);
  CHECK(rel_close(truncated_cdf(kRef, 150.0, 600.0), kTruncAt150, 1e-13));
  CHECK_THROWS_AS(truncated_cdf(kRef, 601.0, 600.0), ValidationError);
  CHECK_THROWS_AS(truncated_cdf(kRef, 0.0, 0.0), ValidationError);
}

TEST_CASE("survival") {
  CHECK(survival(kRef, 0.0) == 1.0);
  CHECK(survival(kRef, 1e6) == 0.0);
  CHECK(survival(kRef, 3650.0) < 1e-15);
  CHECK(rel_close(survival(kRef, 3650.0), kSurvAt3650, 1e-10));
  CHECK(rel_close(survival(kTruth, 1000.0), kTruthSurvAt1000, 1e-10));
  CHECK(survival(kRef, 200.0) == doctest::Approx(1.0 - renormalized_cdf(kRef, 200.0)).epsilon(1e-14));
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(MixtureModel({1.5, 100.0, 300.0, 50.0}), ValidationError);
  CHECK_THROWS_AS(MixtureModel({0.5, 0.0, 300.0, 50.0}), ValidationError);
  CHECK_THROWS_AS(MixtureModel({0.5, 100.0, 300.0, -1.0}), ValidationError);
  CHECK_THROWS_AS(MixtureModel({0.5, 100.0, NAN, 50.0}), ValidationError);
}

TEST_CASE("renormalized converges to raw when the normal sits far above zero") {
  double worst = 0.0;
  for (double x = 0.0; x <= 2000.0; x += 0.5) {
    worst = std::max(worst, std::fabs(renormalized_cdf(kRef, x) - raw_mixture_cdf(kRef, x)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("truncated dominates renormalized below delta max") {
  Random rng{31};
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_params(rng);
    const double dmax = 1.0 + 2000.0 * rng.uniform();
    for (int k = 0; k <= 20; ++k) {
      const double x = k == 20 ? dmax : dmax * k / 20.0;
      CHECK(truncated_cdf(p, x, dmax) >= renormalized_cdf(p, x) - 1e-15);
    }
  }
}

}
