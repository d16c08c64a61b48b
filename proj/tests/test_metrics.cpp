// Copyright 2026 The BeamsNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "beamsnet/metrics.hpp"
#include "beamsnet/rng.hpp"

using namespace bn;

namespace {

std::vector<double> random_series(std::size_t n, RngStream& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-3.0, 3.0);
  return v;
}

// Independent direct-sum recomputation of all four metrics.
struct Oracle {
  double rmse, mae, r2, vaf;
};

Oracle brute_force(const std::vector<double>& x,
                   const std::vector<double>& xh) {
  const double n = static_cast<double>(x.size());
  double se = 0.0, ae = 0.0, mx = 0.0, me = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    se += (x[i] - xh[i]) * (x[i] - xh[i]);
    ae += std::abs(x[i] - xh[i]);
    mx += x[i];
    me += x[i] - xh[i];
  }
  mx /= n;
  me /= n;
  double ss_tot = 0.0, var_e = 0.0, var_x = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ss_tot += (x[i] - mx) * (x[i] - mx);
    var_x += (x[i] - mx) * (x[i] - mx);
    const double e = x[i] - xh[i];
    var_e += (e - me) * (e - me);
  }
  var_x /= n;
  var_e /= n;
  return {std::sqrt(se / n), ae / n, 1.0 - se / ss_tot,
          100.0 * (1.0 - var_e / var_x)};
}

}  // namespace

TEST_CASE("perfect prediction limits") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(metrics::rmse(x, x) == 0.0);
  CHECK(metrics::mae(x, x) == 0.0);
  CHECK(metrics::r2(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(metrics::vaf(x, x) == doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("hand arithmetic fixture x=[1,2,3], xh=[1,2,4]") {
  const std::vector<double> x{1, 2, 3}, xh{1, 2, 4};
  CHECK(metrics::rmse(x, xh) ==
        doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
  CHECK(metrics::mae(x, xh) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("mean predictor has r2 = 0") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> xh(5, 3.0);
  CHECK(metrics::r2(x, xh) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constant truth makes r2 and vaf undefined") {
  const std::vector<double> x(4, 2.0), xh{1, 2, 3, 4};
  CHECK_THROWS_AS(metrics::r2(x, xh), std::domain_error);
  CHECK_THROWS_AS(metrics::vaf(x, xh), std::domain_error);
}

TEST_CASE("length mismatch is rejected") {
  const std::vector<double> x{1, 2, 3}, xh{1, 2};
  CHECK_THROWS_AS(metrics::rmse(x, xh), std::invalid_argument);
  CHECK_THROWS_AS(metrics::mae(x, xh), std::invalid_argument);
  CHECK_THROWS_AS(metrics::r2(x, xh), std::invalid_argument);
  CHECK_THROWS_AS(metrics::vaf(x, xh), std::invalid_argument);
}

TEST_CASE("all four metrics agree with the direct-sum oracle to 1e-12") {
  RngStream rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_series(200, rng);
    const auto xh = random_series(200, rng);
    const Oracle o = brute_force(x, xh);
    CHECK(metrics::rmse(x, xh) == doctest::Approx(o.rmse).epsilon(1e-12));
    CHECK(metrics::mae(x, xh) == doctest::Approx(o.mae).epsilon(1e-12));
    CHECK(metrics::r2(x, xh) == doctest::Approx(o.r2).epsilon(1e-12));
    CHECK(metrics::vaf(x, xh) == doctest::Approx(o.vaf).epsilon(1e-12));
  }
}

TEST_CASE("rmse >= mae and r2 <= 1 and vaf <= 100 on random series") {
  RngStream rng(56);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_series(50, rng);
    const auto xh = random_series(50, rng);
    CHECK(metrics::rmse(x, xh) >= metrics::mae(x, xh));
    CHECK(metrics::r2(x, xh) <= 1.0);
    CHECK(metrics::vaf(x, xh) <= 100.0 + 1e-12);
  }
}

TEST_CASE("rmse triangle-inequality behavior under constant shift") {
  RngStream rng(57);
  for (double c : {0.5, 2.0, 10.0}) {
    const auto x = random_series(80, rng);
    auto xh = random_series(80, rng);
    const double base = metrics::rmse(x, xh);
    for (auto& v : xh) v += c;
    CHECK(metrics::rmse(x, xh) >= c - base - 1e-12);
  }
}

TEST_CASE("vaf is 100 exactly when the error is constant") {
  const std::vector<double> x{1, 2, 3, 4};
  std::vector<double> xh{1.5, 2.5, 3.5, 4.5};  // constant offset
  CHECK(metrics::vaf(x, xh) == doctest::Approx(100.0).epsilon(1e-12));
  xh[0] += 0.1;  // break the constancy
  CHECK(metrics::vaf(x, xh) < 100.0 - 1e-9);
}

TEST_CASE("improvement percentages reproduce the published table values") {
  CHECK(metrics::improvement(0.009938, 0.003503) ==
        doctest::Approx(64.75).epsilon(1e-3));
  // Published value 62.86 is a rounding slip; exact arithmetic gives 62.87.
  CHECK(metrics::improvement(0.009938, 0.003690) ==
        doctest::Approx(62.87).epsilon(1e-3));
  CHECK(metrics::improvement(0.5, 0.5) == 0.0);
  CHECK_THROWS_AS(metrics::improvement(0.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(metrics::improvement(-1.0, 0.1), std::domain_error);
}

TEST_CASE("norm_series computes Euclidean norms") {
  const std::vector<Vec3> v{{3, 4, 0}, {0, 0, 2}, {1, 2, 2}};
  const auto n = metrics::norm_series(v);
  REQUIRE(n.size() == 3);
  CHECK(n[0] == doctest::Approx(5.0));
  CHECK(n[1] == doctest::Approx(2.0));
  CHECK(n[2] == doctest::Approx(3.0));
}

TEST_CASE("make_report populates every field and the optional improvement") {
  const std::vector<double> x{1, 2, 3, 4}, xh{1.1, 1.9, 3.2, 3.9};
  const metrics::EvalReport r = metrics::make_report(x, xh, 1.0);
  CHECK(r.n == 4);
  CHECK(r.rmse == doctest::Approx(metrics::rmse(x, xh)));
  CHECK(r.mae == doctest::Approx(metrics::mae(x, xh)));
  CHECK(r.r2 == doctest::Approx(metrics::r2(x, xh)));
  CHECK(r.vaf == doctest::Approx(metrics::vaf(x, xh)));
  REQUIRE(r.improvement_vs_baseline.has_value());
  CHECK(*r.improvement_vs_baseline ==
        doctest::Approx(metrics::improvement(1.0, r.rmse)));
  const metrics::EvalReport r2 = metrics::make_report(x, xh);
  CHECK_FALSE(r2.improvement_vs_baseline.has_value());
}
