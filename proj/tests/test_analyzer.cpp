#include <cmath>
#include <numeric>

#include "doctest.h"
#include "xdof/analyzer.hpp"
#include "xdof/errors.hpp"
#include "xdof/simulation.hpp"

using namespace xdof;

TEST_CASE("closed-form DoF") {
  CHECK(closed_form_dof(1) == Rational(1));
  CHECK(closed_form_dof(2) == Rational(4, 3));
  CHECK(closed_form_dof(3) == Rational(3, 2));
  CHECK(closed_form_dof(4) == Rational(8, 5));
  CHECK(closed_form_dof(7) == Rational(7, 4));
}

TEST_CASE("dof_report examples") {
  const DofReport r33 = dof_report(build_schedule(3, 3));
  CHECK(r33.total_slots == 6);
  CHECK(r33.messages == 9);
  CHECK(r33.achieved == Rational(3, 2));
  CHECK(r33.equal);

  const DofReport r22 = dof_report(build_schedule(2, 2));
  CHECK(r22.achieved == Rational(4, 3));

  const DofReport r43 = dof_report(build_schedule(4, 3));
  CHECK(r43.copies == 2);
  CHECK(r43.total_slots == 15);
  CHECK(r43.messages == 24);
  CHECK(r43.achieved == Rational(8, 5));
  CHECK(r43.equal);

  for (std::size_t n = 2; n <= 8; ++n) {
    const DofReport r = dof_report(build_schedule(1, n));
    CHECK(r.achieved == Rational(1));
    CHECK(r.equal);
  }
}

TEST_CASE("achieved DoF equals the closed form over the grid") {
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t n = 2; n <= 8; ++n) {
      const Schedule s = build_schedule(m, n);
      const DofReport r = dof_report(s);
      // Independent count: k M N messages over k N + k N (M - 1) / 2 slots.
      const std::int64_t k = static_cast<std::int64_t>(s.copies);
      const std::int64_t mm = static_cast<std::int64_t>(m);
      const std::int64_t nn = static_cast<std::int64_t>(n);
      CHECK(2 * r.total_slots == static_cast<std::size_t>(k * nn * (mm + 1)));
      CHECK(Rational(k * mm * nn, static_cast<std::int64_t>(r.total_slots)) ==
            Rational(2 * mm, mm + 1));
      CHECK(r.equal);
    }
  }
}

TEST_CASE("CSIT state fractions") {
  const CsitFractions f33 = csit_fractions(build_csit_table(build_schedule(3, 3)));
  CHECK(f33.aggregate.perfect == Rational(1, 3));
  CHECK(f33.aggregate.delayed == Rational(1, 3));
  CHECK(f33.aggregate.none == Rational(1, 3));
  for (const auto& r : f33.per_receiver) CHECK(r.perfect == Rational(1, 3));

  const CsitFractions f22 = csit_fractions(build_csit_table(build_schedule(2, 2)));
  CHECK(f22.aggregate.perfect == Rational(1, 3));
  CHECK(f22.aggregate.delayed == Rational(1, 3));
  CHECK(f22.aggregate.none == Rational(1, 3));

  const CsitFractions f14 = csit_fractions(build_csit_table(build_schedule(1, 4)));
  CHECK(f14.aggregate.perfect == Rational(0));

  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t n = 2; n <= 8; ++n) {
      const CsitFractions f = csit_fractions(build_csit_table(build_schedule(m, n)));
      CHECK(f.aggregate.perfect + f.aggregate.delayed + f.aggregate.none == Rational(1));
      for (const auto& r : f.per_receiver) {
        CHECK(r.perfect + r.delayed + r.none == Rational(1));
        // k(M-1) pair slots per receiver out of kN(M+1)/2.
        const auto mm = static_cast<std::int64_t>(m);
        const auto nn = static_cast<std::int64_t>(n);
        CHECK(r.perfect == Rational(2 * (mm - 1), nn * (mm + 1)));
      }
    }
  }
}

TEST_CASE("symbol power") {
  CHECK(symbol_power(0) == doctest::Approx(1.0));
  CHECK(symbol_power(30) == doctest::Approx(1000.0));
  CHECK(symbol_power(-10) == doctest::Approx(0.1));
}

namespace {

LinearSystem scalar_system(Complex gain, double sigma) {
  LinearSystem sys;
  sys.transmitters = 1;
  sys.gain = Eigen::MatrixXcd::Constant(1, 1, gain);
  sys.observations = Eigen::VectorXcd::Zero(1);
  sys.covariance = Eigen::MatrixXd::Constant(1, 1, sigma);
  return sys;
}

}  // namespace

TEST_CASE("sum_rate on hand-computable systems") {
  SUBCASE("scalar channel") {
    const LinearSystem sys = scalar_system(Complex(0.6, 0.8), 2.0);
    const RatePoint p = sum_rate(std::span(&sys, 1), 4, 20.0);
    CHECK(p.sum_rate == doctest::Approx(std::log2(1.0 + 100.0 / 2.0) / 4.0));
    REQUIRE(p.per_receiver.size() == 1);
    CHECK(p.per_receiver[0] == doctest::Approx(p.sum_rate));
  }
  SUBCASE("vanishing at very low SNR") {
    const LinearSystem sys = scalar_system(1.0, 1.0);
    CHECK(sum_rate(std::span(&sys, 1), 1, -200.0).sum_rate < 1e-15);
  }
  SUBCASE("diagonal system adds per-row rates") {
    LinearSystem sys;
    sys.transmitters = 2;
    sys.gain = Eigen::MatrixXcd::Zero(2, 2);
    sys.gain(0, 0) = 2.0;
    sys.gain(1, 1) = Complex(0, 1);
    sys.covariance = Eigen::MatrixXd::Identity(2, 2);
    sys.observations = Eigen::VectorXcd::Zero(2);
    const double expected = (std::log2(1 + 4 * 10.0) + std::log2(1 + 10.0)) / 3.0;
    CHECK(sum_rate(std::span(&sys, 1), 3, 10.0).sum_rate == doctest::Approx(expected));
  }
  SUBCASE("singular covariance is rejected") {
    const LinearSystem sys = scalar_system(1.0, 0.0);
    CHECK_THROWS_AS(sum_rate(std::span(&sys, 1), 1, 10.0), scheme_error);
  }
}

TEST_CASE("sum rate grows with SNR on a real trial") {
  TrialOptions opt;
  opt.noise = NoiseModel::unit(0);
  opt.plan.normalize = true;
  const Trial t = run_trial(build_schedule(3, 3), 0, opt);
  double previous = -1.0;
  for (double snr = 0; snr <= 60; snr += 10) {
    const double r = sum_rate(t.systems, t.schedule.total_slots(), snr).sum_rate;
    CHECK(r > previous);
    previous = r;
  }
}

TEST_CASE("dof_slope") {
  SUBCASE("exact line") {
    std::vector<RatePoint> pts;
    for (double snr = 40; snr <= 80; snr += 10) {
      pts.push_back({snr, 1.5 * std::log2(symbol_power(snr)) - 2.0, {}});
    }
    const SlopeFit fit = dof_slope(pts);
    CHECK(std::abs(fit.slope - 1.5) < 1e-9);
    CHECK(std::abs(fit.intercept + 2.0) < 1e-7);
    CHECK(fit.residual < 1e-9);
  }
  SUBCASE("too few points") {
    std::vector<RatePoint> pts{{10, 1, {}}, {40, 2, {}}};
    CHECK_THROWS_AS(dof_slope(pts), std::invalid_argument);
  }
  SUBCASE("span too short") {
    std::vector<RatePoint> pts{{10, 1, {}}, {15, 2, {}}, {20, 3, {}}};
    CHECK_THROWS_AS(dof_slope(pts), std::invalid_argument);
  }
}

TEST_CASE("rate_sweep is deterministic and its slope tracks the DoF") {
  SweepOptions opt;
  opt.snr_db = {40, 60, 80};
  opt.seeds.resize(20);
  std::iota(opt.seeds.begin(), opt.seeds.end(), 0);
  const Schedule s = build_schedule(2, 2);
  const auto a = rate_sweep(s, opt);
  const auto b = rate_sweep(s, opt);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].sum_rate == b[i].sum_rate);
    CHECK(a[i].per_receiver.size() == 2);
    CHECK(std::accumulate(a[i].per_receiver.begin(), a[i].per_receiver.end(), 0.0) ==
          doctest::Approx(a[i].sum_rate));
  }
  CHECK(std::abs(dof_slope(a).slope - 4.0 / 3.0) < 0.05 * 4.0 / 3.0);
}

TEST_CASE("3-user oracle") {
  SUBCASE("passes on ten seeds") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const OracleReport r = oracle_verify_3user(seed);
      CAPTURE(r.first_failure);
      CHECK(r.passed);
      CHECK(r.checks > 0);
      CHECK(r.max_error <= 1e-12);
    }
  }
  SUBCASE("catches a precoder missing its channel inverse") {
    const OracleReport r = oracle_verify_3user(
        0, [](TransmitPlan& plan, const ChannelRealization& h) {
          auto& term = plan.slots[3].terms[0][0];
          term.coefficient *= h.at(1, 0, 3);
        });
    CHECK_FALSE(r.passed);
    CHECK(r.first_failure.find("X_1(4)") != std::string::npos);
  }
}
