#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "xdof/receiver.hpp"
#include "xdof/scheduler.hpp"
#include "xdof/transmitter.hpp"

namespace xdof {

using Rational = boost::rational<std::int64_t>;

/// 2M / (M + 1).
Rational closed_form_dof(std::size_t transmitters);

struct DofReport {
  std::size_t transmitters = 0;
  std::size_t receivers = 0;
  SchemeCase scheme = SchemeCase::kMGeNGeneral;
  std::size_t copies = 1;
  std::size_t total_slots = 0;
  std::size_t messages = 0;  // kMN
  Rational achieved;         // kMN / T
  Rational closed_form;      // 2M / (M + 1)
  bool equal = false;
};

/// Sum DoF from slot accounting alone, in exact arithmetic.
DofReport dof_report(const Schedule& schedule);

struct StateFractions {
  Rational perfect;
  Rational delayed;
  Rational none;
};

struct CsitFractions {
  std::vector<StateFractions> per_receiver;
  StateFractions aggregate;
};

CsitFractions csit_fractions(const CsitTable& table);

struct RatePoint {
  double snr_db = 0.0;
  double sum_rate = 0.0;  // bits per channel use
  std::vector<double> per_receiver;
};

/// SNR in dB to the per-message symbol power (unit noise variance).
double symbol_power(double snr_db);

/// (1/T) log2 det(I + P_s G^H Sigma^-1 G) per receiver, summed.
/// Every system must carry a positive definite covariance.
RatePoint sum_rate(std::span<const LinearSystem> systems,
                   std::size_t total_slots, double snr_db);

struct SweepOptions {
  std::vector<double> snr_db;
  std::vector<std::uint64_t> seeds;
  bool normalize = true;
};

/// Rate points averaged over one channel draw per seed. The same draws are
/// reused at every SNR.
std::vector<RatePoint> rate_sweep(const Schedule& schedule,
                                  const SweepOptions& options);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS deviation from the fitted line
};

/// Least-squares slope of sum rate against log2(P). Needs at least three
/// points spanning 20 dB or more.
SlopeFit dof_slope(std::span<const RatePoint> points);

struct OracleReport {
  bool passed = true;
  std::size_t checks = 0;
  double max_error = 0.0;
  std::string first_failure;
};

/// Hook to corrupt a transmit plan before it is checked.
using PlanTamper = std::function<void(TransmitPlan&, const ChannelRealization&)>;

/// Cross-checks the general pipeline on the 3-user channel against
/// hand-written closed forms for every transmitted signal, every phase-1
/// observation and every subtraction identity, at 1e-12 relative error.
OracleReport oracle_verify_3user(std::uint64_t seed,
                                 const PlanTamper& tamper = {});

}  // namespace xdof
