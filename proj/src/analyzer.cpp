#include "xdof/analyzer.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "xdof/errors.hpp"
#include "xdof/simulation.hpp"

namespace xdof {

namespace {

Rational ratio(std::size_t num, std::size_t den) {
  return Rational(static_cast<std::int64_t>(num),
                  static_cast<std::int64_t>(den));
}

}  // namespace

Rational closed_form_dof(std::size_t m) { return ratio(2 * m, m + 1); }

DofReport dof_report(const Schedule& schedule) {
  validate_schedule(schedule);
  DofReport r;
  r.transmitters = schedule.transmitters;
  r.receivers = schedule.receivers;
  r.scheme = schedule.scheme;
  r.copies = schedule.copies;
  r.total_slots = schedule.total_slots();
  r.messages = schedule.copies * schedule.transmitters * schedule.receivers;
  r.achieved = ratio(r.messages, r.total_slots);
  r.closed_form = closed_form_dof(schedule.transmitters);
  r.equal = r.achieved == r.closed_form;
  return r;
}

CsitFractions csit_fractions(const CsitTable& table) {
  CsitFractions out;
  std::size_t p = 0, d = 0, n = 0;
  for (std::size_t i = 0; i < table.receivers(); ++i) {
    const std::size_t pi = table.count(i, CsitState::kPerfect);
    const std::size_t di = table.count(i, CsitState::kDelayed);
    const std::size_t ni = table.count(i, CsitState::kNone);
    out.per_receiver.push_back({ratio(pi, table.slots()),
                                ratio(di, table.slots()),
                                ratio(ni, table.slots())});
    p += pi;
    d += di;
    n += ni;
  }
  const std::size_t cells = table.receivers() * table.slots();
  out.aggregate = {ratio(p, cells), ratio(d, cells), ratio(n, cells)};
  return out;
}

double symbol_power(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

RatePoint sum_rate(std::span<const LinearSystem> systems,
                   std::size_t total_slots, double snr_db) {
  if (total_slots == 0) throw std::invalid_argument("total_slots must be > 0");
  const double power = symbol_power(snr_db);
  RatePoint point;
  point.snr_db = snr_db;
  for (const LinearSystem& sys : systems) {
    Eigen::LLT<Eigen::MatrixXd> chol(sys.covariance);
    if (chol.info() != Eigen::Success || sys.covariance.isZero(0.0)) {
      throw scheme_error("rate evaluation needs a positive definite covariance");
    }
    const Eigen::MatrixXcd lower =
        chol.matrixL().toDenseMatrix().cast<Complex>();
    const Eigen::MatrixXcd whitened =
        lower.triangularView<Eigen::Lower>().solve(sys.gain);
    const auto dim = whitened.cols();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(dim, dim) +
                         power * whitened.adjoint() * whitened;
    Eigen::LLT<Eigen::MatrixXcd> hchol(h);
    if (hchol.info() != Eigen::Success) {
      throw scheme_error("rate matrix is not positive definite");
    }
    double log2det = 0.0;
    const Eigen::MatrixXcd lh = hchol.matrixL();
    for (Eigen::Index r = 0; r < dim; ++r) {
      log2det += 2.0 * std::log2(lh(r, r).real());
    }
    const double rate = log2det / static_cast<double>(total_slots);
    point.per_receiver.push_back(rate);
    point.sum_rate += rate;
  }
  return point;
}

std::vector<RatePoint> rate_sweep(const Schedule& schedule,
                                  const SweepOptions& options) {
  if (options.seeds.empty()) throw std::invalid_argument("sweep needs seeds");
  std::vector<RatePoint> points;
  for (double snr : options.snr_db) {
    points.push_back({snr, 0.0, std::vector<double>(schedule.receivers, 0.0)});
  }
  TrialOptions trial_options;
  trial_options.plan.normalize = options.normalize;
  trial_options.noise = NoiseModel::unit(0);
  for (std::uint64_t seed : options.seeds) {
    trial_options.noise.seed = seed;
    const Trial trial = run_trial(schedule, seed, trial_options);
    for (RatePoint& acc : points) {
      const RatePoint p =
          sum_rate(trial.systems, schedule.total_slots(), acc.snr_db);
      acc.sum_rate += p.sum_rate;
      for (std::size_t i = 0; i < p.per_receiver.size(); ++i) {
        acc.per_receiver[i] += p.per_receiver[i];
      }
    }
  }
  const double draws = static_cast<double>(options.seeds.size());
  for (RatePoint& acc : points) {
    acc.sum_rate /= draws;
    for (double& r : acc.per_receiver) r /= draws;
  }
  return points;
}

SlopeFit dof_slope(std::span<const RatePoint> points) {
  if (points.size() < 3) {
    throw std::invalid_argument("slope fit needs at least 3 points");
  }
  double lo = points[0].snr_db, hi = points[0].snr_db;
  for (const auto& p : points) {
    lo = std::min(lo, p.snr_db);
    hi = std::max(hi, p.snr_db);
  }
  if (hi - lo < 20.0) {
    throw std::invalid_argument("slope fit needs points spanning >= 20 dB");
  }
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& p : points) {
    sx += std::log2(symbol_power(p.snr_db));
    sy += p.sum_rate;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double dx = std::log2(symbol_power(p.snr_db)) - mx;
    sxx += dx * dx;
    sxy += dx * (p.sum_rate - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (const auto& p : points) {
    const double e = p.sum_rate -
                     (fit.intercept + fit.slope * std::log2(symbol_power(p.snr_db)));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

// 1-based accessors over the ground truth of one 3-user run.
class ThreeUserReference {
 public:
  ThreeUserReference(const ChannelRealization& h, const MessageSet& w)
      : h_(h), w_(w) {}

  Complex h(int i, int j, int t) const { return h_.at(i - 1, j - 1, t - 1); }
  Complex hinv(int i, int j, int t) const { return 1.0 / h(i, j, t); }
  Complex w(int i, int j) const { return w_.at(i - 1, j - 1, 0); }

  // X_j(t) in phase 1: the messages of receiver t.
  Complex x_phase1(int j, int t) const { return w(t, j); }

  // X_j(t) in phase 2, written out per slot.
  Complex x_phase2(int j, int t) const {
    switch (t) {
      case 4:
        return hinv(2, j, 4) * h(2, j, 1) * w(1, j) +
               hinv(1, j, 4) * h(1, j, 2) * w(2, j);
      case 5:
        return hinv(3, j, 5) * h(3, j, 1) * w(1, j) +
               hinv(1, j, 5) * h(1, j, 3) * w(3, j);
      case 6:
        return hinv(3, j, 6) * h(3, j, 2) * w(2, j) +
               hinv(2, j, 6) * h(2, j, 3) * w(3, j);
      default:
        throw std::logic_error("not a phase-2 slot");
    }
  }

  // Y_i(t) for t = 1..3: sum_j h_ij(t) W_tj.
  Complex y_phase1(int i, int t) const {
    Complex y = 0;
    for (int j = 1; j <= 3; ++j) y += h(i, j, t) * w(t, j);
    return y;
  }

  // Coefficient on W_ij of the equation receiver i recovers at slot t when
  // paired with receiver b whose broadcast slot is s: h_ij(t) h_bj(t)^-1 h_bj(i).
  Complex recovered_coefficient(int i, int j, int t, int b) const {
    return h(i, j, t) * hinv(b, j, t) * h(b, j, i);
  }

 private:
  const ChannelRealization& h_;
  const MessageSet& w_;
};

class Checker {
 public:
  explicit Checker(OracleReport& report) : report_(report) {}

  void expect(const std::string& label, Complex got, Complex want,
              double operand_scale) {
    ++report_.checks;
    const double scale = std::max({std::abs(want), std::abs(got), operand_scale});
    const double err = scale > 0 ? std::abs(got - want) / scale : 0.0;
    report_.max_error = std::max(report_.max_error, err);
    if (!(err <= 1e-12) && report_.passed) {
      report_.passed = false;
      std::ostringstream os;
      os << label << ": got " << got << ", expected " << want
         << " (relative error " << err << ")";
      report_.first_failure = os.str();
    }
  }

  void expect_true(const std::string& label, bool ok) {
    ++report_.checks;
    if (!ok && report_.passed) {
      report_.passed = false;
      report_.first_failure = label;
    }
  }

 private:
  OracleReport& report_;
};

std::string label(const char* name, int a, int t) {
  return std::string(name) + "_" + std::to_string(a) + "(" + std::to_string(t) +
         ")";
}

}  // namespace

OracleReport oracle_verify_3user(std::uint64_t seed, const PlanTamper& tamper) {
  const Schedule schedule = build_schedule(3, 3);
  const CsitTable csit = build_csit_table(schedule);
  const ChannelRealization channels = generate_channels(3, 3, 6, seed);
  const MessageSet messages = draw_messages(3, 3, 1, seed);
  TransmitPlan plan = build_transmit_plan(schedule, channels, csit);
  if (tamper) tamper(plan, channels);
  const ObservationLog log = observe_all(schedule, plan, channels, messages,
                                         NoiseModel::off().draw(3, 6));

  const ThreeUserReference ref(channels, messages);
  OracleReport report;
  Checker check(report);

  for (int t = 1; t <= 3; ++t) {
    const auto x = plan.signals(static_cast<std::size_t>(t - 1), messages);
    for (int j = 1; j <= 3; ++j) {
      check.expect(label("X", j, t), x[static_cast<std::size_t>(j - 1)],
                   ref.x_phase1(j, t), 0.0);
    }
  }
  for (int t = 4; t <= 6; ++t) {
    const auto x = plan.signals(static_cast<std::size_t>(t - 1), messages);
    for (int j = 1; j <= 3; ++j) {
      check.expect(label("X", j, t), x[static_cast<std::size_t>(j - 1)],
                   ref.x_phase2(j, t), 0.0);
    }
  }
  for (int t = 1; t <= 3; ++t) {
    for (int i = 1; i <= 3; ++i) {
      const Observation& obs = log.at(static_cast<std::size_t>(i - 1),
                                      static_cast<std::size_t>(t - 1));
      check.expect(label("Y", i, t), obs.value, ref.y_phase1(i, t), 0.0);
      check.expect_true(label("kind of Y", i, t),
                        obs.kind == (i == t ? ObservationKind::kDesiredPhase1
                                            : ObservationKind::kInterferencePhase1));
    }
  }

  // (receiver, combined slot, stored slot, partner).
  struct Identity {
    int receiver, slot, stored, partner;
  };
  const Identity identities[] = {
      {1, 4, 2, 2}, {1, 5, 3, 3}, {2, 4, 1, 1},
      {2, 6, 3, 3}, {3, 5, 1, 1}, {3, 6, 2, 2},
  };
  for (const Identity& id : identities) {
    const auto rows = cancel_interference(
        schedule, plan, channels, log, static_cast<std::size_t>(id.receiver - 1));
    const SubtractionRow* row = nullptr;
    for (const auto& r : rows) {
      if (r.combined_slot == static_cast<std::size_t>(id.slot - 1)) row = &r;
    }
    const std::string name = "Y_" + std::to_string(id.receiver) + "(" +
                             std::to_string(id.slot) + ") - Y_" +
                             std::to_string(id.receiver) + "(" +
                             std::to_string(id.stored) + ")";
    check.expect_true(name + " present",
                      row && row->stored_slot ==
                                 static_cast<std::size_t>(id.stored - 1));
    if (!row) continue;
    Complex want = 0;
    double scale = 0;
    for (int j = 1; j <= 3; ++j) {
      const Complex c = ref.recovered_coefficient(id.receiver, j, id.slot, id.partner);
      check.expect(name + " coefficient " + std::to_string(j),
                   row->coefficients[static_cast<std::size_t>(j - 1)], c, 0.0);
      want += c * ref.w(id.receiver, j);
    }
    scale = std::abs(log.at(static_cast<std::size_t>(id.receiver - 1),
                            static_cast<std::size_t>(id.slot - 1)).value) +
            std::abs(log.at(static_cast<std::size_t>(id.receiver - 1),
                            static_cast<std::size_t>(id.stored - 1)).value);
    check.expect(name, row->value, want, scale);
  }

  const std::pair<int, int> unused[] = {{3, 4}, {2, 5}, {1, 6}};
  for (const auto& [i, t] : unused) {
    check.expect_true(label("discarded Y", i, t),
                      log.at(static_cast<std::size_t>(i - 1),
                             static_cast<std::size_t>(t - 1)).kind ==
                          ObservationKind::kDiscarded);
  }
  return report;
}

}  // namespace xdof
