#include "xdof/receiver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "xdof/errors.hpp"

namespace xdof {

std::string_view to_string(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::kDesiredPhase1: return "DESIRED_PHASE1";
    case ObservationKind::kInterferencePhase1: return "INTERFERENCE_PHASE1";
    case ObservationKind::kCombinedPhase2: return "COMBINED_PHASE2";
    case ObservationKind::kDiscarded: return "DISCARDED";
  }
  return "UNKNOWN";
}

const Observation& ObservationLog::at(std::size_t receiver,
                                      std::size_t slot) const {
  if (receiver >= entries.size() || slot >= entries[receiver].size()) {
    throw std::invalid_argument("observation index out of range");
  }
  return entries[receiver][slot];
}

ObservationLog observe_all(const Schedule& schedule, const TransmitPlan& plan,
                           const ChannelRealization& channels,
                           const MessageSet& messages,
                           const NoiseField& noise) {
  const std::size_t n = schedule.receivers;
  const std::size_t slots = schedule.total_slots();
  if (plan.slots.size() != slots || channels.slots() != slots ||
      noise.slots() != slots || noise.receivers() != n ||
      messages.receivers() != n || messages.copies() != schedule.copies ||
      messages.transmitters() != schedule.transmitters) {
    throw std::invalid_argument("observe_all: dimension mismatch");
  }
  ObservationLog log;
  log.entries.assign(n, {});
  for (std::size_t t = 0; t < slots; ++t) {
    const auto x = plan.signals(t, messages);
    for (std::size_t i = 0; i < n; ++i) {
      Observation obs;
      obs.slot = t;
      obs.value = received_signal(channels, x, t, i, noise);
      obs.scale = plan.slots[t].scale;
      if (schedule.is_phase1(t)) {
        const Endpoint served = schedule.phase1[t].served;
        if (served.receiver == i) {
          obs.kind = ObservationKind::kDesiredPhase1;
          obs.endpoint = served;
        } else {
          obs.kind = ObservationKind::kInterferencePhase1;
        }
      } else {
        const Phase2Slot& p = schedule.phase2_at(t);
        if (p.serves(i)) {
          obs.kind = ObservationKind::kCombinedPhase2;
          obs.endpoint = p.own(i);
          obs.linked_slot = schedule.phase1_slot_of(p.partner(i));
        }
      }
      log.entries[i].push_back(obs);
    }
  }
  validate_log(schedule, log);
  return log;
}

void validate_log(const Schedule& schedule, const ObservationLog& log) {
  const std::size_t n = schedule.receivers;
  const std::size_t k = schedule.copies;
  if (log.entries.size() != n) throw scheme_error("log receiver count");
  for (std::size_t i = 0; i < n; ++i) {
    if (log.entries[i].size() != schedule.total_slots()) {
      throw scheme_error("log slot count");
    }
    std::size_t desired = 0;
    std::size_t interference = 0;
    for (const Observation& obs : log.entries[i]) {
      switch (obs.kind) {
        case ObservationKind::kDesiredPhase1: ++desired; break;
        case ObservationKind::kInterferencePhase1: ++interference; break;
        case ObservationKind::kCombinedPhase2: {
          if (!obs.linked_slot || !obs.endpoint) {
            throw scheme_error("combined observation without a link");
          }
          const Observation& stored = log.at(i, *obs.linked_slot);
          if (stored.kind != ObservationKind::kInterferencePhase1) {
            throw scheme_error("combined observation at slot " +
                               std::to_string(obs.slot) +
                               " links to a non-interference entry");
          }
          break;
        }
        case ObservationKind::kDiscarded: break;
      }
    }
    if (desired != k || interference != k * (n - 1)) {
      throw scheme_error("receiver " + std::to_string(i) +
                         " has wrong phase-1 observation counts");
    }
  }
}

namespace {

// h_ij(t) * f_j(W_i^c) for every transmitter j: the receiver's effective
// coefficients on its own messages in slot t, with the slot scale removed.
std::vector<Complex> desired_coefficients(const TransmitPlan& plan,
                                          const ChannelRealization& channels,
                                          const Endpoint& own,
                                          std::size_t slot) {
  std::vector<Complex> row(plan.transmitters, Complex(0.0, 0.0));
  for (std::size_t j = 0; j < plan.transmitters; ++j) {
    for (const Term& term : plan.slots[slot].terms[j]) {
      if (term.message == own) {
        row[j] += channels.at(own.receiver, j, slot) * term.coefficient;
      }
    }
  }
  return row;
}

}  // namespace

std::vector<SubtractionRow> cancel_interference(
    const Schedule& schedule, const TransmitPlan& plan,
    const ChannelRealization& channels, const ObservationLog& log,
    std::size_t receiver) {
  if (receiver >= schedule.receivers) {
    throw std::invalid_argument("receiver out of range");
  }
  std::vector<SubtractionRow> rows;
  for (const Observation& obs : log.entries.at(receiver)) {
    if (obs.kind != ObservationKind::kCombinedPhase2) continue;
    if (!obs.linked_slot || !obs.endpoint) {
      throw scheme_error("combined observation without a link");
    }
    const std::size_t stored_slot = *obs.linked_slot;
    if (stored_slot >= log.entries[receiver].size() ||
        log.at(receiver, stored_slot).kind !=
            ObservationKind::kInterferencePhase1) {
      throw scheme_error("missing stored interference for slot " +
                         std::to_string(obs.slot));
    }
    SubtractionRow row;
    row.endpoint = *obs.endpoint;
    row.combined_slot = obs.slot;
    row.stored_slot = stored_slot;
    row.scale = obs.scale;
    row.coefficients =
        desired_coefficients(plan, channels, row.endpoint, obs.slot);
    row.value = obs.value / obs.scale - log.at(receiver, stored_slot).value;
    rows.push_back(std::move(row));
  }
  return rows;
}

LinearSystem assemble_system(const Schedule& schedule, const TransmitPlan& plan,
                             const ChannelRealization& channels,
                             const ObservationLog& log, std::size_t receiver,
                             double noise_variance) {
  const std::size_t m = schedule.transmitters;
  const std::size_t k = schedule.copies;
  const auto subtractions =
      cancel_interference(schedule, plan, channels, log, receiver);

  struct PendingRow {
    RowSource source;
    std::vector<Complex> coefficients;
    Complex value;
  };
  std::vector<PendingRow> pending;
  for (std::size_t c = 0; c < k; ++c) {
    const Endpoint own{receiver, c};
    const std::size_t t = schedule.phase1_slot_of(own);
    const Observation& direct = log.at(receiver, t);
    if (direct.kind != ObservationKind::kDesiredPhase1) {
      throw scheme_error("direct observation has the wrong kind");
    }
    pending.push_back({{own, t, std::nullopt, direct.scale},
                       desired_coefficients(plan, channels, own, t),
                       direct.value / direct.scale});
    for (const auto& s : subtractions) {
      if (s.endpoint.copy != c) continue;
      pending.push_back({{s.endpoint, s.combined_slot, s.stored_slot, s.scale},
                         s.coefficients,
                         s.value});
    }
  }
  if (pending.size() != k * m) {
    throw scheme_error("receiver " + std::to_string(receiver) + " has " +
                       std::to_string(pending.size()) + " equations, expected " +
                       std::to_string(k * m));
  }

  LinearSystem sys;
  sys.receiver = receiver;
  sys.transmitters = m;
  sys.copies = k;
  const auto dim = static_cast<Eigen::Index>(k * m);
  sys.gain = Eigen::MatrixXcd::Zero(dim, dim);
  sys.observations = Eigen::VectorXcd::Zero(dim);
  sys.covariance = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const PendingRow& row = pending[static_cast<std::size_t>(r)];
    const auto base = static_cast<Eigen::Index>(row.source.endpoint.copy * m);
    for (std::size_t j = 0; j < m; ++j) {
      sys.gain(r, base + static_cast<Eigen::Index>(j)) = row.coefficients[j];
    }
    sys.observations(r) = row.value;
    sys.rows.push_back(row.source);
  }

  // Row r carries n(slot_r) / scale_r - n(stored_r); covariance follows from
  // which noise samples two rows share.
  for (Eigen::Index r = 0; r < dim; ++r) {
    const RowSource& a = sys.rows[static_cast<std::size_t>(r)];
    for (Eigen::Index q = 0; q < dim; ++q) {
      const RowSource& b = sys.rows[static_cast<std::size_t>(q)];
      double v = 0.0;
      if (a.slot == b.slot) v += 1.0 / (a.scale * b.scale);
      if (a.stored_slot && b.stored_slot && *a.stored_slot == *b.stored_slot) {
        v += 1.0;
      }
      if (b.stored_slot && a.slot == *b.stored_slot) v -= 1.0 / a.scale;
      if (a.stored_slot && *a.stored_slot == b.slot) v -= 1.0 / b.scale;
      sys.covariance(r, q) = noise_variance * v;
    }
  }
  return sys;
}

DecodeResult decode(const LinearSystem& system, const DecodeOptions& options) {
  const Eigen::MatrixXcd& g = system.gain;
  const Eigen::VectorXcd& y = system.observations;
  if (g.rows() != g.cols() || y.size() != g.rows()) {
    throw std::invalid_argument("decode needs a square system");
  }
  DecodeResult result;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double largest = sv.size() ? sv(0) : 0.0;
  const double smallest = sv.size() ? sv(sv.size() - 1) : 0.0;
  result.condition = smallest > 0.0 ? largest / smallest
                                    : std::numeric_limits<double>::infinity();
  const double rank_tol =
      largest * static_cast<double>(g.rows()) * std::numeric_limits<double>::epsilon();
  for (Eigen::Index s = 0; s < sv.size(); ++s) {
    result.rank += sv(s) > rank_tol;
  }

  if (!(result.condition <= options.max_condition)) {
    result.estimate = Eigen::VectorXcd::Zero(g.cols());
    result.residual = y.norm();
    return result;
  }

  if (system.covariance.isZero(0.0)) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(g);
    result.estimate = lu.solve(y);
    // One step of iterative refinement.
    result.estimate += lu.solve(y - g * result.estimate);
  } else {
    Eigen::LLT<Eigen::MatrixXd> chol(system.covariance);
    if (chol.info() != Eigen::Success) {
      throw scheme_error("noise covariance is not positive definite");
    }
    const Eigen::MatrixXcd lower = chol.matrixL().toDenseMatrix().cast<Complex>();
    const auto whiten = lower.triangularView<Eigen::Lower>();
    const Eigen::MatrixXcd gw = whiten.solve(g);
    const Eigen::VectorXcd yw = whiten.solve(y);
    result.estimate = gw.colPivHouseholderQr().solve(yw);
  }
  result.residual = (g * result.estimate - y).norm();
  result.success = result.estimate.allFinite();
  return result;
}

Eigen::VectorXcd desired_messages(const MessageSet& messages,
                                  std::size_t receiver) {
  const std::size_t m = messages.transmitters();
  Eigen::VectorXcd w(static_cast<Eigen::Index>(messages.copies() * m));
  for (std::size_t c = 0; c < messages.copies(); ++c) {
    for (std::size_t j = 0; j < m; ++j) {
      w(static_cast<Eigen::Index>(c * m + j)) = messages.at(receiver, j, c);
    }
  }
  return w;
}

}  // namespace xdof
