#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "xdof/channel.hpp"
#include "xdof/scheduler.hpp"
#include "xdof/transmitter.hpp"

namespace xdof {

enum class ObservationKind {
  kDesiredPhase1,       // L_i^1: the receiver's own phase-1 broadcast
  kInterferencePhase1,  // I_i: another receiver's broadcast, kept for later
  kCombinedPhase2,      // L_i + I_i from a pair slot the receiver belongs to
  kDiscarded,           // pair slot not involving the receiver
};

std::string_view to_string(ObservationKind kind);

struct Observation {
  std::size_t slot = 0;
  Complex value;
  ObservationKind kind = ObservationKind::kDiscarded;
  /// Receiver-copy the desired part belongs to (desired and combined only).
  std::optional<Endpoint> endpoint;
  /// For combined entries: phase-1 slot whose stored observation carries the
  /// same interference.
  std::optional<std::size_t> linked_slot;
  /// Transmit scale of the slot; the receiver divides it back out.
  double scale = 1.0;
};

/// Every received value, indexed [receiver][slot].
struct ObservationLog {
  std::vector<std::vector<Observation>> entries;

  const Observation& at(std::size_t receiver, std::size_t slot) const;
};

ObservationLog observe_all(const Schedule& schedule, const TransmitPlan& plan,
                           const ChannelRealization& channels,
                           const MessageSet& messages, const NoiseField& noise);

/// Throws scheme_error if the log's kinds or links are inconsistent with the
/// schedule.
void validate_log(const Schedule& schedule, const ObservationLog& log);

/// One interference-free equation recovered by subtraction.
struct SubtractionRow {
  Endpoint endpoint;
  std::size_t combined_slot = 0;
  std::size_t stored_slot = 0;
  double scale = 1.0;
  /// Coefficients on W_{i,1..M}^{copy}.
  std::vector<Complex> coefficients;
  /// Y_i(combined) / scale - Y_i(stored).
  Complex value;
};

/// Subtracts the stored phase-1 interference from each combined phase-2
/// observation of `receiver`.
///
/// The coefficient rows come from ground-truth channels and the transmit
/// plan; receivers are assumed to know their own effective channels.
std::vector<SubtractionRow> cancel_interference(
    const Schedule& schedule, const TransmitPlan& plan,
    const ChannelRealization& channels, const ObservationLog& log,
    std::size_t receiver);

struct RowSource {
  Endpoint endpoint;
  std::size_t slot = 0;
  std::optional<std::size_t> stored_slot;
  double scale = 1.0;
};

/// y = G w + z with Cov(z) = sigma, for one receiver's kM desired messages.
/// Unknowns are ordered copy-major: index = copy * M + transmitter.
struct LinearSystem {
  std::size_t receiver = 0;
  std::size_t transmitters = 0;
  std::size_t copies = 1;
  Eigen::MatrixXcd gain;
  Eigen::VectorXcd observations;
  Eigen::MatrixXd covariance;
  std::vector<RowSource> rows;

  std::size_t unknowns() const { return copies * transmitters; }
};

/// Builds the receiver's system. Rows per copy: the direct phase-1 row first,
/// then subtraction rows in slot order. `noise_variance` sets the covariance
/// scale (0 for the noiseless model).
LinearSystem assemble_system(const Schedule& schedule, const TransmitPlan& plan,
                             const ChannelRealization& channels,
                             const ObservationLog& log, std::size_t receiver,
                             double noise_variance);

struct DecodeOptions {
  double max_condition = 1e12;
};

struct DecodeResult {
  bool success = false;
  Eigen::VectorXcd estimate;
  std::size_t rank = 0;
  double condition = 0.0;
  double residual = 0.0;
};

/// Solves the system; whitened least squares when a covariance is present.
/// A numerically singular gain matrix yields success = false with
/// diagnostics, never an exception.
DecodeResult decode(const LinearSystem& system,
                    const DecodeOptions& options = {});

/// True messages of `receiver` in the system's unknown order.
Eigen::VectorXcd desired_messages(const MessageSet& messages,
                                  std::size_t receiver);

}  // namespace xdof
