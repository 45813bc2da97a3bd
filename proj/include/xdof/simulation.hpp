#pragma once

#include <cstdint>
#include <vector>

#include "xdof/channel.hpp"
#include "xdof/receiver.hpp"
#include "xdof/scheduler.hpp"
#include "xdof/transmitter.hpp"

namespace xdof {

struct TrialOptions {
  PlanOptions plan;
  NoiseModel noise;
  double message_power = 1.0;
};

/// Everything one end-to-end run produces, kept for inspection.
struct Trial {
  Schedule schedule;
  CsitTable csit;
  ChannelRealization channels;
  MessageSet messages;
  TransmitPlan plan;
  ObservationLog log;
  std::vector<LinearSystem> systems;
};

/// Draws channels and messages from `seed` and runs both phases.
Trial run_trial(const Schedule& schedule, std::uint64_t seed,
                const TrialOptions& options = {});

struct ReceiverOutcome {
  std::size_t receiver = 0;
  DecodeResult result;
  /// ||w_hat - w|| / ||w|| against the transmitted messages.
  double relative_error = 0.0;
};

std::vector<ReceiverOutcome> decode_trial(const Trial& trial,
                                          const DecodeOptions& options = {});

}  // namespace xdof
