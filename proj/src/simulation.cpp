#include "xdof/simulation.hpp"

namespace xdof {

Trial run_trial(const Schedule& schedule, std::uint64_t seed,
                const TrialOptions& options) {
  const std::size_t slots = schedule.total_slots();
  CsitTable csit = build_csit_table(schedule);
  ChannelRealization channels =
      generate_channels(schedule.transmitters, schedule.receivers, slots, seed);
  MessageSet messages =
      draw_messages(schedule.transmitters, schedule.receivers, schedule.copies,
                    seed, options.message_power);
  TransmitPlan plan =
      build_transmit_plan(schedule, channels, csit, options.plan);
  const NoiseField noise = options.noise.draw(schedule.receivers, slots);
  ObservationLog log = observe_all(schedule, plan, channels, messages, noise);

  std::vector<LinearSystem> systems;
  for (std::size_t i = 0; i < schedule.receivers; ++i) {
    systems.push_back(assemble_system(schedule, plan, channels, log, i,
                                      options.noise.effective_variance()));
  }
  return Trial{schedule,        std::move(csit), std::move(channels),
               std::move(messages), std::move(plan), std::move(log),
               std::move(systems)};
}

std::vector<ReceiverOutcome> decode_trial(const Trial& trial,
                                          const DecodeOptions& options) {
  std::vector<ReceiverOutcome> out;
  for (const LinearSystem& system : trial.systems) {
    ReceiverOutcome o;
    o.receiver = system.receiver;
    o.result = decode(system, options);
    const Eigen::VectorXcd truth =
        desired_messages(trial.messages, system.receiver);
    o.relative_error = (o.result.estimate - truth).norm() / truth.norm();
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace xdof
