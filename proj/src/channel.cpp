#include "xdof/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "xdof/errors.hpp"

namespace xdof {

namespace {

// Independent streams for channels, messages and noise drawn from one seed.
enum class Stream : std::uint32_t { kChannel = 1, kMessage = 2, kNoise = 3 };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

std::vector<Complex> draw_gaussian(std::mt19937_64& engine, std::size_t count,
                                   double variance, bool reject_zero) {
  std::normal_distribution<double> component(0.0, std::sqrt(variance / 2.0));
  std::vector<Complex> out;
  out.reserve(count);
  while (out.size() < count) {
    Complex z(component(engine), component(engine));
    if (reject_zero && z == Complex(0.0, 0.0)) continue;
    out.push_back(z);
  }
  return out;
}

void require_positive(std::size_t value, const char* name) {
  if (value == 0) {
    throw std::invalid_argument(std::string(name) + " must be at least 1");
  }
}

}  // namespace

ChannelRealization::ChannelRealization(std::size_t receivers,
                                       std::size_t transmitters,
                                       std::size_t slots, std::uint64_t seed,
                                       std::vector<Complex> values)
    : receivers_(receivers),
      transmitters_(transmitters),
      slots_(slots),
      seed_(seed),
      values_(std::move(values)) {
  require_positive(receivers, "receiver count");
  require_positive(transmitters, "transmitter count");
  require_positive(slots, "slot count");
  if (values_.size() != receivers * transmitters * slots) {
    throw std::invalid_argument("channel tensor has wrong number of entries");
  }
  for (const Complex& h : values_) {
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) {
      throw std::invalid_argument("channel coefficient is not finite");
    }
    if (h == Complex(0.0, 0.0)) {
      throw std::invalid_argument("channel coefficient is exactly zero");
    }
  }
}

ChannelRealization ChannelRealization::constant(std::size_t receivers,
                                                std::size_t transmitters,
                                                std::size_t slots,
                                                Complex value) {
  return ChannelRealization(
      receivers, transmitters, slots, 0,
      std::vector<Complex>(receivers * transmitters * slots, value));
}

Complex ChannelRealization::at(std::size_t receiver, std::size_t transmitter,
                               std::size_t slot) const {
  if (receiver >= receivers_ || transmitter >= transmitters_ ||
      slot >= slots_) {
    throw std::invalid_argument("channel index out of range");
  }
  return values_[index(receiver, transmitter, slot)];
}

ChannelRealization generate_channels(std::size_t transmitters,
                                     std::size_t receivers, std::size_t slots,
                                     std::uint64_t seed) {
  require_positive(transmitters, "transmitter count");
  require_positive(receivers, "receiver count");
  require_positive(slots, "slot count");
  auto engine = make_engine(seed, Stream::kChannel);
  auto values =
      draw_gaussian(engine, receivers * transmitters * slots, 1.0, true);
  return ChannelRealization(receivers, transmitters, slots, seed,
                            std::move(values));
}

NoiseField::NoiseField(std::size_t receivers, std::size_t slots)
    : receivers_(receivers),
      slots_(slots),
      values_(receivers * slots, Complex(0.0, 0.0)) {}

NoiseField::NoiseField(std::size_t receivers, std::size_t slots,
                       std::vector<Complex> values)
    : receivers_(receivers), slots_(slots), values_(std::move(values)) {
  if (values_.size() != receivers * slots) {
    throw std::invalid_argument("noise field has wrong number of entries");
  }
}

Complex NoiseField::at(std::size_t receiver, std::size_t slot) const {
  if (receiver >= receivers_ || slot >= slots_) {
    throw std::invalid_argument("noise index out of range");
  }
  return values_[receiver * slots_ + slot];
}

NoiseField NoiseModel::draw(std::size_t receivers, std::size_t slots) const {
  if (!enabled) return NoiseField(receivers, slots);
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("noise variance must be finite and >= 0");
  }
  auto engine = make_engine(seed, Stream::kNoise);
  return NoiseField(receivers, slots,
                    draw_gaussian(engine, receivers * slots, variance, false));
}

std::vector<Complex> draw_complex_gaussian(std::size_t count, double variance,
                                           std::uint64_t engine_seed) {
  std::mt19937_64 engine(engine_seed);
  return draw_gaussian(engine, count, variance, false);
}

Complex received_signal(const ChannelRealization& channels,
                        std::span<const Complex> x, std::size_t slot,
                        std::size_t receiver) {
  if (x.size() != channels.transmitters()) {
    throw std::invalid_argument("signal vector length must equal M");
  }
  if (slot >= channels.slots() || receiver >= channels.receivers()) {
    throw std::invalid_argument("slot or receiver index out of range");
  }
  Complex y(0.0, 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    y += channels.at(receiver, j, slot) * x[j];
  }
  return y;
}

Complex received_signal(const ChannelRealization& channels,
                        std::span<const Complex> x, std::size_t slot,
                        std::size_t receiver, const NoiseField& noise) {
  return received_signal(channels, x, slot, receiver) +
         noise.at(receiver, slot);
}

MessageSet::MessageSet(std::size_t transmitters, std::size_t receivers,
                       std::size_t copies)
    : MessageSet(transmitters, receivers, copies,
                 std::vector<Complex>(transmitters * receivers * copies)) {}

MessageSet::MessageSet(std::size_t transmitters, std::size_t receivers,
                       std::size_t copies, std::vector<Complex> values)
    : transmitters_(transmitters),
      receivers_(receivers),
      copies_(copies),
      values_(std::move(values)) {
  if (values_.size() != transmitters * receivers * copies) {
    throw std::invalid_argument("message tensor has wrong number of entries");
  }
}

Complex MessageSet::at(std::size_t receiver, std::size_t transmitter,
                       std::size_t copy) const {
  if (receiver >= receivers_ || transmitter >= transmitters_ ||
      copy >= copies_) {
    throw std::invalid_argument("message index out of range");
  }
  return values_[index(receiver, transmitter, copy)];
}

Complex& MessageSet::at(std::size_t receiver, std::size_t transmitter,
                        std::size_t copy) {
  if (receiver >= receivers_ || transmitter >= transmitters_ ||
      copy >= copies_) {
    throw std::invalid_argument("message index out of range");
  }
  return values_[index(receiver, transmitter, copy)];
}

MessageSet draw_messages(std::size_t transmitters, std::size_t receivers,
                         std::size_t copies, std::uint64_t seed,
                         double power) {
  auto engine = make_engine(seed, Stream::kMessage);
  return MessageSet(
      transmitters, receivers, copies,
      draw_gaussian(engine, transmitters * receivers * copies, power, false));
}

}  // namespace xdof
