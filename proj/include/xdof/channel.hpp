#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xdof {

using Complex = std::complex<double>;

/// Fading tensor h[i][j][t]: receiver i, transmitter j, slot t.
///
/// Entries are finite and nonzero; the constructor rejects anything else so
/// phase-2 precoders can invert any coefficient they are allowed to read.
class ChannelRealization {
 public:
  ChannelRealization(std::size_t receivers, std::size_t transmitters,
                     std::size_t slots, std::uint64_t seed,
                     std::vector<Complex> values);

  /// Every coefficient equal to `value`; handy for closed-form checks.
  static ChannelRealization constant(std::size_t receivers,
                                     std::size_t transmitters,
                                     std::size_t slots, Complex value);

  std::size_t receivers() const noexcept { return receivers_; }
  std::size_t transmitters() const noexcept { return transmitters_; }
  std::size_t slots() const noexcept { return slots_; }
  std::uint64_t seed() const noexcept { return seed_; }

  Complex at(std::size_t receiver, std::size_t transmitter,
             std::size_t slot) const;

  std::span<const Complex> values() const noexcept { return values_; }

  friend bool operator==(const ChannelRealization&,
                         const ChannelRealization&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t t) const {
    return (i * transmitters_ + j) * slots_ + t;
  }

  std::size_t receivers_;
  std::size_t transmitters_;
  std::size_t slots_;
  std::uint64_t seed_;
  std::vector<Complex> values_;
};

/// i.i.d. CN(0,1) coefficients for M transmitters, N receivers, T slots.
/// Deterministic in `seed`. Exact zeros are redrawn.
ChannelRealization generate_channels(std::size_t transmitters,
                                     std::size_t receivers, std::size_t slots,
                                     std::uint64_t seed);

/// One realization of receiver noise, indexed [receiver][slot].
class NoiseField {
 public:
  NoiseField(std::size_t receivers, std::size_t slots);
  NoiseField(std::size_t receivers, std::size_t slots,
             std::vector<Complex> values);

  std::size_t receivers() const noexcept { return receivers_; }
  std::size_t slots() const noexcept { return slots_; }
  Complex at(std::size_t receiver, std::size_t slot) const;

 private:
  std::size_t receivers_;
  std::size_t slots_;
  std::vector<Complex> values_;
};

struct NoiseModel {
  bool enabled = false;
  double variance = 1.0;
  std::uint64_t seed = 0;

  static NoiseModel off() { return {}; }
  static NoiseModel unit(std::uint64_t seed) { return {true, 1.0, seed}; }

  /// Effective per-sample variance (0 when disabled).
  double effective_variance() const { return enabled ? variance : 0.0; }

  /// CN(0, variance) samples, or exact zeros when disabled.
  NoiseField draw(std::size_t receivers, std::size_t slots) const;
};

/// Draws one CN(0, variance) sample per entry from `engine_seed`.
std::vector<Complex> draw_complex_gaussian(std::size_t count, double variance,
                                           std::uint64_t engine_seed);

/// Y_i(t) = sum_j h_ij(t) x_j without noise.
Complex received_signal(const ChannelRealization& channels,
                        std::span<const Complex> x, std::size_t slot,
                        std::size_t receiver);

/// Y_i(t) = sum_j h_ij(t) x_j + n_i(t).
Complex received_signal(const ChannelRealization& channels,
                        std::span<const Complex> x, std::size_t slot,
                        std::size_t receiver, const NoiseField& noise);

/// Desired messages W_ij^c, indexed [receiver i][transmitter j][copy c].
class MessageSet {
 public:
  MessageSet(std::size_t transmitters, std::size_t receivers,
             std::size_t copies);
  MessageSet(std::size_t transmitters, std::size_t receivers,
             std::size_t copies, std::vector<Complex> values);

  std::size_t transmitters() const noexcept { return transmitters_; }
  std::size_t receivers() const noexcept { return receivers_; }
  std::size_t copies() const noexcept { return copies_; }

  Complex at(std::size_t receiver, std::size_t transmitter,
             std::size_t copy) const;
  Complex& at(std::size_t receiver, std::size_t transmitter, std::size_t copy);

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t c) const {
    return (i * transmitters_ + j) * copies_ + c;
  }

  std::size_t transmitters_;
  std::size_t receivers_;
  std::size_t copies_;
  std::vector<Complex> values_;
};

/// CN(0, power) messages, deterministic in `seed`.
MessageSet draw_messages(std::size_t transmitters, std::size_t receivers,
                         std::size_t copies, std::uint64_t seed,
                         double power = 1.0);

}  // namespace xdof
