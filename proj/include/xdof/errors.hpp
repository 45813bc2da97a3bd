#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xdof {

/// Configuration the scheme cannot be built for (e.g. a single receiver).
class unsupported_configuration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructed schedule, log or system broke one of its structural
/// invariants. Always indicates a bug, never bad user input.
class scheme_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A precoder read channel state the CSIT table does not grant.
class contract_violation : public std::logic_error {
 public:
  contract_violation(std::size_t receiver, std::size_t transmitter,
                     std::size_t read_slot, std::size_t current_slot);

  std::size_t receiver() const noexcept { return receiver_; }
  std::size_t transmitter() const noexcept { return transmitter_; }
  std::size_t read_slot() const noexcept { return read_slot_; }
  std::size_t current_slot() const noexcept { return current_slot_; }

 private:
  std::size_t receiver_;
  std::size_t transmitter_;
  std::size_t read_slot_;
  std::size_t current_slot_;
};

}  // namespace xdof
