#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace xdof {

/// Which of the four constructions applies to an (M, N) pair.
enum class SchemeCase {
  kMGeNGeneral,     // M >= N, not (M even and N odd)
  kMGeNEvenMOddN,   // M >= N, M even, N odd: doubled
  kNGeMEvenN,       // N > M, N even
  kNGeMOddN,        // N > M, N odd: doubled
};

std::string_view to_string(SchemeCase c);
std::optional<SchemeCase> scheme_case_from_string(std::string_view name);

/// A (receiver, copy) pair. With replication k = 2 every receiver owns two
/// independent message sets, and phase-2 slots may pair copies freely.
struct Endpoint {
  std::size_t receiver = 0;
  std::size_t copy = 0;

  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

struct Phase1Slot {
  std::size_t slot = 0;
  Endpoint served;

  friend bool operator==(const Phase1Slot&, const Phase1Slot&) = default;
};

struct Phase2Slot {
  std::size_t slot = 0;
  std::array<Endpoint, 2> pair;

  bool serves(std::size_t receiver) const {
    return pair[0].receiver == receiver || pair[1].receiver == receiver;
  }
  /// The endpoint of `receiver` in this slot; requires serves(receiver).
  const Endpoint& own(std::size_t receiver) const;
  const Endpoint& partner(std::size_t receiver) const;

  friend bool operator==(const Phase2Slot&, const Phase2Slot&) = default;
};

/// Slot layout of the two-phase scheme for an M x N X channel.
///
/// Slots are numbered 0..T-1; phase 1 occupies [0, kN) and phase 2 the rest.
struct Schedule {
  std::size_t transmitters = 0;  // M
  std::size_t receivers = 0;     // N
  SchemeCase scheme = SchemeCase::kMGeNGeneral;
  std::size_t copies = 1;        // replication factor k
  std::vector<Phase1Slot> phase1;
  std::vector<Phase2Slot> phase2;

  std::size_t total_slots() const { return phase1.size() + phase2.size(); }
  bool is_phase1(std::size_t slot) const { return slot < phase1.size(); }

  /// Slot in which `endpoint`'s messages were broadcast in phase 1.
  std::size_t phase1_slot_of(const Endpoint& endpoint) const;
  const Phase2Slot& phase2_at(std::size_t slot) const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

SchemeCase classify_case(std::size_t transmitters, std::size_t receivers);

/// Replication factor for a case: 2 for the doubled constructions, else 1.
std::size_t replication_factor(SchemeCase c);

Schedule build_schedule(std::size_t transmitters, std::size_t receivers);

enum class ScheduleCheck {
  kCounts,            // lengths, coverage and pair-slot balance
  kCountsAndRounds,   // plus disjoint full-coverage rounds (N > M cases)
};

/// Throws scheme_error naming the first broken invariant.
void validate_schedule(const Schedule& schedule,
                       ScheduleCheck check = ScheduleCheck::kCounts);

/// Reorders slot contents within each phase: new slot t of phase p holds
/// what old slot perm_p[t] held.
Schedule permute_schedule(const Schedule& schedule,
                          std::span<const std::size_t> phase1_order,
                          std::span<const std::size_t> phase2_order);

/// (kN)! * (kN(M-1)/2)!: number of distinct within-phase slot orders.
boost::multiprecision::cpp_int count_csit_variants(std::size_t transmitters,
                                                   std::size_t receivers);

enum class CsitState : char { kPerfect = 'P', kDelayed = 'D', kNone = 'N' };

char to_char(CsitState s);
std::optional<CsitState> csit_state_from_char(char c);

/// CSIT availability per receiver (row) and slot (column).
class CsitTable {
 public:
  CsitTable(std::size_t receivers, std::size_t slots, std::size_t phase1_slots);

  std::size_t receivers() const noexcept { return receivers_; }
  std::size_t slots() const noexcept { return slots_; }
  std::size_t phase1_slots() const noexcept { return phase1_slots_; }

  CsitState at(std::size_t receiver, std::size_t slot) const;
  void set(std::size_t receiver, std::size_t slot, CsitState state);

  std::size_t count(std::size_t receiver, CsitState state) const;

  friend bool operator==(const CsitTable&, const CsitTable&) = default;

 private:
  std::size_t receivers_;
  std::size_t slots_;
  std::size_t phase1_slots_;
  std::vector<CsitState> states_;
};

CsitTable build_csit_table(const Schedule& schedule);

}  // namespace xdof
