#include "xdof/scheduler.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "xdof/errors.hpp"

namespace xdof {

namespace {

using Pair = std::array<Endpoint, 2>;

Pair make_pair(Endpoint a, Endpoint b) {
  if (b < a) std::swap(a, b);
  return {a, b};
}

// All pairs {a, b}, a < b, in lexicographic order.
std::vector<Pair> lexicographic_round(std::size_t n, std::size_t copy) {
  std::vector<Pair> out;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      out.push_back(make_pair({a, copy}, {b, copy}));
    }
  }
  return out;
}

// Factor `round` of the circle-method 1-factorization of K_n, n even.
std::vector<Pair> one_factor(std::size_t n, std::size_t round,
                             std::size_t copy) {
  const std::size_t m = n - 1;
  std::vector<Pair> out;
  out.push_back(make_pair({round % m, copy}, {m, copy}));
  for (std::size_t s = 1; s < n / 2; ++s) {
    out.push_back(make_pair({(round + s) % m, copy},
                            {(round + m - s) % m, copy}));
  }
  return out;
}

// Near-1-factor of K_n, n odd, leaving vertex `bye` unmatched.
std::vector<Pair> near_one_factor(std::size_t n, std::size_t bye,
                                  std::size_t copy) {
  std::vector<Pair> out;
  for (std::size_t s = 1; s <= (n - 1) / 2; ++s) {
    out.push_back(make_pair({(bye + s) % n, copy}, {(bye + n - s) % n, copy}));
  }
  return out;
}

// 2-factor {i, i + d mod n} of K_n; n odd and 1 <= d <= (n - 1) / 2.
std::vector<Pair> circulant_factor(std::size_t n, std::size_t d,
                                   std::size_t copy) {
  std::vector<Pair> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(make_pair({i, copy}, {(i + d) % n, copy}));
  }
  return out;
}

// Pairs on one copy in which every receiver appears exactly `degree` times,
// degree < n - 1. For odd n the degree is always even here.
std::vector<Pair> regular_remainder(std::size_t n, std::size_t degree,
                                    std::size_t copy) {
  std::vector<Pair> out;
  if (n % 2 == 0) {
    for (std::size_t r = 0; r < degree; ++r) {
      auto f = one_factor(n, r, copy);
      out.insert(out.end(), f.begin(), f.end());
    }
  } else {
    if (degree % 2 != 0) {
      throw scheme_error("odd-degree remainder on an odd receiver count");
    }
    for (std::size_t d = 1; d <= degree / 2; ++d) {
      auto f = circulant_factor(n, d, copy);
      out.insert(out.end(), f.begin(), f.end());
    }
  }
  return out;
}

void append(std::vector<Pair>& dst, const std::vector<Pair>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

std::vector<Pair> phase2_pairs(std::size_t m, std::size_t n, SchemeCase c) {
  std::vector<Pair> pairs;
  switch (c) {
    case SchemeCase::kMGeNGeneral: {
      const std::size_t full = (m - 1) / (n - 1);
      const std::size_t rest = (m - 1) % (n - 1);
      for (std::size_t r = 0; r < full; ++r) append(pairs, lexicographic_round(n, 0));
      append(pairs, regular_remainder(n, rest, 0));
      break;
    }
    case SchemeCase::kMGeNEvenMOddN: {
      const std::size_t full = (m - 1) / (n - 1);
      const std::size_t rest = (m - 1) % (n - 1);  // odd
      for (std::size_t r = 0; r < full; ++r) {
        append(pairs, lexicographic_round(n, 0));
        append(pairs, lexicographic_round(n, 1));
      }
      for (std::size_t d = 1; d <= rest / 2; ++d) {
        append(pairs, circulant_factor(n, d, 0));
        append(pairs, circulant_factor(n, d, 1));
      }
      // One cross-copy perfect matching supplies the last odd appearance.
      for (std::size_t i = 0; i < n; ++i) {
        pairs.push_back(make_pair({i, 0}, {(i + 1) % n, 1}));
      }
      break;
    }
    case SchemeCase::kNGeMEvenN:
      for (std::size_t r = 0; r + 1 < m; ++r) append(pairs, one_factor(n, r, 0));
      break;
    case SchemeCase::kNGeMOddN:
      for (std::size_t r = 0; r + 1 < m; ++r) {
        const std::size_t next = (r + 1) % n;
        append(pairs, near_one_factor(n, r, 0));
        append(pairs, near_one_factor(n, next, 1));
        pairs.push_back(make_pair({r, 0}, {next, 1}));
      }
      break;
  }
  return pairs;
}

bool is_permutation_of(std::span<const std::size_t> order, std::size_t n) {
  if (order.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (std::size_t v : order) {
    if (v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

boost::multiprecision::cpp_int factorial(std::size_t n) {
  boost::multiprecision::cpp_int f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

[[noreturn]] void reject(const std::string& what) {
  throw scheme_error("schedule invariant violated: " + what);
}

}  // namespace

std::string_view to_string(SchemeCase c) {
  switch (c) {
    case SchemeCase::kMGeNGeneral: return "M_GE_N_GENERAL";
    case SchemeCase::kMGeNEvenMOddN: return "M_GE_N_EVEN_M_ODD_N";
    case SchemeCase::kNGeMEvenN: return "N_GE_M_EVEN_N";
    case SchemeCase::kNGeMOddN: return "N_GE_M_ODD_N";
  }
  return "UNKNOWN";
}

std::optional<SchemeCase> scheme_case_from_string(std::string_view name) {
  for (auto c : {SchemeCase::kMGeNGeneral, SchemeCase::kMGeNEvenMOddN,
                 SchemeCase::kNGeMEvenN, SchemeCase::kNGeMOddN}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

const Endpoint& Phase2Slot::own(std::size_t receiver) const {
  if (pair[0].receiver == receiver) return pair[0];
  if (pair[1].receiver == receiver) return pair[1];
  throw std::invalid_argument("receiver is not served in this slot");
}

const Endpoint& Phase2Slot::partner(std::size_t receiver) const {
  if (pair[0].receiver == receiver) return pair[1];
  if (pair[1].receiver == receiver) return pair[0];
  throw std::invalid_argument("receiver is not served in this slot");
}

std::size_t Schedule::phase1_slot_of(const Endpoint& endpoint) const {
  for (const auto& s : phase1) {
    if (s.served == endpoint) return s.slot;
  }
  throw scheme_error("endpoint has no phase-1 slot");
}

const Phase2Slot& Schedule::phase2_at(std::size_t slot) const {
  if (slot < phase1.size() || slot >= total_slots()) {
    throw std::invalid_argument("slot " + std::to_string(slot) +
                                " is not a phase-2 slot");
  }
  return phase2[slot - phase1.size()];
}

SchemeCase classify_case(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) {
    throw std::invalid_argument("M and N must both be at least 1");
  }
  if (m >= n) {
    return (m % 2 == 0 && n % 2 == 1) ? SchemeCase::kMGeNEvenMOddN
                                      : SchemeCase::kMGeNGeneral;
  }
  return n % 2 == 0 ? SchemeCase::kNGeMEvenN : SchemeCase::kNGeMOddN;
}

std::size_t replication_factor(SchemeCase c) {
  return (c == SchemeCase::kMGeNEvenMOddN || c == SchemeCase::kNGeMOddN) ? 2
                                                                          : 1;
}

Schedule build_schedule(std::size_t m, std::size_t n) {
  const SchemeCase scheme = classify_case(m, n);
  if (n < 2) {
    throw unsupported_configuration(
        "the scheme needs at least two receivers to form phase-2 pairs");
  }
  Schedule s;
  s.transmitters = m;
  s.receivers = n;
  s.scheme = scheme;
  s.copies = replication_factor(scheme);

  std::size_t slot = 0;
  for (std::size_t c = 0; c < s.copies; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      s.phase1.push_back({slot++, {i, c}});
    }
  }
  for (const auto& p : phase2_pairs(m, n, scheme)) {
    s.phase2.push_back({slot++, p});
  }
  validate_schedule(s, ScheduleCheck::kCountsAndRounds);
  return s;
}

void validate_schedule(const Schedule& s, ScheduleCheck check) {
  const std::size_t m = s.transmitters;
  const std::size_t n = s.receivers;
  const std::size_t k = s.copies;
  if (m == 0 || n < 2) reject("dimensions");
  if (s.scheme != classify_case(m, n)) reject("case tag");
  if (k != replication_factor(s.scheme)) reject("replication factor");
  if ((k * n * (m - 1)) % 2 != 0) reject("phase-2 length is not an integer");
  if (s.phase1.size() != k * n) reject("phase-1 length");
  if (s.phase2.size() != k * n * (m - 1) / 2) reject("phase-2 length");

  std::map<Endpoint, std::size_t> served;
  for (std::size_t t = 0; t < s.phase1.size(); ++t) {
    const auto& p = s.phase1[t];
    if (p.slot != t) reject("phase-1 slot numbering");
    if (p.served.receiver >= n || p.served.copy >= k) reject("phase-1 endpoint");
    ++served[p.served];
  }
  if (served.size() != k * n) reject("phase-1 coverage");
  for (const auto& [e, count] : served) {
    if (count != 1) reject("phase-1 endpoint served more than once");
  }

  std::map<Endpoint, std::size_t> appearances;
  for (std::size_t idx = 0; idx < s.phase2.size(); ++idx) {
    const auto& p = s.phase2[idx];
    if (p.slot != s.phase1.size() + idx) reject("phase-2 slot numbering");
    for (const auto& e : p.pair) {
      if (e.receiver >= n || e.copy >= k) reject("phase-2 endpoint");
      ++appearances[e];
    }
    if (p.pair[0].receiver == p.pair[1].receiver) {
      reject("phase-2 pair repeats a receiver");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      auto it = appearances.find({i, c});
      const std::size_t count = it == appearances.end() ? 0 : it->second;
      if (count != m - 1) {
        reject("receiver " + std::to_string(i) + " copy " + std::to_string(c) +
               " appears in " + std::to_string(count) +
               " phase-2 slots, expected " + std::to_string(m - 1));
      }
    }
  }

  const bool receiver_major = s.scheme == SchemeCase::kNGeMEvenN ||
                              s.scheme == SchemeCase::kNGeMOddN;
  if (check == ScheduleCheck::kCountsAndRounds && receiver_major) {
    const std::size_t round = k * n / 2;
    for (std::size_t start = 0; start < s.phase2.size(); start += round) {
      std::map<Endpoint, std::size_t> seen;
      for (std::size_t idx = start; idx < start + round; ++idx) {
        for (const auto& e : s.phase2[idx].pair) ++seen[e];
      }
      if (seen.size() != k * n) reject("round does not cover every receiver");
    }
  }
}

Schedule permute_schedule(const Schedule& schedule,
                          std::span<const std::size_t> phase1_order,
                          std::span<const std::size_t> phase2_order) {
  if (!is_permutation_of(phase1_order, schedule.phase1.size())) {
    throw std::invalid_argument("phase-1 order is not a permutation of " +
                                std::to_string(schedule.phase1.size()));
  }
  if (!is_permutation_of(phase2_order, schedule.phase2.size())) {
    throw std::invalid_argument("phase-2 order is not a permutation of " +
                                std::to_string(schedule.phase2.size()));
  }
  Schedule out = schedule;
  for (std::size_t t = 0; t < out.phase1.size(); ++t) {
    out.phase1[t].served = schedule.phase1[phase1_order[t]].served;
  }
  for (std::size_t t = 0; t < out.phase2.size(); ++t) {
    out.phase2[t].pair = schedule.phase2[phase2_order[t]].pair;
  }
  validate_schedule(out, ScheduleCheck::kCounts);
  return out;
}

boost::multiprecision::cpp_int count_csit_variants(std::size_t m,
                                                   std::size_t n) {
  const SchemeCase scheme = classify_case(m, n);
  if (n < 2) {
    throw unsupported_configuration("CSIT variants need at least two receivers");
  }
  const std::size_t k = replication_factor(scheme);
  return factorial(k * n) * factorial(k * n * (m - 1) / 2);
}

char to_char(CsitState s) { return static_cast<char>(s); }

std::optional<CsitState> csit_state_from_char(char c) {
  switch (c) {
    case 'P': return CsitState::kPerfect;
    case 'D': return CsitState::kDelayed;
    case 'N': return CsitState::kNone;
    default: return std::nullopt;
  }
}

CsitTable::CsitTable(std::size_t receivers, std::size_t slots,
                     std::size_t phase1_slots)
    : receivers_(receivers),
      slots_(slots),
      phase1_slots_(phase1_slots),
      states_(receivers * slots, CsitState::kNone) {
  if (phase1_slots > slots) {
    throw std::invalid_argument("phase-1 slots exceed table width");
  }
}

CsitState CsitTable::at(std::size_t receiver, std::size_t slot) const {
  if (receiver >= receivers_ || slot >= slots_) {
    throw std::invalid_argument("CSIT table index out of range");
  }
  return states_[receiver * slots_ + slot];
}

void CsitTable::set(std::size_t receiver, std::size_t slot, CsitState state) {
  if (receiver >= receivers_ || slot >= slots_) {
    throw std::invalid_argument("CSIT table index out of range");
  }
  states_[receiver * slots_ + slot] = state;
}

std::size_t CsitTable::count(std::size_t receiver, CsitState state) const {
  std::size_t c = 0;
  for (std::size_t t = 0; t < slots_; ++t) c += at(receiver, t) == state;
  return c;
}

CsitTable build_csit_table(const Schedule& schedule) {
  validate_schedule(schedule, ScheduleCheck::kCounts);
  const std::size_t n = schedule.receivers;
  CsitTable table(n, schedule.total_slots(), schedule.phase1.size());
  for (const auto& p : schedule.phase1) {
    for (std::size_t i = 0; i < n; ++i) {
      table.set(i, p.slot,
                i == p.served.receiver ? CsitState::kNone : CsitState::kDelayed);
    }
  }
  for (const auto& p : schedule.phase2) {
    for (std::size_t i = 0; i < n; ++i) {
      table.set(i, p.slot, p.serves(i) ? CsitState::kPerfect : CsitState::kNone);
    }
  }
  return table;
}

}  // namespace xdof
