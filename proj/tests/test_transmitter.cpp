#include <cmath>

#include "doctest.h"
#include "xdof/errors.hpp"
#include "xdof/transmitter.hpp"

using namespace xdof;

namespace {

bool near(Complex a, Complex b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

struct Fixture {
  Schedule schedule;
  CsitTable csit;
  ChannelRealization channels;
  MessageSet messages;

  Fixture(std::size_t m, std::size_t n, std::uint64_t seed)
      : schedule(build_schedule(m, n)),
        csit(build_csit_table(schedule)),
        channels(generate_channels(m, n, schedule.total_slots(), seed)),
        messages(draw_messages(m, n, schedule.copies, seed)) {}
};

}  // namespace

TEST_CASE("phase-1 signals carry the served receiver's messages") {
  Fixture f(3, 3, 1);
  for (std::size_t t = 0; t < 3; ++t) {
    const auto x = phase1_signal(f.schedule, t, f.messages);
    for (std::size_t j = 0; j < 3; ++j) CHECK(x[j] == f.messages.at(t, j, 0));
  }
  CHECK_THROWS_AS(phase1_signal(f.schedule, 3, f.messages), std::invalid_argument);
  const MessageSet zero(3, 3, 1);
  for (const Complex& x : phase1_signal(f.schedule, 0, zero)) CHECK(x == Complex(0, 0));
}

TEST_CASE("phase-2 precoder reproduces the 3-user closed forms") {
  Fixture f(3, 3, 4);
  auto h = [&](int i, int j, int t) { return f.channels.at(i - 1, j - 1, t - 1); };
  auto w = [&](int i, int j) { return f.messages.at(i - 1, j - 1, 0); };
  CsitView view(f.channels, f.csit);

  view.advance_to(3);  // slot 4, pair {1,2}
  const auto x4 = phase2_precode(f.schedule, 3, f.messages, view);
  CHECK(near(x4[0], h(2, 1, 1) / h(2, 1, 4) * w(1, 1) + h(1, 1, 2) / h(1, 1, 4) * w(2, 1),
             1e-13));

  view.advance_to(5);  // slot 6, pair {2,3}
  const auto x6 = phase2_precode(f.schedule, 5, f.messages, view);
  CHECK(near(x6[0], h(3, 1, 2) / h(3, 1, 6) * w(2, 1) + h(2, 1, 3) / h(2, 1, 6) * w(3, 1),
             1e-13));

  CHECK_THROWS_AS(phase2_precode(f.schedule, 1, f.messages, view),
                  std::invalid_argument);
}

TEST_CASE("unit channels make the precoder a plain sum") {
  const Schedule s = build_schedule(3, 3);
  const CsitTable csit = build_csit_table(s);
  const auto ones = ChannelRealization::constant(3, 3, 6, Complex(1.0, 0.0));
  const auto w = draw_messages(3, 3, 1, 2);
  CsitView view(ones, csit);
  view.advance_to(4);  // pair {1,3}
  const auto x = phase2_precode(s, 4, w, view);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(near(x[j], w.at(0, j, 0) + w.at(2, j, 0), 1e-15));
  }
}

TEST_CASE("CsitView enforces the CSIT table") {
  Fixture f(3, 3, 0);
  CsitView view(f.channels, f.csit);
  view.advance_to(3);  // R1, R2 in P; R3 in N
  CHECK(view.read(0, 0, 3) == f.channels.at(0, 0, 3));
  CHECK(view.read(1, 0, 0) == f.channels.at(1, 0, 0));  // R2 delayed from slot 1
  try {
    view.read(2, 1, 3);
    FAIL("expected a violation");
  } catch (const contract_violation& e) {
    CHECK(e.receiver() == 2);
    CHECK(e.transmitter() == 1);
    CHECK(e.read_slot() == 3);
    CHECK(e.current_slot() == 3);
  }
  CHECK_THROWS_AS(view.read(0, 0, 0), contract_violation);  // own N slot
  CHECK_THROWS_AS(view.read(0, 0, 4), contract_violation);  // future slot
  view.advance_to(1);
  CHECK_THROWS_AS(view.read(0, 0, 1), contract_violation);  // D only later
  CHECK(view.log().size() == 6);
  CHECK(view.log()[0].granted);
  CHECK_FALSE(view.log()[2].granted);
}

TEST_CASE("transmit plan structure") {
  SUBCASE("3-user phase 1 has unit coefficients") {
    Fixture f(3, 3, 5);
    const auto plan = build_transmit_plan(f.schedule, f.channels, f.csit);
    REQUIRE(plan.slots.size() == 6);
    for (std::size_t t = 0; t < 3; ++t) {
      for (const auto& terms : plan.slots[t].terms) {
        REQUIRE(terms.size() == 1);
        CHECK(terms[0].message.receiver == t);
        CHECK(terms[0].coefficient == Complex(1.0, 0.0));
      }
    }
  }
  SUBCASE("(2,2) has two phase-1 slots and one phase-2 slot") {
    Fixture f(2, 2, 5);
    const auto plan = build_transmit_plan(f.schedule, f.channels, f.csit);
    CHECK(plan.slots.size() == 3);
    CHECK(plan.slots[2].terms[0].size() == 2);
  }
  SUBCASE("every phase-2 slot has exactly two nonzero terms per transmitter") {
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{4, 3}, {3, 5}, {6, 4}}) {
      Fixture f(m, n, 8);
      const auto plan = build_transmit_plan(f.schedule, f.channels, f.csit);
      for (std::size_t t = f.schedule.phase1.size(); t < plan.slots.size(); ++t) {
        const auto& pair = f.schedule.phase2_at(t).pair;
        for (const auto& terms : plan.slots[t].terms) {
          REQUIRE(terms.size() == 2);
          CHECK(terms[0].message == pair[0]);
          CHECK(terms[1].message == pair[1]);
          CHECK(std::abs(terms[0].coefficient) > 0);
          CHECK(std::abs(terms[1].coefficient) > 0);
        }
      }
    }
  }
  SUBCASE("dimension mismatch is rejected") {
    Fixture f(3, 3, 5);
    const auto wrong = generate_channels(3, 3, 5, 0);
    CHECK_THROWS_AS(build_transmit_plan(f.schedule, wrong, f.csit),
                    std::invalid_argument);
  }
}

TEST_CASE("CSIT reads stay inside the table across the grid") {
  for (std::size_t m = 1; m <= 6; ++m) {
    for (std::size_t n = 2; n <= 6; ++n) {
      Fixture f(m, n, m * 10 + n);
      const auto plan = build_transmit_plan(f.schedule, f.channels, f.csit);
      const auto audit = audit_csit_reads(plan.csit_reads, f.csit);
      CAPTURE(m);
      CAPTURE(n);
      CHECK(audit.clean());
      CHECK(audit.forbidden_reads == 0);
      CHECK(audit.none_state_reads == 0);
      // Two current and two delayed coefficients per transmitter per pair slot.
      CHECK(audit.perfect_reads == 2 * m * f.schedule.phase2.size());
      CHECK(audit.delayed_reads == 2 * m * f.schedule.phase2.size());
    }
  }
}

TEST_CASE("audit flags reads the table does not allow") {
  Fixture f(3, 3, 0);
  std::vector<ChannelRead> reads{{2, 0, 3, 3, false}, {0, 0, 1, 1, false}};
  const auto audit = audit_csit_reads(reads, f.csit);
  CHECK(audit.none_state_reads == 1);
  CHECK(audit.forbidden_reads == 2);
  CHECK_FALSE(audit.clean());
}

TEST_CASE("phase-2 interference replicates the stored phase-1 observation") {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{3, 3}, {4, 3}, {5, 4},
                      {2, 5}, {3, 4}, {6, 6}}) {
    for (bool normalize : {false, true}) {
      Fixture f(m, n, 21);
      const auto plan =
          build_transmit_plan(f.schedule, f.channels, f.csit, {normalize});
      for (const auto& p : f.schedule.phase2) {
        for (int side = 0; side < 2; ++side) {
          const Endpoint victim = p.pair[side];
          const Endpoint other = p.pair[1 - side];
          // Keep only the partner's messages: what reaches the victim is
          // pure interference.
          MessageSet only_other(m, n, f.schedule.copies);
          for (std::size_t j = 0; j < m; ++j) {
            only_other.at(other.receiver, j, other.copy) =
                f.messages.at(other.receiver, j, other.copy);
          }
          const auto x = plan.signals(p.slot, only_other);
          const Complex interference =
              received_signal(f.channels, x, p.slot, victim.receiver) /
              plan.slots[p.slot].scale;
          const std::size_t stored = f.schedule.phase1_slot_of(other);
          const auto x_then = phase1_signal(f.schedule, stored, f.messages);
          const Complex kept =
              received_signal(f.channels, x_then, stored, victim.receiver);
          CHECK(std::abs(interference - kept) <= 1e-10 * std::abs(kept));
        }
      }
    }
  }
}

TEST_CASE("normalized plans keep every transmitter within unit power") {
  Fixture f(4, 4, 3);
  const auto plan = build_transmit_plan(f.schedule, f.channels, f.csit, {true});
  for (std::size_t t = f.schedule.phase1.size(); t < plan.slots.size(); ++t) {
    double peak = 0.0;
    for (const auto& terms : plan.slots[t].terms) {
      double power = 0.0;
      for (const auto& term : terms) power += std::norm(term.coefficient);
      peak = std::max(peak, power * plan.slots[t].scale * plan.slots[t].scale);
    }
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto raw = build_transmit_plan(f.schedule, f.channels, f.csit);
  for (const auto& sp : raw.slots) CHECK(sp.scale == 1.0);
}
