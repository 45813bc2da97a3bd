#include "xdof/transmitter.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "xdof/errors.hpp"

namespace xdof {

contract_violation::contract_violation(std::size_t receiver,
                                       std::size_t transmitter,
                                       std::size_t read_slot,
                                       std::size_t current_slot)
    : std::logic_error("CSIT access violation: h[" + std::to_string(receiver) +
                       "][" + std::to_string(transmitter) + "](" +
                       std::to_string(read_slot) + ") read during slot " +
                       std::to_string(current_slot)),
      receiver_(receiver),
      transmitter_(transmitter),
      read_slot_(read_slot),
      current_slot_(current_slot) {}

CsitView::CsitView(const ChannelRealization& channels, const CsitTable& table)
    : channels_(channels), table_(table) {
  if (channels.receivers() != table.receivers() ||
      channels.slots() != table.slots()) {
    throw std::invalid_argument("CSIT table does not match channel tensor");
  }
}

Complex CsitView::read(std::size_t receiver, std::size_t transmitter,
                       std::size_t slot) {
  bool granted = false;
  if (receiver < table_.receivers() && slot < table_.slots()) {
    const CsitState state = table_.at(receiver, slot);
    granted = (slot == current_ && state == CsitState::kPerfect) ||
              (slot < current_ && state == CsitState::kDelayed);
  }
  log_.push_back({receiver, transmitter, slot, current_, granted});
  if (!granted) {
    throw contract_violation(receiver, transmitter, slot, current_);
  }
  return channels_.at(receiver, transmitter, slot);
}

std::vector<Complex> TransmitPlan::signals(std::size_t slot,
                                           const MessageSet& messages) const {
  if (slot >= slots.size()) throw std::invalid_argument("slot out of range");
  const SlotPlan& plan = slots[slot];
  std::vector<Complex> x(transmitters, Complex(0.0, 0.0));
  for (std::size_t j = 0; j < transmitters; ++j) {
    for (const Term& term : plan.terms[j]) {
      x[j] += term.coefficient *
              messages.at(term.message.receiver, j, term.message.copy);
    }
    x[j] *= plan.scale;
  }
  return x;
}

namespace {

SlotPlan phase1_slot_plan(const Schedule& schedule, std::size_t slot) {
  if (!schedule.is_phase1(slot)) {
    throw std::invalid_argument("slot " + std::to_string(slot) +
                                " is not a phase-1 slot");
  }
  const Endpoint served = schedule.phase1[slot].served;
  SlotPlan plan{slot, 1.0, {}};
  plan.terms.assign(schedule.transmitters, {Term{served, Complex(1.0, 0.0)}});
  return plan;
}

TransmitPlan single_slot_plan(const Schedule& schedule, SlotPlan plan) {
  TransmitPlan wrapper;
  wrapper.transmitters = schedule.transmitters;
  wrapper.slots.resize(plan.slot + 1);
  wrapper.slots[plan.slot] = std::move(plan);
  return wrapper;
}

}  // namespace

std::vector<Complex> phase1_signal(const Schedule& schedule, std::size_t slot,
                                   const MessageSet& messages) {
  return single_slot_plan(schedule, phase1_slot_plan(schedule, slot))
      .signals(slot, messages);
}

SlotPlan phase2_slot_plan(const Schedule& schedule, std::size_t slot,
                          CsitView& csit, const PlanOptions& options) {
  const Phase2Slot& p = schedule.phase2_at(slot);
  if (csit.current_slot() != slot) {
    throw std::invalid_argument("CSIT view is not positioned at the slot");
  }
  const Endpoint a = p.pair[0];
  const Endpoint b = p.pair[1];
  const std::size_t ta = schedule.phase1_slot_of(a);
  const std::size_t tb = schedule.phase1_slot_of(b);

  SlotPlan plan{slot, 1.0, {}};
  plan.terms.resize(schedule.transmitters);
  double peak = 0.0;
  for (std::size_t j = 0; j < schedule.transmitters; ++j) {
    const Complex hb_now = csit.read(b.receiver, j, slot);
    const Complex ha_now = csit.read(a.receiver, j, slot);
    const Complex hb_then = csit.read(b.receiver, j, ta);
    const Complex ha_then = csit.read(a.receiver, j, tb);
    if (hb_now == Complex(0.0, 0.0) || ha_now == Complex(0.0, 0.0)) {
      throw scheme_error("zero channel coefficient reached the precoder");
    }
    const Complex fa = hb_then / hb_now;
    const Complex fb = ha_then / ha_now;
    plan.terms[j] = {Term{a, fa}, Term{b, fb}};
    peak = std::max(peak, std::norm(fa) + std::norm(fb));
  }
  if (options.normalize && peak > 0.0) plan.scale = 1.0 / std::sqrt(peak);
  return plan;
}

std::vector<Complex> phase2_precode(const Schedule& schedule, std::size_t slot,
                                    const MessageSet& messages, CsitView& csit,
                                    const PlanOptions& options) {
  return single_slot_plan(schedule,
                          phase2_slot_plan(schedule, slot, csit, options))
      .signals(slot, messages);
}

TransmitPlan build_transmit_plan(const Schedule& schedule,
                                 const ChannelRealization& channels,
                                 const CsitTable& csit,
                                 const PlanOptions& options) {
  if (channels.transmitters() != schedule.transmitters ||
      channels.receivers() != schedule.receivers ||
      channels.slots() != schedule.total_slots()) {
    throw std::invalid_argument("channel tensor does not match schedule");
  }
  CsitView view(channels, csit);
  TransmitPlan plan;
  plan.transmitters = schedule.transmitters;
  for (std::size_t t = 0; t < schedule.total_slots(); ++t) {
    view.advance_to(t);
    plan.slots.push_back(schedule.is_phase1(t)
                             ? phase1_slot_plan(schedule, t)
                             : phase2_slot_plan(schedule, t, view, options));
  }
  plan.csit_reads = view.log();
  return plan;
}

CsitAudit audit_csit_reads(const std::vector<ChannelRead>& reads,
                           const CsitTable& table) {
  CsitAudit audit;
  std::set<std::pair<std::size_t, std::size_t>> perfect_seen;
  for (const ChannelRead& r : reads) {
    if (r.receiver >= table.receivers() || r.slot >= table.slots()) {
      ++audit.forbidden_reads;
      continue;
    }
    const CsitState state = table.at(r.receiver, r.slot);
    if (state == CsitState::kNone) ++audit.none_state_reads;
    if (state == CsitState::kPerfect && r.slot == r.at_slot) {
      ++audit.perfect_reads;
      perfect_seen.insert({r.receiver, r.slot});
    } else if (state == CsitState::kDelayed && r.slot < r.at_slot) {
      ++audit.delayed_reads;
    } else {
      ++audit.forbidden_reads;
    }
  }
  for (std::size_t i = 0; i < table.receivers(); ++i) {
    for (std::size_t t = 0; t < table.slots(); ++t) {
      if (table.at(i, t) == CsitState::kPerfect && !perfect_seen.count({i, t})) {
        ++audit.unread_perfect_cells;
      }
    }
  }
  return audit;
}

}  // namespace xdof
