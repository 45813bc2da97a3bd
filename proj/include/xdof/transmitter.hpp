#pragma once

#include <cstddef>
#include <vector>

#include "xdof/channel.hpp"
#include "xdof/scheduler.hpp"

namespace xdof {

/// One channel coefficient a precoder looked at.
struct ChannelRead {
  std::size_t receiver = 0;
  std::size_t transmitter = 0;
  std::size_t slot = 0;     // slot of the coefficient
  std::size_t at_slot = 0;  // slot during which it was read
  bool granted = false;
};

/// Transmitter-side window onto the channel tensor, gated by a CSIT table.
///
/// h_ij(t') is readable during slot t iff receiver i is in P state at t' = t,
/// or in D state at some t' < t. Every read is logged; a forbidden read is
/// logged and then raised as contract_violation.
class CsitView {
 public:
  CsitView(const ChannelRealization& channels, const CsitTable& table);

  void advance_to(std::size_t slot) { current_ = slot; }
  std::size_t current_slot() const noexcept { return current_; }

  Complex read(std::size_t receiver, std::size_t transmitter,
               std::size_t slot);

  const std::vector<ChannelRead>& log() const noexcept { return log_; }

 private:
  const ChannelRealization& channels_;
  const CsitTable& table_;
  std::size_t current_ = 0;
  std::vector<ChannelRead> log_;
};

/// f * W_{message.receiver, j}^{message.copy} for the owning transmitter j.
struct Term {
  Endpoint message;
  Complex coefficient;
};

/// Linear forms sent in one slot: X_j = scale * sum_terms f * W.
///
/// `scale` is common to all transmitters so that phase-2 interference keeps
/// the exact shape of the stored phase-1 observation. It is 1 unless power
/// normalization was requested.
struct SlotPlan {
  std::size_t slot = 0;
  double scale = 1.0;
  std::vector<std::vector<Term>> terms;  // [transmitter]
};

struct PlanOptions {
  /// Scale each phase-2 slot so no transmitter exceeds unit power per
  /// unit-power message.
  bool normalize = false;
};

struct TransmitPlan {
  std::size_t transmitters = 0;
  std::vector<SlotPlan> slots;
  std::vector<ChannelRead> csit_reads;

  /// Evaluates X_1(t)..X_M(t) on concrete messages.
  std::vector<Complex> signals(std::size_t slot,
                               const MessageSet& messages) const;
};

/// X_j = W_ij^c for the receiver-copy served in phase-1 slot `slot`.
std::vector<Complex> phase1_signal(const Schedule& schedule, std::size_t slot,
                                   const MessageSet& messages);

/// Retrospectively precoded linear forms for phase-2 slot `slot` serving
/// {a, b}:
///   X_j = h_bj(t)^-1 h_bj(t_a) W_aj + h_aj(t)^-1 h_aj(t_b) W_bj
/// where t_a, t_b are the phase-1 slots of a and b. The view must already be
/// positioned at `slot`.
SlotPlan phase2_slot_plan(const Schedule& schedule, std::size_t slot,
                          CsitView& csit, const PlanOptions& options = {});

/// Numeric phase-2 signals for `slot` on concrete messages.
std::vector<Complex> phase2_precode(const Schedule& schedule, std::size_t slot,
                                    const MessageSet& messages, CsitView& csit,
                                    const PlanOptions& options = {});

TransmitPlan build_transmit_plan(const Schedule& schedule,
                                 const ChannelRealization& channels,
                                 const CsitTable& csit,
                                 const PlanOptions& options = {});

/// Checks recorded reads against the table.
struct CsitAudit {
  std::size_t forbidden_reads = 0;
  std::size_t none_state_reads = 0;
  std::size_t perfect_reads = 0;
  std::size_t delayed_reads = 0;
  /// P-state cells (receiver, slot) that no precoder needed.
  std::size_t unread_perfect_cells = 0;

  bool clean() const {
    return forbidden_reads == 0 && none_state_reads == 0 &&
           unread_perfect_cells == 0;
  }
};

CsitAudit audit_csit_reads(const std::vector<ChannelRead>& reads,
                           const CsitTable& table);

}  // namespace xdof
