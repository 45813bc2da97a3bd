#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "xdof/analyzer.hpp"
#include "xdof/receiver.hpp"
#include "xdof/scheduler.hpp"
#include "xdof/simulation.hpp"
#include "xdof/transmitter.hpp"

// JSON and text formats. All receiver, transmitter, slot and copy indices in
// serialized output are 1-based, matching how the scheme is usually written.

namespace xdof {

using Json = nlohmann::ordered_json;

Json to_json(const Schedule& schedule);
Schedule schedule_from_json(const Json& j);

Json to_json(const CsitTable& table);
CsitTable csit_table_from_json(const Json& j);

Json to_json(const TransmitPlan& plan);

Json to_json(const DofReport& report);
DofReport dof_report_from_json(const Json& j);

Json to_json(const SlopeFit& fit);

/// {seed, receiver, rank, condition, residual, success, relative_error}
Json decode_record(std::uint64_t seed, const ReceiverOutcome& outcome);

std::string to_string(const Rational& r);
Rational rational_from_string(const std::string& text);

/// Phase-grouped table, one row per receiver:
///
///        | Phase 1 | Phase 2
///   Time | 1 2 3   | 4 5 6
///   R1   | N D D   | P P N
std::string render_csit_table(const CsitTable& table);

std::string render_schedule(const Schedule& schedule);

/// Header: snr_db,sum_rate,r1,...,rN
std::string rate_points_csv(std::span<const RatePoint> points);
std::vector<RatePoint> rate_points_from_csv(const std::string& text);

}  // namespace xdof
