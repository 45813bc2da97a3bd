#include "xdof/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "xdof/errors.hpp"

namespace xdof {

namespace {

Json endpoint_json(const Endpoint& e) {
  return Json{{"receiver", e.receiver + 1}, {"copy", e.copy + 1}};
}

std::size_t one_based(const Json& j, const char* key) {
  const auto v = j.at(key).get<std::size_t>();
  if (v == 0) {
    throw std::invalid_argument(std::string("index '") + key +
                                "' must be 1-based");
  }
  return v - 1;
}

Endpoint endpoint_from_json(const Json& j) {
  return {one_based(j, "receiver"), one_based(j, "copy")};
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

std::string message_name(const Endpoint& e, std::size_t copies) {
  std::string s = "W_" + std::to_string(e.receiver + 1);
  if (copies > 1) s += "^" + std::to_string(e.copy + 1);
  return s;
}

}  // namespace

Json to_json(const Schedule& s) {
  Json phase1 = Json::array();
  for (const auto& p : s.phase1) {
    phase1.push_back({{"slot", p.slot + 1},
                      {"receiver", p.served.receiver + 1},
                      {"copy", p.served.copy + 1}});
  }
  Json phase2 = Json::array();
  for (const auto& p : s.phase2) {
    phase2.push_back({{"slot", p.slot + 1},
                      {"pair", Json::array({endpoint_json(p.pair[0]),
                                            endpoint_json(p.pair[1])})}});
  }
  return Json{{"M", s.transmitters},       {"N", s.receivers},
              {"case", to_string(s.scheme)}, {"k", s.copies},
              {"T", s.total_slots()},      {"phase1", phase1},
              {"phase2", phase2}};
}

Schedule schedule_from_json(const Json& j) {
  Schedule s;
  s.transmitters = j.at("M").get<std::size_t>();
  s.receivers = j.at("N").get<std::size_t>();
  const auto name = j.at("case").get<std::string>();
  const auto scheme = scheme_case_from_string(name);
  if (!scheme) throw std::invalid_argument("unknown case '" + name + "'");
  s.scheme = *scheme;
  s.copies = j.at("k").get<std::size_t>();
  for (const auto& p : j.at("phase1")) {
    s.phase1.push_back(
        {one_based(p, "slot"), {one_based(p, "receiver"), one_based(p, "copy")}});
  }
  for (const auto& p : j.at("phase2")) {
    const auto& pair = p.at("pair");
    if (pair.size() != 2) throw std::invalid_argument("pair needs 2 entries");
    s.phase2.push_back({one_based(p, "slot"),
                        {endpoint_from_json(pair[0]), endpoint_from_json(pair[1])}});
  }
  if (j.at("T").get<std::size_t>() != s.total_slots()) {
    throw std::invalid_argument("T does not match slot lists");
  }
  validate_schedule(s);
  return s;
}

Json to_json(const CsitTable& table) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < table.receivers(); ++i) {
    Json row = Json::array();
    for (std::size_t t = 0; t < table.slots(); ++t) {
      row.push_back(std::string(1, to_char(table.at(i, t))));
    }
    rows.push_back(row);
  }
  return Json{{"receivers", table.receivers()},
              {"slots", table.slots()},
              {"phase1_slots", table.phase1_slots()},
              {"states", rows}};
}

CsitTable csit_table_from_json(const Json& j) {
  CsitTable table(j.at("receivers").get<std::size_t>(),
                  j.at("slots").get<std::size_t>(),
                  j.at("phase1_slots").get<std::size_t>());
  const auto& rows = j.at("states");
  if (rows.size() != table.receivers()) {
    throw std::invalid_argument("CSIT table row count mismatch");
  }
  for (std::size_t i = 0; i < table.receivers(); ++i) {
    if (rows[i].size() != table.slots()) {
      throw std::invalid_argument("CSIT table column count mismatch");
    }
    for (std::size_t t = 0; t < table.slots(); ++t) {
      const auto cell = rows[i][t].get<std::string>();
      const auto state =
          cell.size() == 1 ? csit_state_from_char(cell[0]) : std::nullopt;
      if (!state) throw std::invalid_argument("bad CSIT state '" + cell + "'");
      table.set(i, t, *state);
    }
  }
  return table;
}

Json to_json(const TransmitPlan& plan) {
  Json slots = Json::array();
  for (const SlotPlan& sp : plan.slots) {
    Json tx = Json::array();
    for (const auto& terms : sp.terms) {
      Json list = Json::array();
      for (const Term& term : terms) {
        list.push_back({{"receiver", term.message.receiver + 1},
                        {"copy", term.message.copy + 1},
                        {"re", term.coefficient.real()},
                        {"im", term.coefficient.imag()}});
      }
      tx.push_back(list);
    }
    slots.push_back({{"slot", sp.slot + 1}, {"scale", sp.scale}, {"transmitters", tx}});
  }
  return Json{{"M", plan.transmitters}, {"slots", slots}};
}

std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational rational_from_string(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    throw std::invalid_argument("rational must look like p/q: " + text);
  }
  return Rational(std::stoll(text.substr(0, slash)),
                  std::stoll(text.substr(slash + 1)));
}

Json to_json(const DofReport& r) {
  return Json{{"M", r.transmitters},
              {"N", r.receivers},
              {"case", to_string(r.scheme)},
              {"k", r.copies},
              {"T", r.total_slots},
              {"messages", r.messages},
              {"achieved", to_string(r.achieved)},
              {"closed_form", to_string(r.closed_form)},
              {"equal", r.equal}};
}

DofReport dof_report_from_json(const Json& j) {
  DofReport r;
  r.transmitters = j.at("M").get<std::size_t>();
  r.receivers = j.at("N").get<std::size_t>();
  const auto scheme = scheme_case_from_string(j.at("case").get<std::string>());
  if (!scheme) throw std::invalid_argument("unknown case");
  r.scheme = *scheme;
  r.copies = j.at("k").get<std::size_t>();
  r.total_slots = j.at("T").get<std::size_t>();
  r.messages = j.at("messages").get<std::size_t>();
  r.achieved = rational_from_string(j.at("achieved").get<std::string>());
  r.closed_form = rational_from_string(j.at("closed_form").get<std::string>());
  r.equal = j.at("equal").get<bool>();
  return r;
}

Json to_json(const SlopeFit& fit) {
  return Json{{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"residual", fit.residual}};
}

Json decode_record(std::uint64_t seed, const ReceiverOutcome& o) {
  const double cond = o.result.condition;
  return Json{{"seed", seed},
              {"receiver", o.receiver + 1},
              {"rank", o.result.rank},
              {"condition", std::isfinite(cond) ? Json(cond) : Json(nullptr)},
              {"residual", o.result.residual},
              {"success", o.result.success},
              {"relative_error", o.relative_error}};
}

std::string render_csit_table(const CsitTable& table) {
  const std::size_t width = std::to_string(table.slots()).size();
  const std::size_t p1 = table.phase1_slots();
  auto cell = [&](const std::string& s) {
    return std::string(width - std::min(width, s.size()), ' ') + s;
  };
  auto group_width = [&](std::size_t cols) {
    return cols == 0 ? 0 : cols * width + (cols - 1);
  };
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  const std::size_t label_w =
      std::max<std::size_t>(4, 1 + std::to_string(table.receivers()).size());
  const std::size_t g1 = std::max(group_width(p1), std::string("Phase 1").size());

  auto line = [&](const std::string& label, const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
    std::string first, second;
    for (std::size_t c = 0; c < a.size(); ++c) first += (c ? " " : "") + cell(a[c]);
    for (std::size_t c = 0; c < b.size(); ++c) second += (c ? " " : "") + cell(b[c]);
    std::string out = pad(label, label_w) + " | " + pad(first, g1) + " | " + second;
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };

  std::string out;
  {
    std::string head = pad("", label_w) + " | " + pad("Phase 1", g1) + " | Phase 2";
    out += head + "\n";
  }
  std::vector<std::string> a, b;
  for (std::size_t t = 0; t < table.slots(); ++t) {
    (t < p1 ? a : b).push_back(std::to_string(t + 1));
  }
  out += line("Time", a, b);
  for (std::size_t i = 0; i < table.receivers(); ++i) {
    a.clear();
    b.clear();
    for (std::size_t t = 0; t < table.slots(); ++t) {
      (t < p1 ? a : b).push_back(std::string(1, to_char(table.at(i, t))));
    }
    out += line("R" + std::to_string(i + 1), a, b);
  }
  return out;
}

std::string render_schedule(const Schedule& s) {
  std::ostringstream os;
  os << "M=" << s.transmitters << " N=" << s.receivers
     << " case=" << to_string(s.scheme) << " k=" << s.copies
     << " T=" << s.total_slots() << " messages="
     << s.copies * s.transmitters * s.receivers << "\n";
  os << "Phase 1 (" << s.phase1.size() << " slots)\n";
  for (const auto& p : s.phase1) {
    os << "  slot " << p.slot + 1 << ": " << message_name(p.served, s.copies)
       << "\n";
  }
  os << "Phase 2 (" << s.phase2.size() << " slots)\n";
  for (const auto& p : s.phase2) {
    os << "  slot " << p.slot + 1 << ": " << message_name(p.pair[0], s.copies)
       << ", " << message_name(p.pair[1], s.copies) << "\n";
  }
  return os.str();
}

std::string rate_points_csv(std::span<const RatePoint> points) {
  std::ostringstream os;
  const std::size_t n = points.empty() ? 0 : points.front().per_receiver.size();
  os << "snr_db,sum_rate";
  for (std::size_t i = 0; i < n; ++i) os << ",r" << i + 1;
  os << "\n";
  for (const auto& p : points) {
    if (p.per_receiver.size() != n) {
      throw std::invalid_argument("rate points disagree on receiver count");
    }
    os << format_double(p.snr_db) << "," << format_double(p.sum_rate);
    for (double r : p.per_receiver) os << "," << format_double(r);
    os << "\n";
  }
  return os.str();
}

std::vector<RatePoint> rate_points_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("snr_db,sum_rate", 0) != 0) {
    throw std::invalid_argument("rate CSV is missing its header");
  }
  const auto columns =
      static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<RatePoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(std::stod(field));
    if (fields.size() != columns) {
      throw std::invalid_argument("rate CSV row has wrong column count");
    }
    points.push_back({fields[0], fields[1],
                      std::vector<double>(fields.begin() + 2, fields.end())});
  }
  return points;
}

}  // namespace xdof
