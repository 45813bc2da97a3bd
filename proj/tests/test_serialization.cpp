#include <cmath>
#include <limits>

#include "doctest.h"
#include "xdof/serialization.hpp"

using namespace xdof;

TEST_CASE("schedule JSON uses 1-based indices") {
  const Json j = to_json(build_schedule(3, 3));
  CHECK(j["M"] == 3);
  CHECK(j["N"] == 3);
  CHECK(j["case"] == "M_GE_N_GENERAL");
  CHECK(j["k"] == 1);
  CHECK(j["T"] == 6);
  CHECK(j["phase1"][0]["slot"] == 1);
  CHECK(j["phase1"][0]["receiver"] == 1);
  CHECK(j["phase1"][0]["copy"] == 1);
  CHECK(j["phase2"][0]["slot"] == 4);
  CHECK(j["phase2"][0]["pair"][0]["receiver"] == 1);
  CHECK(j["phase2"][0]["pair"][1]["receiver"] == 2);
  CHECK(j["phase2"][2]["pair"][0]["receiver"] == 2);
  CHECK(j["phase2"][2]["pair"][1]["receiver"] == 3);
}

TEST_CASE("schedules and tables round-trip over the grid") {
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t n = 2; n <= 8; ++n) {
      const Schedule s = build_schedule(m, n);
      const Json js = Json::parse(to_json(s).dump());
      CHECK(schedule_from_json(js) == s);
      const CsitTable t = build_csit_table(s);
      CHECK(csit_table_from_json(Json::parse(to_json(t).dump())) == t);
      const DofReport r = dof_report(s);
      const DofReport back = dof_report_from_json(Json::parse(to_json(r).dump()));
      CHECK(back.achieved == r.achieved);
      CHECK(back.closed_form == r.closed_form);
      CHECK(back.total_slots == r.total_slots);
      CHECK(back.equal == r.equal);
    }
  }
}

TEST_CASE("malformed schedule JSON is rejected") {
  Json j = to_json(build_schedule(3, 3));
  j["T"] = 7;
  CHECK_THROWS(schedule_from_json(j));
  Json k = to_json(build_schedule(3, 3));
  k["phase2"][0]["pair"][1]["receiver"] = 1;
  CHECK_THROWS(schedule_from_json(k));
}

TEST_CASE("rational strings") {
  CHECK(to_string(Rational(3, 2)) == "3/2");
  CHECK(to_string(Rational(1)) == "1/1");
  CHECK(rational_from_string("8/5") == Rational(8, 5));
  CHECK_THROWS(rational_from_string("2"));
  CHECK_THROWS(rational_from_string("3/0"));
  CHECK_THROWS(rational_from_string("x"));
  const Json j = to_json(dof_report(build_schedule(4, 3)));
  CHECK(j["achieved"] == "8/5");
}

TEST_CASE("CSIT table text rendering") {
  const std::string text = render_csit_table(build_csit_table(build_schedule(3, 3)));
  CHECK(text ==
        "     | Phase 1 | Phase 2\n"
        "Time | 1 2 3   | 4 5 6\n"
        "R1   | N D D   | P P N\n"
        "R2   | D N D   | P N P\n"
        "R3   | D D N   | N P P\n");
}

TEST_CASE("rate points CSV round-trips exactly") {
  std::vector<RatePoint> pts{{40.0, 13.287712379549449, {6.6, 6.687712379549449}},
                             {50.0, 1.0 / 3.0, {1.0 / 7.0, 4.0 / 21.0}}};
  const std::string csv = rate_points_csv(pts);
  CHECK(csv.rfind("snr_db,sum_rate,r1,r2\n", 0) == 0);
  const auto back = rate_points_from_csv(csv);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].snr_db == pts[i].snr_db);
    CHECK(back[i].sum_rate == pts[i].sum_rate);
    CHECK(back[i].per_receiver == pts[i].per_receiver);
  }
}

TEST_CASE("transmit plan JSON shape") {
  const Schedule s = build_schedule(3, 3);
  const auto h = generate_channels(3, 3, 6, 1);
  const Json j = to_json(build_transmit_plan(s, h, build_csit_table(s)));
  CHECK(j["M"] == 3);
  REQUIRE(j["slots"].size() == 6);
  CHECK(j["slots"][0]["transmitters"][0].size() == 1);
  CHECK(j["slots"][3]["slot"] == 4);
  CHECK(j["slots"][3]["transmitters"][0].size() == 2);
  CHECK(j["slots"][3]["transmitters"][0][0].contains("re"));
}

TEST_CASE("decode records") {
  ReceiverOutcome o;
  o.receiver = 2;
  o.result.rank = 3;
  o.result.condition = std::numeric_limits<double>::infinity();
  const Json j = decode_record(7, o);
  CHECK(j["seed"] == 7);
  CHECK(j["receiver"] == 3);
  CHECK(j["condition"].is_null());
  CHECK(j["success"] == false);
}
