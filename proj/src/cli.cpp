#include "xdof/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "xdof/analyzer.hpp"
#include "xdof/errors.hpp"
#include "xdof/serialization.hpp"
#include "xdof/simulation.hpp"

namespace xdof::cli {

namespace {

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kSchedule: return "schedule";
    case Mode::kCsitTable: return "csit-table";
    case Mode::kSimulate: return "simulate";
    case Mode::kSweep: return "sweep";
    case Mode::kVerify: return "verify";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::kSchedule, Mode::kCsitTable, Mode::kSimulate,
                 Mode::kSweep, Mode::kVerify}) {
    if (mode_name(m) == s) return m;
  }
  throw config_error("mode", "unknown mode '" + s + "'");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::kJson;
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "text") return OutputFormat::kText;
  throw config_error("format", "expected json, csv or text, got '" + s + "'");
}

bool parse_switch(const std::string& field, const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw config_error(field, "expected on or off, got '" + s + "'");
}

// "7" or an inclusive range "0..199".
void append_seed_spec(std::vector<std::uint64_t>& seeds, const std::string& spec) {
  try {
    const auto dots = spec.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(std::stoull(spec));
      return;
    }
    const auto lo = std::stoull(spec.substr(0, dots));
    const auto hi = std::stoull(spec.substr(dots + 2));
    if (hi < lo) throw config_error("seeds", "empty range '" + spec + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const config_error*>(&e)) throw;
    throw config_error("seeds", "cannot parse '" + spec + "'");
  }
}

std::vector<std::uint64_t> seed_range(std::uint64_t count) {
  std::vector<std::uint64_t> s(count);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

void require_dims(const ExperimentConfig& c) {
  if (!c.transmitters) throw config_error("M", "required for " + mode_name(c.mode));
  if (!c.receivers) throw config_error("N", "required for " + mode_name(c.mode));
  if (*c.transmitters < 1) throw config_error("M", "must be at least 1");
  if (*c.receivers < 2) {
    throw config_error("N", "must be at least 2 (phase 2 needs receiver pairs)");
  }
}

void require_format(const ExperimentConfig& c,
                    std::initializer_list<OutputFormat> allowed) {
  if (std::find(allowed.begin(), allowed.end(), *c.format) == allowed.end()) {
    throw config_error("format", "not supported by " + mode_name(c.mode));
  }
}

// Writes the whole payload or nothing: a temporary file is renamed into
// place only after it was written completely.
void emit(const ExperimentConfig& c, const std::string& payload,
          std::ostream& out) {
  if (!c.out) {
    out << payload;
    return;
  }
  const std::filesystem::path target(*c.out);
  std::filesystem::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw config_error("out", "cannot open '" + tmp.string() + "'");
    f << payload;
    if (!f.flush()) {
      f.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, target);
}

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

CheckResult check_oracle() {
  CheckResult r{"3-user closed-form equivalence (10 seeds)", true, ""};
  for (std::uint64_t seed = 0; seed < 10 && r.passed; ++seed) {
    const auto report = oracle_verify_3user(seed);
    if (!report.passed) {
      r.passed = false;
      r.detail = "seed " + std::to_string(seed) + ": " + report.first_failure;
    }
  }
  return r;
}

CheckResult check_dof_grid(std::size_t grid) {
  CheckResult r{"exact DoF accounting, 1<=M<=" + std::to_string(grid) +
                    ", 2<=N<=" + std::to_string(grid),
                true, ""};
  for (std::size_t m = 1; m <= grid && r.passed; ++m) {
    for (std::size_t n = 2; n <= grid && r.passed; ++n) {
      const auto rep = dof_report(build_schedule(m, n));
      if (!rep.equal) {
        r.passed = false;
        r.detail = "(" + std::to_string(m) + "," + std::to_string(n) +
                   "): " + to_string(rep.achieved);
      }
    }
  }
  return r;
}

CheckResult check_csit_grid(std::size_t grid) {
  CheckResult r{"CSIT state counts and fractions", true, ""};
  const Schedule three = build_schedule(3, 3);
  const std::string expected_3x3 = "NDDPPN DNDPNP DDNNPP";
  std::string got;
  const CsitTable t3 = build_csit_table(three);
  for (std::size_t i = 0; i < 3; ++i) {
    if (i) got += ' ';
    for (std::size_t t = 0; t < 6; ++t) got += to_char(t3.at(i, t));
  }
  if (got != expected_3x3) {
    return {r.name, false, "(3,3) table is " + got};
  }
  for (std::size_t m = 1; m <= grid; ++m) {
    for (std::size_t n = 2; n <= grid; ++n) {
      const Schedule s = build_schedule(m, n);
      const CsitTable table = build_csit_table(s);
      const auto fractions = csit_fractions(table);
      const std::size_t k = s.copies;
      for (std::size_t i = 0; i < n; ++i) {
        const bool counts_ok =
            table.count(i, CsitState::kPerfect) == k * (m - 1) &&
            table.count(i, CsitState::kDelayed) == k * (n - 1) &&
            table.count(i, CsitState::kNone) ==
                s.total_slots() - k * (m - 1) - k * (n - 1);
        const auto& f = fractions.per_receiver[i];
        if (!counts_ok || f.perfect + f.delayed + f.none != Rational(1)) {
          return {r.name, false,
                  "(" + std::to_string(m) + "," + std::to_string(n) +
                      ") receiver " + std::to_string(i + 1)};
        }
      }
    }
  }
  return r;
}

CheckResult check_balance() {
  CheckResult r{"balanced partial rounds (5,4), (7,5)", true, ""};
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{5, 4}, {7, 5}}) {
    const Schedule s = build_schedule(m, n);
    std::vector<std::size_t> count(n, 0);
    for (const auto& p : s.phase2) {
      ++count[p.pair[0].receiver];
      ++count[p.pair[1].receiver];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (count[i] != s.copies * (m - 1)) {
        return {r.name, false,
                "(" + std::to_string(m) + "," + std::to_string(n) +
                    ") receiver " + std::to_string(i + 1)};
      }
    }
  }
  return r;
}

CheckResult check_decoding(std::size_t grid, std::size_t seeds) {
  const std::size_t top = std::min<std::size_t>(grid, 6);
  CheckResult r{"noiseless decoding and CSIT audit, 2<=M,N<=" +
                    std::to_string(top) + ", " + std::to_string(seeds) +
                    " seeds",
                true, ""};
  for (std::size_t m = 2; m <= top; ++m) {
    for (std::size_t n = 2; n <= top; ++n) {
      const Schedule s = build_schedule(m, n);
      for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        const Trial trial = run_trial(s, seed);
        const auto audit = audit_csit_reads(trial.plan.csit_reads, trial.csit);
        if (!audit.clean()) {
          return {r.name, false, "CSIT audit failed at (" + std::to_string(m) +
                                     "," + std::to_string(n) + ")"};
        }
        for (const auto& o : decode_trial(trial)) {
          if (o.result.success && o.relative_error <= 1e-8) continue;
          if (!o.result.success && o.result.condition > 1e12) continue;
          return {r.name, false,
                  "(" + std::to_string(m) + "," + std::to_string(n) + ") seed " +
                      std::to_string(seed) + " receiver " +
                      std::to_string(o.receiver + 1)};
        }
      }
    }
  }
  return r;
}

CheckResult check_permutations(std::size_t per_config) {
  CheckResult r{"permuted schedules decode like the canonical one", true, ""};
  if (count_csit_variants(3, 3) != 36) return {r.name, false, "(3,3) count"};
  std::mt19937_64 rng(2024);
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{3, 3}, {4, 4}, {2, 4}}) {
    const Schedule canonical = build_schedule(m, n);
    for (std::size_t rep = 0; rep < per_config; ++rep) {
      std::vector<std::size_t> p1(canonical.phase1.size()), p2(canonical.phase2.size());
      std::iota(p1.begin(), p1.end(), 0);
      std::iota(p2.begin(), p2.end(), 0);
      std::shuffle(p1.begin(), p1.end(), rng);
      std::shuffle(p2.begin(), p2.end(), rng);
      const Schedule permuted = permute_schedule(canonical, p1, p2);
      const std::uint64_t seed = 100 + rep;
      const auto a = decode_trial(run_trial(canonical, seed));
      const auto b = decode_trial(run_trial(permuted, seed));
      for (std::size_t i = 0; i < n; ++i) {
        if (!b[i].result.success || b[i].relative_error > 1e-8 ||
            !a[i].result.success || a[i].relative_error > 1e-8) {
          return {r.name, false,
                  "(" + std::to_string(m) + "," + std::to_string(n) +
                      ") permutation " + std::to_string(rep)};
        }
      }
    }
  }
  return r;
}

int run_verify(const ExperimentConfig& c, std::ostream& out) {
  std::vector<CheckResult> results = {
      check_oracle(),          check_dof_grid(c.grid),  check_csit_grid(c.grid),
      check_balance(),         check_decoding(c.grid, 5),
      check_permutations(5),
  };
  const bool ok = std::all_of(results.begin(), results.end(),
                              [](const CheckResult& r) { return r.passed; });
  std::string payload;
  if (*c.format == OutputFormat::kJson) {
    Json checks = Json::array();
    for (const auto& r : results) {
      checks.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    }
    payload = Json{{"passed", ok}, {"checks", checks}}.dump(2) + "\n";
  } else {
    std::ostringstream os;
    for (const auto& r : results) {
      os << (r.passed ? "PASS " : "FAIL ") << r.name;
      if (!r.detail.empty()) os << " -- " << r.detail;
      os << "\n";
    }
    os << (ok ? "all checks passed" : "verification FAILED") << "\n";
    payload = os.str();
  }
  if (!ok) {
    out << payload;
    return kExitVerificationFailed;
  }
  emit(c, payload, out);
  return kExitOk;
}

int run_simulate(const ExperimentConfig& c, std::ostream& out) {
  const Schedule s = build_schedule(*c.transmitters, *c.receivers);
  TrialOptions options;
  options.plan.normalize = c.normalize.value_or(false);
  if (c.noise) options.message_power = symbol_power(c.snr_db.front());

  Json records = Json::array();
  std::ostringstream csv;
  csv << "seed,receiver,rank,condition,residual,success,relative_error\n";
  std::size_t failures = 0;
  double worst = 0.0;
  for (std::uint64_t seed : c.seeds) {
    if (c.noise) options.noise = NoiseModel::unit(seed);
    const Trial trial = run_trial(s, seed, options);
    for (const auto& o : decode_trial(trial)) {
      failures += !o.result.success;
      if (o.result.success) worst = std::max(worst, o.relative_error);
      records.push_back(decode_record(seed, o));
      csv << seed << "," << o.receiver + 1 << "," << o.result.rank << ","
          << o.result.condition << "," << o.result.residual << ","
          << (o.result.success ? "true" : "false") << "," << o.relative_error
          << "\n";
    }
  }
  if (*c.format == OutputFormat::kCsv) {
    emit(c, csv.str(), out);
  } else {
    Json doc{{"M", s.transmitters},
             {"N", s.receivers},
             {"noise", c.noise},
             {"normalize", options.plan.normalize},
             {"records", records},
             {"summary",
              {{"runs", records.size()},
               {"failures", failures},
               {"max_relative_error", worst}}}};
    if (c.noise) doc["snr_db"] = c.snr_db.front();
    emit(c, doc.dump(2) + "\n", out);
  }
  return kExitOk;
}

int run_sweep(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const Schedule s = build_schedule(*c.transmitters, *c.receivers);
  SweepOptions options{c.snr_db, c.seeds, c.normalize.value_or(true)};
  const auto points = rate_sweep(s, options);
  const SlopeFit fit = dof_slope(points);
  const Rational expected = closed_form_dof(s.transmitters);
  const double expected_value =
      static_cast<double>(expected.numerator()) / static_cast<double>(expected.denominator());
  std::ostringstream summary;
  summary << "slope=" << fit.slope << " expected=" << to_string(expected) << " ("
          << expected_value << ") relative_deviation="
          << std::abs(fit.slope - expected_value) / expected_value
          << " residual=" << fit.residual << "\n";
  if (*c.format == OutputFormat::kJson) {
    Json pts = Json::array();
    for (const auto& p : points) {
      pts.push_back({{"snr_db", p.snr_db}, {"sum_rate", p.sum_rate},
                     {"per_receiver", p.per_receiver}});
    }
    emit(c,
         Json{{"M", s.transmitters}, {"N", s.receivers}, {"draws", c.seeds.size()},
              {"normalize", options.normalize}, {"points", pts},
              {"fit", to_json(fit)}, {"expected_dof", to_string(expected)}}
                 .dump(2) + "\n",
         out);
  } else {
    emit(c, rate_points_csv(points), out);
  }
  (c.out ? out : err) << summary.str();
  return kExitOk;
}

}  // namespace

ExperimentConfig validated(ExperimentConfig c) {
  switch (c.mode) {
    case Mode::kSchedule:
    case Mode::kCsitTable:
      require_dims(c);
      if (!c.format) c.format = OutputFormat::kText;
      require_format(c, {OutputFormat::kText, OutputFormat::kJson});
      break;
    case Mode::kSimulate:
      require_dims(c);
      if (c.seeds.empty()) c.seeds = {0};
      if (!c.format) c.format = OutputFormat::kJson;
      require_format(c, {OutputFormat::kJson, OutputFormat::kCsv});
      if (c.noise && c.snr_db.size() != 1) {
        throw config_error("snr", "noisy simulation needs exactly one --snr");
      }
      break;
    case Mode::kSweep: {
      require_dims(c);
      if (c.snr_db.empty()) c.snr_db = {40, 50, 60, 70, 80};
      if (c.seeds.empty()) c.seeds = seed_range(200);
      if (!c.format) c.format = OutputFormat::kCsv;
      require_format(c, {OutputFormat::kCsv, OutputFormat::kJson});
      const auto [lo, hi] = std::minmax_element(c.snr_db.begin(), c.snr_db.end());
      if (c.snr_db.size() < 3 || *hi - *lo < 20.0) {
        throw config_error("snr", "sweep needs >= 3 points spanning >= 20 dB");
      }
      break;
    }
    case Mode::kVerify:
      if (c.grid < 2) throw config_error("grid", "must be at least 2");
      if (!c.format) c.format = OutputFormat::kText;
      require_format(c, {OutputFormat::kText, OutputFormat::kJson});
      break;
  }
  for (double snr : c.snr_db) {
    if (!std::isfinite(snr)) throw config_error("snr", "must be finite");
  }
  return c;
}

void apply_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config", "cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw config_error("config", e.what());
  }
  try {
    if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("M")) c.transmitters = j["M"].get<std::size_t>();
    if (j.contains("N")) c.receivers = j["N"].get<std::size_t>();
    if (j.contains("seeds")) {
      c.seeds.clear();
      for (const auto& s : j["seeds"]) {
        append_seed_spec(c.seeds, s.is_string() ? s.get<std::string>()
                                                : std::to_string(s.get<std::uint64_t>()));
      }
    }
    if (j.contains("snr")) c.snr_db = j["snr"].get<std::vector<double>>();
    if (j.contains("noise")) c.noise = parse_switch("noise", j["noise"].get<std::string>());
    if (j.contains("normalize")) {
      c.normalize = parse_switch("normalize", j["normalize"].get<std::string>());
    }
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("format")) c.format = parse_format(j["format"].get<std::string>());
    if (j.contains("grid")) c.grid = j["grid"].get<std::size_t>();
  } catch (const Json::exception& e) {
    throw config_error("config", e.what());
  }
}

int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  switch (c.mode) {
    case Mode::kSchedule: {
      const Schedule s = build_schedule(*c.transmitters, *c.receivers);
      emit(c,
           *c.format == OutputFormat::kJson ? to_json(s).dump(2) + "\n"
                                            : render_schedule(s),
           out);
      return kExitOk;
    }
    case Mode::kCsitTable: {
      const CsitTable t =
          build_csit_table(build_schedule(*c.transmitters, *c.receivers));
      emit(c,
           *c.format == OutputFormat::kJson ? to_json(t).dump(2) + "\n"
                                            : render_csit_table(t),
           out);
      return kExitOk;
    }
    case Mode::kSimulate: return run_simulate(c, out);
    case Mode::kSweep: return run_sweep(c, out, err);
    case Mode::kVerify: return run_verify(c, out);
  }
  return kExitInvalidConfig;
}

int main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Two-phase X channel scheme with alternating CSIT"};
  app.require_subcommand(1);

  std::size_t m = 0, n = 0, grid = 6, draws = 0;
  std::vector<std::uint64_t> seed_flags;
  std::vector<std::string> seed_specs;
  std::vector<double> snr;
  std::string noise, normalize, out_path, format, config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--M", m, "transmitter count");
    sub->add_option("--N", n, "receiver count");
    sub->add_option("--seed", seed_flags, "seed (repeatable)");
    sub->add_option("--seeds", seed_specs, "seeds or ranges a..b")->delimiter(',');
    sub->add_option("--draws", draws, "use seeds 0..draws-1");
    sub->add_option("--snr", snr, "SNR in dB (repeatable)")->delimiter(',');
    sub->add_option("--noise", noise, "on|off");
    sub->add_option("--normalize", normalize, "on|off");
    sub->add_option("--out", out_path, "output file");
    sub->add_option("--format", format, "json|csv|text");
    sub->add_option("--grid", grid, "verification grid size");
    sub->add_option("--config", config_path, "JSON config file");
  };
  std::vector<std::pair<CLI::App*, Mode>> subs;
  for (auto [name, mode, help] :
       {std::tuple{"schedule", Mode::kSchedule, "print the slot schedule"},
        std::tuple{"csit-table", Mode::kCsitTable, "print the CSIT state table"},
        std::tuple{"simulate", Mode::kSimulate, "decode diagnostics per seed"},
        std::tuple{"sweep", Mode::kSweep, "rate versus SNR and slope fit"},
        std::tuple{"verify", Mode::kVerify, "run the invariant suite"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    subs.emplace_back(sub, mode);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalidConfig;
  }

  try {
    ExperimentConfig c;
    CLI::App* active = nullptr;
    for (auto& [sub, mode] : subs) {
      if (sub->parsed()) {
        active = sub;
        c.mode = mode;
      }
    }
    const Mode chosen = c.mode;
    if (active->count("--config")) {
      apply_config_file(c, config_path);
      c.mode = chosen;
    }
    if (active->count("--M")) c.transmitters = m;
    if (active->count("--N")) c.receivers = n;
    if (active->count("--seed") || active->count("--seeds") ||
        active->count("--draws")) {
      c.seeds.clear();
      if (active->count("--draws")) c.seeds = seed_range(draws);
      c.seeds.insert(c.seeds.end(), seed_flags.begin(), seed_flags.end());
      for (const auto& spec : seed_specs) append_seed_spec(c.seeds, spec);
    }
    if (active->count("--snr")) c.snr_db = snr;
    if (active->count("--noise")) c.noise = parse_switch("noise", noise);
    if (active->count("--normalize")) c.normalize = parse_switch("normalize", normalize);
    if (active->count("--out")) c.out = out_path;
    if (active->count("--format")) c.format = parse_format(format);
    if (active->count("--grid")) c.grid = grid;
    return run(validated(std::move(c)), out, err);
  } catch (const config_error& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const unsupported_configuration& e) {
    err << "unsupported configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
}

}  // namespace xdof::cli
