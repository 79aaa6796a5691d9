#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hvi/check_suite.hpp"
#include "hvi/config.hpp"
#include "hvi/problems.hpp"
#include "hvi/trace_io.hpp"

using namespace hvi;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(HVI_BIN_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path src_config(const char* name) {
  return fs::path(HVI_SOURCE_DIR) / "configs" / name;
}

}  // namespace

TEST_CASE("config round trip") {
  Config c;
  c.problem = "gave";
  c.n = 13;
  c.variant = Variant::tseng;
  c.iterations = 777;
  c.seed = 9;
  c.a = 2.5;
  c.b = 1.25;
  c.delta = 0.75;
  c.explicit_t = 0.015625;
  c.stop_tol_step = 1e-9;
  c.z1 = {1, 2, 3};
  Config back = parse_config_text(serialize_config(c), "roundtrip");
  CHECK(config_equal(c, back));
  CHECK(back.explicit_t.has_value());
  CHECK(*back.explicit_t == 0.015625);
}

TEST_CASE("config parser rejects unknown keys with line anchors") {
  std::string text = "[run]\nvariant = oeg\nbogus_key = 3\n";
  try {
    parse_config_text(text, "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("bad.cfg:3") != std::string::npos);
    CHECK(msg.find("bogus_key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("[nope]\n", "f"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("key = 1\n", "f"), ConfigError);       // no section
  CHECK_THROWS_AS(parse_config_text("[run]\nvariant oeg\n", "f"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[schedule]\ndelta = 1.5\n", "f"), ConfigError);
}

TEST_CASE("trace csv round trip preserves the schema") {
  HierarchicalProblem p = build_gnep();
  SolverConfig sc;
  sc.variant = Variant::oeg;
  sc.schedule.a = 1;
  sc.schedule.b = 3;
  sc.schedule.delta = 0.5;
  sc.iterations = 500;
  sc.log_every = 50;
  sc.feas_anchors = default_anchors(p, 8);
  sc.energy_ref = p.solution_point;
  RunTrace tr = run(p, sc);
  std::ostringstream os;
  write_trace_csv(os, tr);
  std::istringstream is(os.str());
  std::vector<TraceRow> rows = parse_trace_csv(is);
  REQUIRE(rows.size() == tr.rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].k == tr.rows[i].k);
    CHECK(rows[i].feas_gap == doctest::Approx(tr.rows[i].feas_gap).epsilon(1e-15));
    CHECK(rows[i].E == doctest::Approx(tr.rows[i].E).epsilon(1e-15));
    CHECK(std::isnan(rows[i].opt_gap) == std::isnan(tr.rows[i].opt_gap));
  }
  // writing twice yields identical bytes (determinism of the serialization)
  std::ostringstream os2;
  write_trace_csv(os2, tr);
  CHECK(os.str() == os2.str());
  // header is versioned
  CHECK(os.str().rfind("# hvi trace v1", 0) == 0);
}

TEST_CASE("report echoes a re-parseable config") {
  Config c;
  c.problem = "gnep";
  c.iterations = 100;
  c.a = 1;
  c.b = 3;
  c.delta = 0.5;
  HierarchicalProblem p = build_gnep();
  SolverConfig sc = solver_config_from(c, p);
  RunTrace tr = run(p, sc);
  std::string rep = render_report(c, p, tr);
  Config echoed = parse_config_text(report_config_echo(rep), "echo");
  CHECK(config_equal(c, echoed));
}

TEST_CASE("solver_config_from wires anchors and energy reference") {
  Config c;
  c.problem = "gnep";
  c.energy_ref = "truth";
  HierarchicalProblem p = build_gnep();
  SolverConfig sc = solver_config_from(c, p);
  CHECK(sc.feas_anchors.has_value());
  CHECK(sc.opt_anchors.has_value());
  CHECK(sc.energy_ref.has_value());
  Config bad = c;
  bad.z1 = {1.0, 2.0};
  CHECK_THROWS_AS(solver_config_from(bad, p), ConfigError);
  Config gavec;
  gavec.problem = "gave";
  gavec.energy_ref = "truth";
  HierarchicalProblem pg = build_gave(9);
  CHECK_THROWS_AS(solver_config_from(gavec, pg), ConfigError);  // no known solution
}

TEST_CASE("cli exit codes") {
  fs::path tmp = fs::temp_directory_path() / "hvi_harness_test";
  fs::create_directories(tmp);

  // 0: healthy run
  CHECK(run_cli("run " + src_config("gnep.cfg").string() + " --k 200 --out " +
                (tmp / "ok").string()) == 0);

  // 0 with empty trace body for a zero-iteration budget
  CHECK(run_cli("run " + src_config("gnep.cfg").string() + " --k 0 --out " +
                (tmp / "k0").string()) == 0);
  {
    std::string csv = slurp(tmp / "k0" / "trace.csv");
    CHECK(csv == std::string("# hvi trace v1\n") + kTraceHeader + "\n");
  }

  // 3: malformed config, message anchored to the offending line
  fs::path bad = tmp / "bad.cfg";
  {
    std::ofstream f(bad);
    f << "[run]\nvariant = oeg\nnot_a_key = 1\n";
  }
  CHECK(run_cli("run " + bad.string()) == 3);

  // 2: divergence (inadmissible explicit step on the strongly monotone toy)
  fs::path div = tmp / "div.cfg";
  {
    std::ofstream f(div);
    f << "[problem]\nname = toy_strong\n[run]\nvariant = oeg\niterations = 2000\n"
      << "log_every = 100\n[schedule]\nexplicit_t = 10.0\n[anchors]\ndefault = false\n"
      << "[output]\ndir = " << (tmp / "divout").string() << "\n";
  }
  CHECK(run_cli("run " + div.string()) == 2);

  // 1: injected fault caught by the check suite
  CHECK(run_cli("check " + src_config("check.cfg").string() + " --out " +
                (tmp / "chk").string() + " --inject-fault prox_clamp") == 1);
  CHECK(run_cli("check " + src_config("check.cfg").string() + " --out " +
                (tmp / "chk2").string()) == 0);
  {
    std::string rep = slurp(tmp / "chk" / "check_report.txt");
    CHECK(rep.find("prox_nonexpansive(faulty_box)") != std::string::npos);
    CHECK(rep.find("[FAIL]") != std::string::npos);
  }

  // seed-pinned check reports are identical bytes
  CHECK(run_cli("check " + src_config("check.cfg").string() + " --seed 123 --out " +
                (tmp / "s1").string()) == 0);
  CHECK(run_cli("check " + src_config("check.cfg").string() + " --seed 123 --out " +
                (tmp / "s2").string()) == 0);
  CHECK(slurp(tmp / "s1" / "check_report.txt") == slurp(tmp / "s2" / "check_report.txt"));

  fs::remove_all(tmp);
}

TEST_CASE("cli sweep emits the long csv and slope table") {
  fs::path tmp = fs::temp_directory_path() / "hvi_sweep_test";
  fs::create_directories(tmp);
  CHECK(run_cli("sweep " + src_config("gnep_sweep.cfg").string() +
                " --delta 0.4,0.8 --k 4000 --out " + tmp.string()) == 0);
  std::string longcsv = slurp(tmp / "sweep_long.csv");
  CHECK(longcsv.rfind("# hvi sweep v1", 0) == 0);
  CHECK(longcsv.find("\n0.4") != std::string::npos);
  CHECK(longcsv.find("\n0.8") != std::string::npos);
  std::string rep = slurp(tmp / "sweep_report.txt");
  CHECK(rep.find("feas_slope") != std::string::npos);
  fs::remove_all(tmp);
}

TEST_CASE("cli sweep flags the limiting delta") {
  fs::path tmp = fs::temp_directory_path() / "hvi_sweep_lim";
  fs::create_directories(tmp);
  CHECK(run_cli("sweep " + src_config("gnep_sweep.cfg").string() +
                " --delta 1.0 --k 2000 --out " + tmp.string()) == 0);
  CHECK(slurp(tmp / "sweep_report.txt").find("limiting_case") != std::string::npos);
  fs::remove_all(tmp);
}

TEST_CASE("cli gave run emits the residual checkpoint table") {
  fs::path tmp = fs::temp_directory_path() / "hvi_gave_test";
  fs::create_directories(tmp);
  CHECK(run_cli("run " + src_config("gave.cfg").string() + " --k 60000 --out " +
                tmp.string()) == 0);
  std::string csv = slurp(tmp / "gave_residuals.csv");
  REQUIRE(csv.rfind("k,sigma,ave_resid,max_dev,dist_x_oracle", 0) == 0);
  // recovery residual decreases from the first to the last checkpoint
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  double first = -1, last = -1;
  while (std::getline(is, line)) {
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    last = std::stod(cell);
    if (first < 0) first = last;
  }
  CHECK(first > 0);
  CHECK(last < first);
  std::string rep = slurp(tmp / "report.txt");
  CHECK(rep.find("gave_oracle_residual") != std::string::npos);
  CHECK(rep.find("gave_dual_recovery_max_dev") != std::string::npos);
  fs::remove_all(tmp);
}

TEST_CASE("cli compare reports the evaluation economy") {
  fs::path tmp = fs::temp_directory_path() / "hvi_cmp_test";
  fs::create_directories(tmp);
  CHECK(run_cli("compare " + src_config("toy_compare.cfg").string() + " --k 3000 --out " +
                tmp.string()) == 0);
  std::string rep = slurp(tmp / "compare_report.txt");
  CHECK(rep.find("evaluation_economy: oeg=3000 korpelevich=6000 ok") != std::string::npos);
  CHECK(rep.find("by_wall_time:") != std::string::npos);
  fs::remove_all(tmp);
}

TEST_CASE("custom problem registration hook") {
  register_problem("custom_toy", [](const Config&) {
    HierarchicalProblem p;
    p.dim = 1;
    p.data.f2 = affine_operator(Matrix::Identity(1, 1), Vector::Zero(1));
    p.data.f1 = zero_operator(1);
    p.data.g1 = zero_prox_term();
    p.data.g2 = zero_prox_term();
    p.name = "custom_toy";
    p.sample_lo = Vector::Constant(1, -1.0);
    p.sample_hi = Vector::Constant(1, 1.0);
    return p;
  });
  Config c;
  c.problem = "custom_toy";
  HierarchicalProblem p = build_problem(c);
  CHECK(p.name == "custom_toy");
  Config unknown;
  unknown.problem = "nope";
  CHECK_THROWS_AS(build_problem(unknown), ConfigError);
}
