#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqnet/cli.hpp"
#include "seqnet/harness.hpp"

using namespace seqnet;
namespace fs = std::filesystem;

namespace {

const std::string kSource = SEQNET_SOURCE_DIR;

std::string config_path(const std::string& name) { return kSource + "/configs/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("seqnet_test_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

const char* kSmall = R"({
  "name": "small",
  "k_RS": 1, "k_SR": 1, "k_LR": 1, "k_Q0": 1,
  "k_0Q": 2, "k_RI": 1, "k_IL": 1, "k_QU": 1,
  "C_M": 2, "C_U": 1,
  "N": [50, 100],
  "replicas": 4,
  "horizon": 1.0,
  "grid_points": 21,
  "windows": 4,
  "initial": {"q0": 1},
  "seed": 5,
  "threads": 2
})";

}  // namespace

TEST_CASE("shipped configs parse") {
  for (const char* f : {"stable.json", "subzero.json", "optseq.json", "saturation.json", "cond_example.json"}) {
    INFO(f);
    const ExperimentConfig c = load_config(config_path(f));
    CHECK(c.params.max_rate() > 0);
  }
  const ExperimentConfig st = load_config(config_path("stable.json"));
  CHECK(st.N_list == std::vector<std::int64_t>{500, 1000, 2000});
  CHECK(*st.initial.q0 == 1.0);
  CHECK(st.tol.slow == 0.05);
  CHECK(st.grid_points == 200);
  CHECK(st.burn_in == 0.1);
  CHECK_FALSE(load_config(config_path("subzero.json")).regulated);
}

TEST_CASE("config round-trips through json") {
  const ExperimentConfig c = parse_config(kSmall);
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.N_list == c.N_list);
  CHECK(back.params.k_0Q == 2.0);
}

TEST_CASE("config errors carry a line number") {
  SUBCASE("malformed json") {
    const std::string text = "{\n  \"k_RS\": 1,\n  \"k_SR\": ,\n}";
    try {
      parse_config(text, "bad.json");
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).rfind("bad.json:3:", 0) == 0);
    }
  }
  SUBCASE("wrong type is anchored at its key") {
    std::string text = kSmall;
    text.replace(text.find("\"horizon\": 1.0"), 14, "\"horizon\": \"x\"");
    try {
      parse_config(text, "cfg");
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 8);
      CHECK(std::string(e.what()).find("horizon") != std::string::npos);
    }
  }
  SUBCASE("unknown nested key") {
    std::string text = kSmall;
    text.replace(text.find("\"q0\""), 4, "\"qq\"");
    try {
      parse_config(text, "cfg");
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 11);
      CHECK(std::string(e.what()).find("initial.qq") != std::string::npos);
    }
  }
  SUBCASE("missing required key") {
    std::string text = kSmall;
    text.replace(text.find("\"k_IL\": 1,"), 10, "");
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
  SUBCASE("invalid values") {
    ExperimentConfig c = parse_config(kSmall);
    c.N_list = {100, 50};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.N_list = {100};
    c.replicas = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    std::string text = kSmall;
    text.replace(text.find("\"k_IL\": 1"), 9, "\"k_IL\": -1");
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
}

TEST_CASE("default initial states") {
  SUBCASE("stable, q0 = 1, N = 1000") {
    const ExperimentConfig c = load_config(config_path("stable.json"));
    const auto sc = ScalingConfig::from_ratios(1000, c.C_M, c.C_U);
    CHECK(default_initial(Regime::Stable, sc, c) == NetState{0, 0, 0, 1000, 0});
  }
  SUBCASE("optimal sequestration at the fixed point") {
    const ExperimentConfig c = load_config(config_path("optseq.json"));
    const auto sc = ScalingConfig::from_ratios(1000, c.C_M, c.C_U);
    CHECK(sc.U0 == 10000);
    const NetState x = default_initial(Regime::OptimalSequestration, sc, c);
    CHECK(x.s == 500);
    CHECK(x.u == 750);
  }
  SUBCASE("saturation") {
    ExperimentConfig c = load_config(config_path("saturation.json"));
    c.initial.u_small = 3;
    const auto sc = ScalingConfig::from_ratios(1000, c.C_M, c.C_U);
    const NetState x = default_initial(Regime::Saturation, sc, c);
    CHECK(x.s == 500);
    CHECK(x.l == 250);
    CHECK(x.u == sc.U0 - 3);
  }
  SUBCASE("under-loaded") {
    const ExperimentConfig c = load_config(config_path("subzero.json"));
    const auto sc = ScalingConfig::from_ratios(2000, c.C_M, c.C_U);
    const NetState x = default_initial(Regime::UnderLoaded, sc, c);
    CHECK(x.l == 1000);
    CHECK(x.s == 0);
  }
  SUBCASE("fractions outside the admissible region") {
    ExperimentConfig c = load_config(config_path("saturation.json"));
    c.initial.s0 = 0.7;
    c.initial.l0 = 0.4;
    CHECK_THROWS_AS(default_initial(Regime::Saturation, ScalingConfig::from_ratios(100, 2.0, 0.25), c),
                    std::invalid_argument);
  }
}

TEST_CASE("horizon zero gives an empty report") {
  ExperimentConfig c = parse_config(kSmall);
  c.horizon = 0.0;
  const ConvergenceReport rep = run_experiment(c);
  REQUIRE(rep.results.size() == 2);
  for (const auto& r : rep.results) {
    CHECK(r.slow_sup.empty());
    CHECK(r.events == 0);
  }
  CHECK(rep.grid.empty());
  CHECK(rep.passed);
}

TEST_CASE("boundary parameters are rejected") {
  ExperimentConfig c = parse_config(kSmall);
  c.params.k_IL = c.params.k_0Q;
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
}

TEST_CASE("reports are deterministic and independent of thread count") {
  ExperimentConfig c = parse_config(kSmall);
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  c.output_dir = a.string();
  const ConvergenceReport ra = run_experiment(c);
  c.output_dir = b.string();
  c.threads = 1;
  run_experiment(c);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    INFO(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
  CHECK(files == 9);  // report, ode, reference, and slow/occupation/replicas per N
  for (const auto& r : ra.results) {
    CHECK(r.slow_sup.size() == 4);
    CHECK(r.fast_tv_windows.size() == 4);
    for (double d : r.slow_sup) CHECK(d >= 0.0);
    for (double d : r.fast_tv_windows) CHECK(d >= 0.0);
    CHECK(r.fast_tv_pooled >= 0.0);
    CHECK(r.production_sup_mean >= 0.0);
  }
  const auto j = nlohmann::json::parse(slurp(a / "report.json"));
  CHECK(j.at("regime") == "Stable");
  CHECK(j.at("config").at("seed") == 5);

  c.seed = 6;
  const ConvergenceReport rc = run_experiment(c);
  CHECK(rc.results[0].slow_sup != ra.results[0].slow_sup);
}

TEST_CASE("cli: classify") {
  std::string out;
  CHECK(cli({"classify", "--config", config_path("cond_example.json")}, &out) == kExitOk);
  std::istringstream in(out);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  CHECK(first == "OptimalSequestration");
  CHECK(second == "phi 0.75");
  CHECK(out.find("stable true") != std::string::npos);
  CHECK(out.find("positive") != std::string::npos);
}

TEST_CASE("cli: ode matches the linear closed form") {
  const fs::path dir = scratch("ode");
  const std::string csv = (dir / "stable_ode.csv").string();
  const auto cfg = write_file(dir / "cfg.json", R"({
    "k_RS": 1, "k_SR": 1, "k_LR": 1, "k_Q0": 1, "k_0Q": 2, "k_RI": 1, "k_IL": 1, "k_QU": 1,
    "C_M": 2, "C_U": 1, "horizon": 1, "grid_points": 11, "initial": {"q0": 0}})");
  REQUIRE(cli({"ode", "--config", cfg.string(), "--out", csv}) == kExitOk);
  std::ifstream in(csv);
  std::string line, last;
  std::getline(in, line);
  CHECK(line == "t,q,production");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    last = line;
    ++rows;
  }
  CHECK(rows == 11);
  const auto c1 = last.find(','), c2 = last.find(',', c1 + 1);
  CHECK(std::stod(last.substr(0, c1)) == 1.0);
  CHECK(std::abs(std::stod(last.substr(c1 + 1, c2 - c1 - 1)) - (1.0 - std::exp(-1.0))) < 1e-6);
  CHECK(std::stod(last.substr(c2 + 1)) == doctest::Approx(1.0));
}

TEST_CASE("cli: exit codes") {
  const fs::path dir = scratch("exit");
  std::string err;
  const auto missing = write_file(dir / "missing.json", "{\n  \"k_RS\": 1,\n  \"C_M\": 2\n}\n");
  CHECK(cli({"classify", "--config", missing.string()}, nullptr, &err) == kExitInvalid);
  CHECK(err.find("missing.json:1:") != std::string::npos);
  const auto broken = write_file(dir / "broken.json", "{\n  \"k_RS\": 1,\n  oops\n}\n");
  CHECK(cli({"classify", "--config", broken.string()}, nullptr, &err) == kExitInvalid);
  CHECK(err.find("broken.json:3:") != std::string::npos);
  CHECK(cli({"classify"}, nullptr, &err) == kExitInvalid);
  CHECK(cli({"frobnicate"}) == kExitInvalid);
  CHECK(cli({}) == kExitInvalid);
  CHECK(cli({"classify", "--config", (dir / "absent.json").string()}) == kExitInvalid);

  // impossible tolerances make verify fail with exit 2
  std::string text = kSmall;
  text.replace(text.find("\"seed\": 5"), 9, "\"seed\": 5, \"tolerances\": {\"slow\": 0}");
  const auto strict = write_file(dir / "strict.json", text);
  std::string out;
  CHECK(cli({"verify", "--config", strict.string(), "--N", "50"}, &out) == kExitToleranceFailure);
  CHECK(out.find("FAIL") != std::string::npos);
  CHECK(cli({"verify", "--config", write_file(dir / "ok.json", kSmall).string(), "--out",
             (dir / "verify_out").string()},
            &out) != kExitInvalid);
  CHECK(fs::exists(dir / "verify_out" / "report.json"));
}

TEST_CASE("cli: simulate, fastdist, sweep") {
  const fs::path dir = scratch("misc");
  const auto cfg = write_file(dir / "ok.json", kSmall);
  const std::string traj = (dir / "traj.csv").string();
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--N", "40", "--events", "--out", traj}) == kExitOk);
  CHECK(fs::exists(traj + ".json"));
  CHECK(fs::exists(traj + ".events.csv"));
  const std::string body = slurp(traj);
  CHECK(body.rfind("time,s,r,l,q,u,P\n0,0,0,0,40,0,0\n", 0) == 0);
  const std::string again = (dir / "traj2.csv").string();
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--N", "40", "--out", again}) == kExitOk);
  CHECK(slurp(again) == body);

  std::string out;
  REQUIRE(cli({"fastdist", "--fastinv", "1,1,1,1"}, &out) == kExitOk);
  CHECK(out.rfind("r,l,u,probability\n", 0) == 0);
  REQUIRE(cli({"fastdist", "--config", config_path("optseq.json")}, &out) == kExitOk);
  CHECK(out.rfind("r,l,q,probability\n", 0) == 0);
  CHECK(cli({"fastdist", "--fastinv", "1,1,x,1"}) == kExitInvalid);

  REQUIRE(cli({"sweep", "--config", config_path("cond_example.json"), "--x", "C_U:0.5:1.0:3", "--y",
               "k_IL:2:2:1"},
              &out) == kExitOk);
  CHECK(out == "C_U,k_IL,regime,phi\n0.5,2,Saturation,0.75\n0.75,2,Boundary,0.75\n1,2,OptimalSequestration,0.75\n");
  CHECK(cli({"sweep", "--config", config_path("cond_example.json"), "--x", "k_XX:0:1:2", "--y", "C_U:1:2:2"}) ==
        kExitInvalid);
}
