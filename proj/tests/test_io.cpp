// IO suite: the matrix text format and its line-numbered rejections, the CSV
// record round trip with shortest round-trip doubles, config parsing with
// unknown-key rejection, command-line overrides, the JSON emitters, and an
// end-to-end pass over the installed command-line binary.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "rmtsharp/rmtsharp.hpp"

using namespace rmtsharp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fresh scratch directory per test run; contents are left behind only on
// failure, which is exactly when they help.
std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "rmtsharp_io_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  FAIL("expected an exception");
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(RMTSHARP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("matrix files use the 1-indexed header format byte for byte") {
  const auto path = (scratch() / "eye2.txt").string();
  emit_matrix(SparseBinaryMatrix::from_entries(2, 2, {{0, 0}, {1, 1}}), path);
  REQUIRE(slurp(path) == "2 2 2\n1 1\n2 2\n");

  const SparseBinaryMatrix back = load_matrix(path);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.at(0, 0) == 1);
  REQUIRE(back.at(0, 1) == 0);
  REQUIRE(back.nnz() == 2);

  // Empty matrices round-trip as a bare header.
  const auto empty = (scratch() / "empty.txt").string();
  emit_matrix(SparseBinaryMatrix::from_entries(3, 4, {}), empty);
  REQUIRE(slurp(empty) == "3 4 0\n");
  REQUIRE(load_matrix(empty).nnz() == 0);

  // Blank lines are tolerated anywhere.
  const auto padded = (scratch() / "padded.txt").string();
  spit(padded, "\n2 2 1\n\n  \n1 2\n\n");
  REQUIRE(load_matrix(padded).at(0, 1) == 1);
}

TEST_CASE("matrix loading pinpoints the offending line") {
  const auto dir = scratch();
  auto expect = [&](const char* name, const std::string& text,
                    const std::string& line_tag, const std::string& phrase) {
    const auto p = (dir / name).string();
    spit(p, text);
    const std::string msg = error_of([&] { load_matrix(p); });
    INFO(msg);
    REQUIRE(msg.find(p + ":" + line_tag) != std::string::npos);
    REQUIRE(msg.find(phrase) != std::string::npos);
  };

  expect("h1.txt", "2 2\n", "1:", "header");
  expect("h2.txt", "2 2 1 9\n", "1:", "header");
  expect("e1.txt", "2 2 1\n1 1 1\n", "2:", "exactly 'i j'");
  expect("e2.txt", "2 2 2\n1 1\n1 1\n", "3:", "duplicate");
  expect("e3.txt", "2 2 1\n3 1\n", "2:", "outside");
  expect("e4.txt", "2 2 1\n0 1\n", "2:", "outside");
  expect("e5.txt", "2 2 2\n1 1\n", "3:", "expected 2");
  expect("e6.txt", "2 2 1\n1 1\n2 2\n", "3:", "trailing");
  REQUIRE_THROWS_AS(load_matrix((dir / "missing.txt").string()), io_error);
}

TEST_CASE("CSV records survive a full round trip at double precision") {
  std::vector<TrialRecord> records(2);
  TrialRecord& a = records[0];
  a.experiment = ExperimentKind::PhaseTransition;
  a.model = ModelKind::DirectedER;
  a.n = 50;
  a.p = 0.1 + 0.2;  // deliberately not representable as a short decimal
  a.k = -1.25;
  a.trial = 3;
  a.seed = 42;
  a.stream = (7ULL << 32) | 3ULL;
  a.omega0 = false;
  a.zero_rows = 0;
  a.zero_cols = 0;
  a.invertible = true;
  a.s_min = 1e-300;
  a.s_max = 12.75;
  a.sigma = kInf;
  a.wall_ms = 3.5;

  TrialRecord& b = records[1];
  b.experiment = ExperimentKind::PhaseTransition;
  b.model = ModelKind::UndirectedER;
  b.n = 8;
  b.p = 0.25;
  b.trial = 0;
  b.invertible = false;

  const auto path = (scratch() / "records.csv").string();
  emit_csv(records, path);
  const std::string text = slurp(path);
  REQUIRE(text.rfind(std::string(csv_header()) + "\n", 0) == 0);
  REQUIRE(text.find("inf") != std::string::npos);

  const std::vector<TrialRecord> back = load_csv(path);
  REQUIRE(back.size() == 2);
  REQUIRE(back[0].model == ModelKind::DirectedER);
  REQUIRE(back[0].p == a.p);          // exact: shortest round-trip formatting
  REQUIRE(back[0].s_min == a.s_min);  // survives subnormal-adjacent magnitudes
  REQUIRE(std::isinf(*back[0].sigma));
  REQUIRE(back[0].stream == a.stream);
  REQUIRE(back[0].omega0 == a.omega0);
  REQUIRE_FALSE(back[0].wall_ms.has_value());  // wall time is opt-in
  REQUIRE_FALSE(back[1].s_min.has_value());
  REQUIRE(back[1].invertible == std::optional<bool>(false));

  // Opting in preserves the measured wall time.
  emit_csv(records, path, /*record_wall_time=*/true);
  REQUIRE(load_csv(path)[0].wall_ms == std::optional<double>(3.5));

  // Header-only file for an empty campaign.
  emit_csv({}, path);
  REQUIRE(slurp(path) == std::string(csv_header()) + "\n");
  REQUIRE(load_csv(path).empty());
}

TEST_CASE("CSV loading rejects foreign layouts") {
  const auto dir = scratch();
  const auto p1 = (dir / "badhead.csv").string();
  spit(p1, "n,p,trial\n1,0.5,0\n");
  REQUIRE_THROWS_AS(load_csv(p1), io_error);

  const auto p2 = (dir / "shortrow.csv").string();
  spit(p2, std::string(csv_header()) + "\n1,phase_transition,undirected\n");
  const std::string msg = error_of([&] { load_csv(p2); });
  REQUIRE(msg.find(":2:") != std::string::npos);

  const auto p3 = (dir / "badschema.csv").string();
  std::string row = "9,phase_transition,undirected,8,0.25,0,0,1,0";
  for (int i = 0; i < 32; ++i) row += ",";
  spit(p3, std::string(csv_header()) + "\n" + row + "\n");
  REQUIRE_THROWS_AS(load_csv(p3), io_error);
}

TEST_CASE("config objects parse fully and reject unknown keys") {
  const nlohmann::json j = {
      {"schema_version", 1},
      {"experiment", "smin_scaling"},
      {"models", nlohmann::json::array({"undirected", "bipartite"})},
      {"n", nlohmann::json::array({250, 500})},
      {"k", 6},
      {"trials", 25},
      {"seed", 9},
      {"record_spectra", true},
      {"record_centered", true},
      {"record_eigen", false},
      {"record_wall_time", true},
      {"tol", 1e-9},
      {"n_dense", 512},
      {"max_iter", 200},
      {"threads", 2},
      {"dist_nmin", 6},
      {"dist_nmax", 30},
      {"hs_draws", 64},
      {"hs_eps1", 0.2},
      {"hs_eps2", 0.3},
      {"c0", 0.25},
      {"output", "out.csv"},
      {"structure", {{"delta0", 0.04}, {"n_sub", 50}}},
      {"vectors", {{"m", 2}, {"c_tilde", 0.2}}},
  };
  const ExperimentConfig cfg = config_from_json(j);
  REQUIRE(cfg.experiment == ExperimentKind::SminScaling);
  REQUIRE(cfg.models == std::vector<ModelKind>{ModelKind::UndirectedER,
                                               ModelKind::BipartiteBlock});
  REQUIRE(cfg.n == std::vector<int>{250, 500});
  REQUIRE(cfg.density.k == std::vector<double>{6.0});
  REQUIRE(cfg.density.p.empty());
  REQUIRE(cfg.trials == 25);
  REQUIRE(cfg.seed == 9);
  REQUIRE(cfg.record_centered);
  REQUIRE(cfg.record_wall_time);
  REQUIRE(cfg.tol == 1e-9);
  REQUIRE(cfg.n_dense == 512);
  REQUIRE(cfg.threads == 2);
  REQUIRE(cfg.hs_draws == 64);
  REQUIRE(cfg.c0 == 0.25);
  REQUIRE(cfg.output == "out.csv");
  REQUIRE(cfg.structure.delta0 == 0.04);
  REQUIRE(cfg.structure.n_sub == 50);
  REQUIRE(cfg.structure.c_heavy == 10.0);  // untouched defaults persist
  REQUIRE(cfg.vectors.m == 2);
  REQUIRE(cfg.vectors.c_tilde == 0.2);

  nlohmann::json bad = j;
  bad["typo_key"] = 1;
  REQUIRE_THROWS_AS(config_from_json(bad), parameter_error);
  bad = j;
  bad["structure"]["typo"] = 1;
  REQUIRE_THROWS_AS(config_from_json(bad), parameter_error);
  bad = j;
  bad["schema_version"] = 2;
  REQUIRE_THROWS_AS(config_from_json(bad), parameter_error);
  REQUIRE_THROWS_AS(config_from_json(nlohmann::json::array()), parameter_error);

  // Scalars are accepted wherever a one-element list is meant.
  const ExperimentConfig single =
      config_from_json({{"models", "directed"}, {"n", 100}, {"p", 0.05}});
  REQUIRE(single.models == std::vector<ModelKind>{ModelKind::DirectedER});
  REQUIRE(single.n == std::vector<int>{100});
  REQUIRE(single.density.p == std::vector<double>{0.05});
}

TEST_CASE("config files load through the same validation") {
  const auto good = (scratch() / "cfg.json").string();
  spit(good, R"({"experiment":"phase_transition","n":8,"k":0,"trials":2})");
  REQUIRE(load_config(good).trials == 2);

  const auto broken = (scratch() / "broken.json").string();
  spit(broken, "{\"experiment\":");
  REQUIRE_THROWS_AS(load_config(broken), io_error);
  REQUIRE_THROWS_AS(load_config((scratch() / "nope.json").string()), io_error);
}

TEST_CASE("overrides rewrite one key at a time") {
  ExperimentConfig cfg;
  apply_override(cfg, "experiment=structure_audit");
  REQUIRE(cfg.experiment == ExperimentKind::StructureAudit);
  apply_override(cfg, "models=directed,bipartite");
  REQUIRE(cfg.models == std::vector<ModelKind>{ModelKind::DirectedER,
                                               ModelKind::BipartiteBlock});
  apply_override(cfg, "n=100,200");
  REQUIRE(cfg.n == std::vector<int>{100, 200});

  // Density overrides displace whichever rule was active before.
  apply_override(cfg, "p=0.1,0.2");
  REQUIRE(cfg.density.p == std::vector<double>{0.1, 0.2});
  apply_override(cfg, "k=-3,3");
  REQUIRE(cfg.density.k == std::vector<double>{-3.0, 3.0});
  REQUIRE(cfg.density.p.empty());
  apply_override(cfg, "log_factor=4");
  REQUIRE(cfg.density.log_factor == 4.0);
  REQUIRE(cfg.density.k.empty());

  apply_override(cfg, "trials=7");
  apply_override(cfg, "seed=11");
  apply_override(cfg, "record_centered=true");
  apply_override(cfg, "record_spectra=0");
  apply_override(cfg, "tol=1e-8");
  apply_override(cfg, "threads=3");
  apply_override(cfg, "structure.delta0=0.02");
  apply_override(cfg, "vectors.K=2");
  apply_override(cfg, "output=alt.csv");
  REQUIRE(cfg.trials == 7);
  REQUIRE(cfg.seed == 11);
  REQUIRE(cfg.record_centered);
  REQUIRE_FALSE(cfg.record_spectra);
  REQUIRE(cfg.tol == 1e-8);
  REQUIRE(cfg.threads == 3);
  REQUIRE(cfg.structure.delta0 == 0.02);
  REQUIRE(cfg.vectors.K == 2.0);
  REQUIRE(cfg.output == "alt.csv");

  REQUIRE_THROWS_AS(apply_override(cfg, "trials"), parameter_error);
  REQUIRE_THROWS_AS(apply_override(cfg, "=5"), parameter_error);
  REQUIRE_THROWS_AS(apply_override(cfg, "no_such_key=1"), parameter_error);
  REQUIRE_THROWS_AS(apply_override(cfg, "trials=many"), parameter_error);
  REQUIRE_THROWS_AS(apply_override(cfg, "record_eigen=maybe"), parameter_error);
}

TEST_CASE("JSON emitters spell infinities and verdicts as strings") {
  SpectralSummary s;
  s.s_min = 0.5;
  s.s_max = 2.0;
  s.sigma = kInf;
  s.singular_exact = Certificate::Invertible;
  const nlohmann::json js = spectral_summary_to_json(s);
  REQUIRE(js["sigma"] == "inf");
  REQUIRE(js["s_min"] == 0.5);
  REQUIRE(js["singular_exact"] == "invertible");
  REQUIRE_FALSE(js.contains("lambda0"));

  // A light column pair sharing a row trips exactly one property; the JSON
  // carries its witness under the property's name.
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 50; ++i)
    for (int j = 2; j < 50; ++j)
      if ((i * 31 + j * 17) % 5 < 2) e.emplace_back(i, j);
  e.emplace_back(7, 0);
  e.emplace_back(7, 1);
  StructureParams sp;
  sp.delta0 = 0.09;
  const StructuralReport rep =
      check_typical_structure(SparseBinaryMatrix::from_entries(50, 50, e), 0.25, sp, 0);
  const nlohmann::json jr = structural_report_to_json(rep);
  REQUIRE(jr["props"].size() == 6);
  REQUIRE(jr["props"]["light_disjoint"] == false);
  REQUIRE(jr["all_props"] == false);
  REQUIRE(jr["violations"].contains("light_disjoint"));
  REQUIRE(jr["light_count"].get<int>() == rep.light_cols.size());

  TrialRecord r;
  r.experiment = ExperimentKind::PhaseTransition;
  r.model = ModelKind::UndirectedER;
  r.n = 10;
  r.p = 0.2;
  r.invertible = true;
  r.s_min = 0.25;
  const nlohmann::json ja = aggregate_to_json(aggregate({r}));
  REQUIRE(ja["experiment"] == "phase_transition");
  REQUIRE(ja["groups"].size() == 1);
  REQUIRE(ja["groups"][0]["events"]["invertible"]["numer"] == 1);
  REQUIRE(ja["groups"][0]["numeric"]["s_min"]["q50"] == 0.25);

  const auto path = (scratch() / "report.json").string();
  emit_json(ja, path);
  REQUIRE(nlohmann::json::parse(slurp(path)) == ja);
}

TEST_CASE("command-line binary drives the same library end to end") {
  const auto dir = scratch() / "cli";
  std::filesystem::create_directories(dir);
  const std::string out = " --out-dir " + dir.string();

  // Sampling is deterministic: identical invocations, identical bytes.
  REQUIRE(run_cli("sample --model bipartite --n 6 --p 0.3 --seed 5 --out m1.txt" + out) == 0);
  REQUIRE(run_cli("sample --model bipartite --n 6 --p 0.3 --seed 5 --out m2.txt" + out) == 0);
  REQUIRE(slurp(dir / "m1.txt") == slurp(dir / "m2.txt"));
  REQUIRE(load_matrix((dir / "m1.txt").string()).rows() == 6);

  REQUIRE(run_cli("spectrum --in " + (dir / "m1.txt").string() + " --json spec.json" + out) == 0);
  const nlohmann::json spec = nlohmann::json::parse(slurp(dir / "spec.json"));
  REQUIRE(spec.contains("singular_exact"));

  REQUIRE(run_cli("distance --in " + (dir / "m1.txt").string() + " --json d.json" + out) == 0);
  const nlohmann::json dist = nlohmann::json::parse(slurp(dir / "d.json"));
  REQUIRE(dist.contains("quad"));
  REQUIRE(dist.contains("projection"));

  // Usage errors exit 2; missing inputs exit 1.
  REQUIRE(run_cli("") == 2);
  REQUIRE(run_cli("sample --n 6") == 2);
  REQUIRE(run_cli("sample --model nosuch --n 6 --p 0.3") == 2);
  REQUIRE(run_cli("sample --model undirected --n 6 --p 1.5") == 2);
  REQUIRE(run_cli("spectrum --in " + (dir / "missing.txt").string()) == 1);

  // A small campaign through config + overrides, then offline aggregation.
  spit(dir / "cfg.json",
       R"({"experiment":"phase_transition","models":"undirected","n":8,"k":0,)"
       R"("trials":2,"seed":7,"record_spectra":false})");
  const std::string cfg_arg = " --config " + (dir / "cfg.json").string();
  REQUIRE(run_cli("run" + cfg_arg + " --out r.csv --aggregate agg.json" + out) == 0);
  const std::vector<TrialRecord> recs = load_csv((dir / "r.csv").string());
  REQUIRE(recs.size() == 2);
  REQUIRE(recs[0].seed == 7);
  REQUIRE(nlohmann::json::parse(slurp(dir / "agg.json")).contains("groups"));

  REQUIRE(run_cli("run" + cfg_arg + " --set trials=3 --out r3.csv" + out) == 0);
  REQUIRE(load_csv((dir / "r3.csv").string()).size() == 3);

  // Byte-identical rerun of the identical campaign.
  REQUIRE(run_cli("run" + cfg_arg + " --out rr.csv" + out) == 0);
  REQUIRE(slurp(dir / "rr.csv") == slurp(dir / "r.csv"));

  REQUIRE(run_cli("aggregate --in " + (dir / "r.csv").string() + " --out a2.json" + out) == 0);
  REQUIRE(nlohmann::json::parse(slurp(dir / "a2.json"))["experiment"] ==
          "phase_transition");
}
