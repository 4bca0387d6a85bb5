#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smallcap/error.hpp"
#include "smallcap/harness.hpp"

using namespace smallcap;
using namespace smallcap::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("smallcap-test-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string("\"") + SMALLCAP_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("number format: 12 significant digits, scientific outside 1e-9..1e9") {
  CHECK(format_number(45.0) == "45");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-2.5) == "-2.5");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(123456789.123456) == "123456789.123");
  CHECK(format_number(999999999.0) == "999999999");
  CHECK(format_number(1e9) == "1e+09");
  CHECK(format_number(6.02214076e23) == "6.02214076e+23");
  CHECK(format_number(1e-9) == "0.000000001");
  CHECK(format_number(2.5e-10) == "2.5e-10");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(rounded(1.0 / 3.0) == 0.333333333333);
  CHECK(rounded(45.0) == 45.0);
}

TEST_CASE("csv tables") {
  CsvTable t{{"N", "method"}, {{"5", "exact"}, {"6", "a,b"}}};
  CHECK(t.str() == "N,method\n5,exact\n6,\"a,b\"\n");
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = fresh_dir("sha");
  spit(dir / "f", "abc");
  CHECK(sha256_file(dir / "f") == sha256_hex("abc"));
}

TEST_CASE("config documents and lists") {
  const auto doc = ConfigDoc::parse("# comment\n[sweep]\nkind = mainexp  # trailing\nN = 1..3, 7\n"
                                    "name = \"abc\"\n[budget]\ntuples=100\n");
  CHECK(doc.get("sweep", "kind") == "mainexp");
  CHECK(doc.get("sweep", "name") == "abc");
  CHECK(parse_int_list(doc.get("sweep", "N")) == std::vector<std::int64_t>{1, 2, 3, 7});
  CHECK(parse_real_list("0.5, 1e3") == std::vector<double>{0.5, 1000.0});
  CHECK(doc.has("budget", "tuples"));
  CHECK_FALSE(doc.has("budget", "cells"));
  CHECK_THROWS_AS(ConfigDoc::parse("[sweep]\nkind\n"), ValidationError);
  CHECK_THROWS_AS(ConfigDoc::parse("[sweep]\nN = 1\nN = 2\n"), ValidationError);
  CHECK_THROWS_AS(ConfigDoc::parse("[sweep\n"), ValidationError);
  CHECK_THROWS_AS(parse_int("3.5"), ValidationError);
  CHECK_THROWS_AS(parse_real("abc"), ValidationError);
  CHECK_THROWS_AS(parse_int_list("5..2"), ValidationError);
}

TEST_CASE("sweep plans validate kinds, keys and point counts") {
  auto plan = SweepPlan::from_doc(
      ConfigDoc::parse("[sweep]\nkind = mainexp\nN = 32, 48, 64\nsigma = 1\ns = 4\n"
                       "coeffs = random_sign\nseeds = 1..5\nh0_policy = random\n[budget]\n"
                       "tuples = 1000\n"),
      "me");
  CHECK(plan.name == "me");
  CHECK(plan.mainexp.s == 4);
  CHECK(plan.mainexp.seeds.size() == 5u);
  CHECK(plan.mainexp.random_h0);
  CHECK(plan.mainexp.max_tuples == 1000u);
  auto bad = [](const std::string& text) {
    return SweepPlan::from_doc(ConfigDoc::parse(text), "x");
  };
  CHECK_THROWS_AS(bad("[sweep]\nkind = nope\n"), ValidationError);
  CHECK_THROWS_AS(bad("[sweep]\nkind = synthetic\nN = 1, 2\n"), ValidationError);
  CHECK_THROWS_AS(bad("[sweep]\nkind = synthetic\nN = 1,2,3\nbeta = 1\n"), ValidationError);
  CHECK_THROWS_AS(bad("[sweep]\nkind = maincor\nR = 256, 1024, 4096\nbeta = 0.1\n"),
                  ValidationError);
  CHECK_THROWS_AS(bad("[other]\n[sweep]\nkind = synthetic\nN = 1,2,3\n"), ValidationError);
  CHECK_THROWS_AS(bad("[sweep]\nkind = synthetic\nN = 1,2,3\n[budget]\nflops = 1\n"),
                  ValidationError);
}

TEST_CASE("cli moment: result record, manifest and exit codes") {
  const auto dir = fresh_dir("moment");
  const auto log = dir / "log";
  REQUIRE(cli("moment --N 5 --sigma 0 --s 2 --coeffs constant --method exact --out \"" +
                  dir.string() + "\" --run-id m1",
              log) == kExitOk);
  CHECK(slurp(log).find("value=45 ") != std::string::npos);
  const auto rec = load_json(dir / "results" / "m1.json");
  CHECK(rec["value"].get<double>() == 45.0);
  CHECK(rec["manifest"] == "manifests/m1.json");
  const auto man = load_json(dir / "manifests" / "m1.json");
  CHECK(man["state"] == "ok");
  CHECK(man["config"]["N"] == 5);
  CHECK(man["seeds"][0] == 1);
  CHECK(man["budgets"]["tuples"].get<double>() > 0);
  REQUIRE(man["outputs"].size() == 1u);
  CHECK(man["outputs"][0]["path"] == "results/m1.json");
  CHECK(man["outputs"][0]["sha256"] == sha256_file(dir / "results" / "m1.json"));

  CHECK(cli("moment --N 1 --s 3 --sigma 1.7 --out \"" + dir.string() + "\"", log) == kExitOk);
  CHECK(cli("moment --N 30 --s 1 --sigma 1 --coeffs random_sign --seed 7 --out \"" +
                dir.string() + "\" --run-id l2",
            log) == kExitOk);
  CHECK(load_json(dir / "results" / "l2.json")["value"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK(cli("moment --N 0 --out \"" + dir.string() + "\" --run-id bad", log) == kExitValidation);
  CHECK(load_json(dir / "manifests" / "bad.json")["state"] == "FAILED");
  CHECK(cli("moment --N 5 --method nope --out \"" + dir.string() + "\"", log) == kExitValidation);
  CHECK(cli("moment --N 5 --s 2 --p 3 --out \"" + dir.string() + "\"", log) == kExitValidation);
  CHECK(cli("moment --N 400 --s 3 --budget-tuples 1000 --out \"" + dir.string() + "\"", log) ==
        kExitBudget);
  CHECK(cli("moment --N 5 --out \"" + dir.string() + "\" --run-id m1", log) == kExitValidation);
  CHECK(cli("bogus", log) == kExitValidation);
  CHECK(cli("--help", log) == kExitOk);
  CHECK(cli("moment --N 3 --method quad --s 2 --out \"" + dir.string() + "\" --run-id q", log) ==
        kExitOk);
  CHECK(load_json(dir / "results" / "q.json")["value"].get<double>() ==
        doctest::Approx(2.0 * 9 - 3).epsilon(1e-9));
}

TEST_CASE("cli sweep: synthetic fit, reproducible tables, failures") {
  const auto dir = fresh_dir("sweep");
  const auto log = dir / "log";
  spit(dir / "syn.toml", "[sweep]\nkind = synthetic\nN = 10, 20, 40\nexponent = 1.75\nscale = 2\n");
  const std::string out = " --out \"" + (dir / "o").string() + "\"";
  REQUIRE(cli("sweep \"" + (dir / "syn.toml").string() + "\"" + out + " --run-id a", log) ==
          kExitOk);
  REQUIRE(cli("sweep \"" + (dir / "syn.toml").string() + "\"" + out + " --run-id b", log) ==
          kExitOk);
  const auto rec = load_json(dir / "o" / "results" / "a.json");
  CHECK(rec["slope"].get<double>() == doctest::Approx(1.75).epsilon(1e-9));
  CHECK(rec["status"] == "PASS");
  const std::string table = slurp(dir / "o" / "tables" / "syn-a.csv");
  CHECK(table.rfind("N,value,envelope,seed_count,method,err_estimate\n", 0) == 0);
  CHECK(table.find('\r') == std::string::npos);
  CHECK(table == slurp(dir / "o" / "tables" / "syn-b.csv"));
  CHECK(slurp(dir / "o" / "tables" / "syn-a-fit.csv") ==
        slurp(dir / "o" / "tables" / "syn-b-fit.csv"));
  const auto man = load_json(dir / "o" / "manifests" / "a.json");
  CHECK(man["outputs"].size() == 3u);
  for (const auto& o : man["outputs"]) {
    CHECK(o["sha256"] == sha256_file(dir / "o" / o["path"].get<std::string>()));
  }
  CHECK(man["config"]["exponent"].get<double>() == 1.75);

  spit(dir / "two.toml", "[sweep]\nkind = synthetic\nN = 10, 20\n");
  CHECK(cli("sweep \"" + (dir / "two.toml").string() + "\"" + out, log) == kExitValidation);
  CHECK(cli("sweep \"" + (dir / "missing.toml").string() + "\"" + out, log) == kExitValidation);

  spit(dir / "me.toml", "[sweep]\nkind = mainexp\nN = 6, 8, 10, 300\ns = 3\n[budget]\ntuples = 1e6\n");
  CHECK(cli("sweep \"" + (dir / "me.toml").string() + "\"" + out + " --run-id partial", log) ==
        kExitBudget);
  const auto failed = load_json(dir / "o" / "manifests" / "partial.json");
  CHECK(failed["state"] == "FAILED");
  const std::string partial = slurp(dir / "o" / "tables" / "me-partial.csv");
  CHECK(std::count(partial.begin(), partial.end(), '\n') == 4);

  spit(dir / "strict.toml", "[sweep]\nkind = synthetic\nN = 2, 4, 8\nexponent = 1\n"
                            "tolerance = -1\n");
  CHECK(cli("sweep \"" + (dir / "strict.toml").string() + "\"" + out, log) == kExitCheckFailed);
}

TEST_CASE("cli geometry: reports and violations") {
  const auto dir = fresh_dir("geometry");
  const auto log = dir / "log";
  const std::string out = " --out \"" + dir.string() + "\"";
  REQUIRE(cli("geometry --check geo1 --R 1048576 --beta 0.75 --c-eps 1 --samples 2000 --seed 1" +
                  out + " --run-id g1",
              log) == kExitOk);
  const auto rec = load_json(dir / "results" / "g1.json");
  CHECK(rec["violations"] == 0);
  CHECK(rec["samples"].get<std::uint64_t>() >= 2000u);
  CHECK(rec["runs"].size() > 1u);
  REQUIRE(cli("geometry --check rescale --R-prev 4096 --l 3" + out + " --run-id rs", log) ==
          kExitOk);
  CHECK(load_json(dir / "results" / "rs.json")["max_residual"].get<double>() <= 1e-9);
  REQUIRE(cli("geometry --check partition --R 1024 --beta 0.5 --samples 100000" + out, log) ==
          kExitOk);
  CHECK(cli("geometry --check geo2 --samples 300" + out, log) == kExitOk);
  CHECK(cli("geometry --check geo3 --samples 300" + out, log) == kExitOk);
  CHECK(cli("geometry --check broad-narrow --samples 500" + out, log) == kExitOk);
  CHECK(cli("geometry --check geo2 --case 1 --r-k 256" + out, log) == kExitValidation);
  CHECK(cli("geometry --check geo9" + out, log) == kExitValidation);
  CHECK(cli("geometry --check partition --beta 0.1" + out, log) == kExitValidation);
  // Neighbouring boxes overlap, so a threshold below 1 must be violated.
  CHECK(cli("geometry --check geo1 --r-k 256 --r-next 512 --threshold 0.5 --samples 500" + out +
                " --run-id tight",
            log) == kExitCheckFailed);
  CHECK(slurp(log).find("violation: check=geo1") != std::string::npos);
  CHECK(load_json(dir / "manifests" / "tight.json")["state"] == "check_failed");
  const auto tight = load_json(dir / "results" / "tight.json");
  CHECK(tight["violations"].get<int>() > 0);
  CHECK(tight["runs"][0]["first_violation"].size() == 3u);
  CHECK(cli("geometry --check geo2 --threshold 2" + out, log) == kExitValidation);
}
