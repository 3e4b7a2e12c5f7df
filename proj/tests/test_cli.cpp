// End-to-end contract tests for the multcorr binary: exit codes, byte-level
// stdout, the stderr run manifest, and JSON shape against the schemas/ files.
//
// The binary under test comes from MULTCORR_BIN and the schema directory from
// MULTCORR_SCHEMAS; both are injected by ctest.  The FNV-1a checksum used to
// cross-check the manifest is reimplemented here from the published constants
// so the test does not share code with the binary.
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_util.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// process runner

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const char* bin_path() {
  const char* bin = std::getenv("MULTCORR_BIN");
  REQUIRE_MESSAGE(bin != nullptr,
                  "MULTCORR_BIN must point at the multcorr binary");
  return bin;
}

// Runs `<env_prefix> <binary> <args>` through the shell, capturing both
// streams.  env_prefix is for VAR=value assignments.
RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const std::string tag = std::to_string(static_cast<long>(::getpid())) + "_" +
                          std::to_string(counter++);
  const std::string out_path = "/tmp/multcorr_cli_" + tag + ".out";
  const std::string err_path = "/tmp/multcorr_cli_" + tag + ".err";
  std::string cmd;
  if (!env_prefix.empty()) cmd = env_prefix + " ";
  cmd += std::string(bin_path()) + " " + args + " >" + out_path + " 2>" +
         err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string write_temp(const std::string& stem, const std::string& contents) {
  const std::string path = "/tmp/multcorr_cli_" + stem + "_" +
                           std::to_string(static_cast<long>(::getpid()));
  std::ofstream out(path);
  out << contents;
  return path;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

// ---------------------------------------------------------------------------
// independent FNV-1a 64 (offset basis and prime from the published spec)

std::uint64_t fnv1a64_oracle(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64_oracle(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// minimal JSON Schema checker (the subset the schemas/ files use)

bool matches_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  return false;
}

json load_schema(const std::string& name) {
  const char* dir = std::getenv("MULTCORR_SCHEMAS");
  REQUIRE_MESSAGE(dir != nullptr,
                  "MULTCORR_SCHEMAS must point at the schemas directory");
  const std::string path = std::string(dir) + "/" + name;
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open schema " << path);
  json schema = json::parse(in, nullptr, false);
  REQUIRE_MESSAGE(!schema.is_discarded(), "schema " << path
                                                    << " is not valid JSON");
  return schema;
}

void validate(const json& v, const json& schema, const std::string& path,
              std::vector<std::string>& errors) {
  if (schema.contains("$ref")) {
    validate(v, load_schema(schema["$ref"].get<std::string>()), path, errors);
    return;
  }
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = matches_type(v, t.get<std::string>());
    } else {
      for (const json& one : t) ok = ok || matches_type(v, one.get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + t.dump() + ", got " +
                       v.dump());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const json& cand : schema["enum"]) ok = ok || (v == cand);
    if (!ok) {
      errors.push_back(path + ": " + v.dump() + " not in " +
                       schema["enum"].dump());
    }
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (schema.contains("minimum") && d < schema["minimum"].get<double>()) {
      errors.push_back(path + ": " + v.dump() + " violates minimum " +
                       schema["minimum"].dump());
    }
    if (schema.contains("exclusiveMinimum") &&
        d <= schema["exclusiveMinimum"].get<double>()) {
      errors.push_back(path + ": " + v.dump() +
                       " violates exclusiveMinimum " +
                       schema["exclusiveMinimum"].dump());
    }
  }
  if (v.is_string() && schema.contains("pattern")) {
    const std::regex re(schema["pattern"].get<std::string>());
    if (!std::regex_search(v.get<std::string>(), re)) {
      errors.push_back(path + ": " + v.dump() + " does not match pattern " +
                       schema["pattern"].get<std::string>());
    }
  }
  if (v.is_object()) {
    if (schema.contains("required")) {
      for (const json& name : schema["required"]) {
        if (!v.contains(name.get<std::string>())) {
          errors.push_back(path + ": missing required field '" +
                           name.get<std::string>() + "'");
        }
      }
    }
    const json props = schema.value("properties", json::object());
    for (const auto& [key, sub] : v.items()) {
      const auto it = props.find(key);
      if (it != props.end()) {
        validate(sub, *it, path + "." + key, errors);
      } else if (schema.value("additionalProperties", json(true)) ==
                 json(false)) {
        errors.push_back(path + ": unexpected field '" + key + "'");
      }
    }
  }
  if (v.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      validate(v[i], schema["items"], path + "[" + std::to_string(i) + "]",
               errors);
    }
  }
}

json parse_json(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  REQUIRE_MESSAGE(!v.is_discarded(), "invalid JSON: " << text);
  return v;
}

json expect_valid(const std::string& text, const std::string& schema_name) {
  const json v = parse_json(text);
  std::vector<std::string> errors;
  validate(v, load_schema(schema_name), "$", errors);
  for (const std::string& e : errors) {
    FAIL_CHECK(schema_name << ": " << e);
  }
  return v;
}

// Validates the stderr manifest and cross-checks it against the captured
// stdout bytes with the independent checksum.
json expect_manifest(const RunResult& r, const std::string& subcommand) {
  const json m = expect_valid(r.err, "run_manifest.schema.json");
  CHECK(m["subcommand"] == subcommand);
  CHECK(m["version"] == "0.1.0");
  CHECK(m["stdout_bytes"] == r.out.size());
  CHECK(m["stdout_checksum"] ==
        "fnv1a64:" + hex64_oracle(fnv1a64_oracle(r.out)));
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// rho

TEST_CASE("cli: rho point value is byte-exact with a matching manifest") {
  const RunResult r = run_cli("rho --u 1.0");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1.00000000000\n");
  const json m = expect_manifest(r, "rho");
  CHECK(m["argv"] == json::array({"rho", "--u", "1.0"}));
  CHECK(m["seed"].is_null());
  CHECK(m["threads"].get<int>() >= 1);
  CHECK(m["stdout_bytes"] == 14);
}

TEST_CASE("cli: rho --json reports the point and the truncation flag") {
  const RunResult r = run_cli("rho --u 10 --json");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "rho_point.schema.json");
  CHECK(j["u"] == 10.0);
  CHECK(j["truncated"] == false);
  CHECK_NEAR(j["rho"].get<double>(), 2.770192485437e-11, 1e-20);
  expect_manifest(r, "rho");
}

TEST_CASE("cli: rho --table writes a CSV and summarizes it") {
  const std::string csv = "/tmp/multcorr_cli_rho_" +
                          std::to_string(static_cast<long>(::getpid())) +
                          ".csv";
  const RunResult r = run_cli("rho --table 0.01,5 --out " + csv + " --json");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "rho_table_summary.schema.json");
  CHECK_NEAR(j["step"].get<double>(), 0.01, 1e-12);
  CHECK_NEAR(j["u_max"].get<double>(), 5.0, 1e-9);
  CHECK(j["rows"] == 501);
  CHECK(j["out"] == csv);

  const std::vector<std::string> lines = split(slurp(csv), '\n');
  REQUIRE(lines.size() == 502);
  CHECK(lines[0] == "u,rho");
  {
    const std::vector<std::string> row = split(lines[1], ',');
    REQUIRE(row.size() == 2);
    CHECK_NEAR(std::stod(row[0]), 0.0, 1e-12);
    CHECK(std::stod(row[1]) == 1.0);
  }
  {
    const std::vector<std::string> row = split(lines[101], ',');
    REQUIRE(row.size() == 2);
    CHECK_NEAR(std::stod(row[0]), 1.0, 1e-9);
    CHECK(std::stod(row[1]) == 1.0);
  }
  {
    const std::vector<std::string> row = split(lines[201], ',');
    REQUIRE(row.size() == 2);
    CHECK_NEAR(std::stod(row[0]), 2.0, 1e-9);
    CHECK_NEAR(std::stod(row[1]), 1.0 - std::log(2.0), 1e-3);
  }

  const RunResult human = run_cli("rho --table 0.01,5 --out " + csv);
  CHECK(human.exit_code == 0);
  CHECK(human.out == "wrote 501 rows to " + csv + "\n");
  std::remove(csv.c_str());
}

TEST_CASE("cli: rho without a selector is a usage error") {
  const RunResult r = run_cli("rho");
  CHECK(r.exit_code == 2);
  CHECK(r.out.empty());
  CHECK(r.err == "usage error: one of --u or --table is required\nrun '" +
                     std::string(bin_path()) + " --help' for usage\n");
}

TEST_CASE("cli: rho table without --out names the missing flag") {
  const RunResult r = run_cli("rho --table 0.01,5");
  CHECK(r.exit_code == 3);
  CHECK(r.err == "error: --table requires --out <path>\n");
}

TEST_CASE("cli: an unreachable residual tolerance is a numeric error") {
  const RunResult r = run_cli("rho --u 3 --tol 1e-300");
  CHECK(r.exit_code == 4);
  CHECK(r.out.empty());
  CHECK(r.err.starts_with("numeric error: delay-identity residual"));
  CHECK(r.err.find("exceeds tolerance") != std::string::npos);
}

// ---------------------------------------------------------------------------
// usage errors and suggestions

TEST_CASE("cli: unknown subcommand suggests the nearest name") {
  const RunResult r = run_cli("facotr --range 1:10");
  CHECK(r.exit_code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.starts_with("usage error: "));
  CHECK(r.err.find("did you mean 'factor'?") != std::string::npos);
  CHECK(r.err.find("--help' for usage") != std::string::npos);
}

TEST_CASE("cli: --version prints the bare version") {
  const RunResult r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "0.1.0\n");
  CHECK(r.err.empty());
}

TEST_CASE("cli: --help lists the subcommands without a manifest") {
  const RunResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.err.empty());
  for (const char* name : {"factor", "rho", "integral", "correlate", "charsum",
                           "experiment", "uniformity"}) {
    CHECK_MESSAGE(r.out.find(name) != std::string::npos,
                  "help does not mention " << name);
  }
  const RunResult sub = run_cli("rho --help");
  CHECK(sub.exit_code == 0);
  CHECK(sub.out.find("--u") != std::string::npos);
  CHECK(sub.out.find("--table") != std::string::npos);
}

// ---------------------------------------------------------------------------
// factor

TEST_CASE("cli: factor prints one tab-separated factorization per line") {
  const RunResult r = run_cli("factor --range 8:13");
  CHECK(r.exit_code == 0);
  CHECK(r.out ==
        "8\t2^3\n"
        "9\t3^2\n"
        "10\t2^1 5^1\n"
        "11\t11^1\n"
        "12\t2^2 3^1\n");
  expect_manifest(r, "factor");

  const RunResult one = run_cli("factor --range 1:2");
  CHECK(one.exit_code == 0);
  CHECK(one.out == "1\t\n");
}

TEST_CASE("cli: factor rejects reversed and oversized ranges") {
  const RunResult rev = run_cli("factor --range 5:4");
  CHECK(rev.exit_code == 3);
  CHECK(rev.err == "error: range end precedes range start\n");

  const RunResult big = run_cli("factor --range 1:400000000");
  CHECK(big.exit_code == 3);
  CHECK(big.err ==
        "error: factor --range is limited to 2^27 integers per invocation\n");
}

TEST_CASE("cli: factor output does not depend on the segment size") {
  const std::string range = "1000000000:1000010000";
  const RunResult a = run_cli("factor --range " + range);
  const RunResult b = run_cli("factor --range " + range + " --segment-size 4096");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(a.out == b.out);
}

// ---------------------------------------------------------------------------
// correlate

TEST_CASE("cli: correlate emits the full report with frozen goldens") {
  const std::string cmd =
      "correlate --g1 liouville --g2 liouville --h 1 --x 100000 --omega logx";
  const RunResult r = run_cli(cmd);
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "correlation_report.schema.json");
  CHECK(j["g1"] == "liouville");
  CHECK(j["g2"] == "liouville");
  CHECK(j["h"] == 1);
  CHECK(j["x"] == 100000);
  CHECK(j["omega"] == "logx");
  CHECK_NEAR(j["omega_value"].get<double>(), std::log(100000.0), 1e-9);
  CHECK(j["n_terms"] == 91315);
  CHECK_NEAR(j["lhs"].get<double>(), -0.0007221151346, 1e-10);
  CHECK_NEAR(j["discrepancy"].get<double>(), 0.0007221186346, 1e-7);
  CHECK_NEAR(j["rhs"].get<double>(),
             j["delta1"].get<double>() * j["delta2"].get<double>(), 1e-12);
  expect_manifest(r, "correlate");

  // Byte-for-byte reproducibility; manifests agree up to the wall clock.
  const RunResult again = run_cli(cmd);
  CHECK(again.out == r.out);
  json m1 = parse_json(r.err);
  json m2 = parse_json(again.err);
  m1.erase("wall_time_seconds");
  m2.erase("wall_time_seconds");
  CHECK(m1 == m2);
}

TEST_CASE("cli: a zero shift is rejected with the domain exit code") {
  const RunResult r = run_cli(
      "correlate --g1 liouville --g2 liouville --h 0 --x 1000 --omega logx");
  CHECK(r.exit_code == 3);
  CHECK(r.out.empty());
  CHECK(r.err == "error: shift h must be nonzero\n");
}

TEST_CASE("cli: the worker count never changes the numbers") {
  const std::string cmd = "experiment run erdos_turan --x 1000000";
  const RunResult one = run_cli(cmd, "MULTCORR_THREADS=1");
  const RunResult three = run_cli(cmd, "MULTCORR_THREADS=3");
  CHECK(one.exit_code == 0);
  CHECK(three.exit_code == 0);
  CHECK(one.out == three.out);
  CHECK(parse_json(one.err)["threads"] == 1);
  CHECK(parse_json(three.err)["threads"] == 3);

  const json j = expect_valid(one.out, "density_estimate.schema.json");
  CHECK_NEAR(j["estimate"].get<double>(), 0.5058505894, 1e-9);

  const RunResult opt = run_cli("--threads 2 " + cmd);
  CHECK(opt.exit_code == 0);
  CHECK(opt.out == one.out);
  CHECK(parse_json(opt.err)["threads"] == 2);
}

// ---------------------------------------------------------------------------
// charsum

TEST_CASE("cli: charsum corr matches the frozen correlation") {
  const RunResult r =
      run_cli("charsum corr --Q 5 --h 1 --x 1000000 --omega logx");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "burgess_report.schema.json");
  CHECK(j["Q"] == 5);
  CHECK(j["h"] == 1);
  CHECK(j["x"] == 1000000);
  CHECK(j["in_burgess_regime"] == true);
  CHECK(j["n_terms"] == 927618);
  CHECK_NEAR(j["value"].get<double>(), -0.2000030279, 1e-9);
  expect_manifest(r, "charsum corr");
}

TEST_CASE("cli: charsum qnr reports both densities and the analytic target") {
  const RunResult r = run_cli("charsum qnr --Q 5 --x 1000000");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "qnr_report.schema.json");
  CHECK(j["Q"] == 5);
  CHECK(j["x"] == 1000000);
  CHECK_NEAR(j["target"].get<double>(), 0.15, 1e-12);
  CHECK(j["log_density"].get<double>() > 0.19);
  CHECK(j["log_density"].get<double>() < 0.23);
  CHECK(j["natural_density"].get<double>() > 0.18);
  CHECK(j["natural_density"].get<double>() < 0.22);
  expect_manifest(r, "charsum qnr");
}

TEST_CASE("cli: charsum rejects moduli outside its domain") {
  const RunResult square = run_cli("charsum corr --Q 9 --h 1 --x 100000 --omega logx");
  CHECK(square.exit_code == 3);
  CHECK(square.err.starts_with("error: "));
  CHECK(square.err.find("squarefree") != std::string::npos);

  const RunResult even = run_cli("charsum qnr --Q 4 --x 100000");
  CHECK(even.exit_code == 3);
  CHECK(even.err.starts_with("error: "));
}

// ---------------------------------------------------------------------------
// experiment run

TEST_CASE("cli: experiment run erdos_turan returns its density estimate") {
  const RunResult r = run_cli("experiment run erdos_turan --x 100000");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "density_estimate.schema.json");
  CHECK(j["label"] == "erdos_turan");
  CHECK(j["x"] == 100000);
  CHECK(j["weighting"] == "logarithmic");
  CHECK(j["window"] == "full");
  CHECK_NEAR(j["estimate"].get<double>(), 0.5070003619, 1e-9);
  CHECK(j["target"] == 0.5);
  CHECK_NEAR(j["abs_error"].get<double>(), 0.0070003619, 1e-9);
  expect_manifest(r, "experiment run");
}

TEST_CASE("cli: experiment run omega_joint nests three estimates") {
  const RunResult r = run_cli(
      "experiment run omega_joint --x 30000 --params a=0.5,b=0.5,k=1,l=0");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "omega_joint_result.schema.json");
  CHECK(j["joint"]["label"] == "omega_joint[a=0.5,b=0.5,k=1,l=0]");
  CHECK(j["joint"]["x"] == 30000);
  const double log2 = std::log(2.0);
  CHECK_NEAR(j["joint"]["target"].get<double>(), log2 * (1.0 - log2), 1e-6);
  CHECK_NEAR(j["marginal1"]["target"].get<double>(), log2, 1e-6);
  CHECK_NEAR(j["marginal2"]["target"].get<double>(), 1.0 - log2, 1e-6);
  for (const char* part : {"joint", "marginal1", "marginal2"}) {
    const double est = j[part]["estimate"].get<double>();
    CHECK(est > 0.0);
    CHECK(est < 1.0);
  }
}

TEST_CASE("cli: experiment run ordering emits the permutation table") {
  const RunResult r = run_cli("experiment run ordering --x 100000 --params k=3");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "ordering_report.schema.json");
  CHECK(j["x"] == 100000);
  CHECK(j["k"] == 3);
  REQUIRE(j["orderings"].size() == 6);
  const std::vector<std::string> expected = {"123", "132", "213",
                                             "231", "312", "321"};
  double mass = j["ties"]["estimate"].get<double>();
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(j["orderings"][i]["label"] == expected[i]);
    CHECK_NEAR(j["orderings"][i]["target"].get<double>(), 1.0 / 6.0, 1e-12);
    mass += j["orderings"][i]["estimate"].get<double>();
  }
  CHECK(j["ties"]["estimate"] == 0.0);
  CHECK_NEAR(mass, 1.0, 1e-9);
}

TEST_CASE("cli: experiment run without x names the fix") {
  const RunResult r = run_cli("experiment run erdos_turan");
  CHECK(r.exit_code == 3);
  CHECK(r.err ==
        "error: missing window end: pass --x or set x in the config file\n");
}

TEST_CASE("cli: unknown experiment names suggest a close match") {
  const RunResult r = run_cli("experiment run erdos_turna --x 1000");
  CHECK(r.exit_code == 3);
  CHECK(r.err ==
        "error: unknown experiment 'erdos_turna'; did you mean "
        "'erdos_turan'?\n");
}

// ---------------------------------------------------------------------------
// experiment sweep

TEST_CASE("cli: experiment sweep prints a consistent CSV grid") {
  const RunResult r =
      run_cli("experiment sweep alpha_shift --param alpha=0:0.4:0.2 --x 30000");
  CHECK(r.exit_code == 0);
  const std::vector<std::string> lines = split(r.out, '\n');
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "param,estimate,target,abs_error");
  const double params[] = {0.0, 0.2, 0.4};
  for (int i = 1; i <= 3; ++i) {
    const std::vector<std::string> row = split(lines[i], ',');
    REQUIRE(row.size() == 4);
    CHECK_NEAR(std::stod(row[0]), params[i - 1], 1e-12);
    const double est = std::stod(row[1]);
    const double target = std::stod(row[2]);
    const double abs_err = std::stod(row[3]);
    CHECK(est > 0.0);
    CHECK(est < 1.0);
    CHECK_NEAR(abs_err, std::fabs(est - target), 1e-9);
  }
  expect_manifest(r, "experiment sweep");
}

TEST_CASE("cli: the ordering experiment cannot be swept") {
  const RunResult r =
      run_cli("experiment sweep ordering --param k=2:4:1 --x 1000");
  CHECK(r.exit_code == 3);
  CHECK(r.err ==
        "error: experiment 'ordering' reports a permutation table and cannot "
        "be swept; use `experiment run ordering`\n");
}

TEST_CASE("cli: sweeping an unknown parameter is rejected") {
  const RunResult r =
      run_cli("experiment sweep alpha_shift --param gamma=0:1:0.5 --x 1000");
  CHECK(r.exit_code == 3);
  CHECK(r.err == "error: unknown parameter 'gamma'\n");
}

// ---------------------------------------------------------------------------
// config files

TEST_CASE("cli: config files feed parameters and explicit flags win") {
  const std::string cfg = write_temp("cfg",
                                     "# truncated Liouville scan\n"
                                     "x = 5000\n"
                                     "omega = logx  # accepted, unused here\n"
                                     "eps = 0.3\n");
  const RunResult base =
      run_cli("experiment run truncated_liouville --config " + cfg);
  CHECK(base.exit_code == 0);
  const json j = expect_valid(base.out, "density_estimate.schema.json");
  CHECK(j["label"] == "truncated_liouville[eps=0.3]");
  CHECK(j["x"] == 5000);
  CHECK(std::fabs(j["estimate"].get<double>()) < 1.0);

  const RunResult over = run_cli("experiment run truncated_liouville --config " +
                                 cfg + " --params eps=0.1 --x 9000");
  CHECK(over.exit_code == 0);
  const json o = expect_valid(over.out, "density_estimate.schema.json");
  CHECK(o["label"] == "truncated_liouville[eps=0.1]");
  CHECK(o["x"] == 9000);
  std::remove(cfg.c_str());
}

TEST_CASE("cli: config errors carry line numbers") {
  const std::string dup = write_temp("cfg_dup",
                                     "x = 5000\n"
                                     "eps = 0.3\n"
                                     "x = 7000\n");
  const RunResult r1 =
      run_cli("experiment run truncated_liouville --config " + dup);
  CHECK(r1.exit_code == 3);
  CHECK(r1.err ==
        "error: config line 3: duplicate key 'x' (first set at line 1)\n");
  std::remove(dup.c_str());

  const std::string unk = write_temp("cfg_unk", "zeta = 3\n");
  const RunResult r2 =
      run_cli("experiment run truncated_liouville --config " + unk);
  CHECK(r2.exit_code == 3);
  CHECK(r2.err == "error: config line 1: unknown key 'zeta'\n");
  std::remove(unk.c_str());
}

// ---------------------------------------------------------------------------
// integral

TEST_CASE("cli: integral I tensor quadrature hits the closed form") {
  const RunResult r = run_cli("integral I --alpha 0.5 --m 1 --json");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "simplex_integral.schema.json");
  CHECK(j["method"] == "tensor_quadrature");
  CHECK(j["nodes"] == 64);
  CHECK_NEAR(j["value"].get<double>(), std::log(2.0), 1e-9);
  CHECK(parse_json(r.err)["seed"].is_null());
}

TEST_CASE("cli: integral I Monte Carlo records its seed in the manifest") {
  const RunResult mc =
      run_cli("integral I --alpha 0.35 --m 2 --method mc --seed 7 --json");
  CHECK(mc.exit_code == 0);
  const json j = expect_valid(mc.out, "simplex_integral.schema.json");
  CHECK(j["method"] == "monte_carlo");
  CHECK(j["samples"] == 400000);
  CHECK(j["seed"] == 7);
  CHECK(parse_json(mc.err)["seed"] == 7);

  const RunResult tensor = run_cli("integral I --alpha 0.35 --m 2 --json");
  const json t = expect_valid(tensor.out, "simplex_integral.schema.json");
  CHECK_NEAR(j["value"].get<double>(), t["value"].get<double>(), 5e-3);

  // An empty region is exact even under sampling.
  const RunResult empty = run_cli(
      "integral I --alpha 0.35 --m 4 --method mc --samples 1000 --seed 99 --json");
  const json e = expect_valid(empty.out, "simplex_integral.schema.json");
  CHECK(e["samples"] == 1000);
  CHECK(e["value"] == 0.0);
  CHECK(parse_json(empty.err)["seed"] == 99);
}

TEST_CASE("cli: integral I tensor refuses high dimensions") {
  const RunResult r = run_cli("integral I --alpha 0.2 --m 4 --method tensor");
  CHECK(r.exit_code == 3);
  CHECK(r.err.starts_with("error: "));
}

TEST_CASE("cli: integral T matches the frozen triangle value") {
  const RunResult r = run_cli("integral T --alpha 0.3 --json");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "triangle_integral.schema.json");
  CHECK(j["alpha"] == 0.3);
  CHECK(j["nodes"] == 64);
  CHECK_NEAR(j["value"].get<double>(), 0.1468273564, 1e-5);
  CHECK(j["truncation_bound"].get<double>() < 1e-9);
  expect_manifest(r, "integral T");
}

// ---------------------------------------------------------------------------
// uniformity

TEST_CASE("cli: uniformity basic human and JSON output agree") {
  const std::string args = "uniformity basic --g one --x 100000 --Q 5";
  const RunResult human = run_cli(args);
  CHECK(human.exit_code == 0);
  const std::vector<std::string> lines = split(human.out, '\n');
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].starts_with("eta_star = "));
  CHECK(lines[1].starts_with("worst_q = "));
  CHECK(lines[2].starts_with("worst_a = "));

  const RunResult js = run_cli(args + " --json");
  CHECK(js.exit_code == 0);
  const json j = expect_valid(js.out, "uniformity_report.schema.json");
  CHECK(j["g"] == "one");
  CHECK(j["x"] == 100000);
  CHECK(j["Q"] == 5);
  // Same format_float rendering on both paths, so the parsed doubles match.
  CHECK(std::stod(lines[0].substr(11)) == j["eta_star"].get<double>());
  CHECK(std::stoull(lines[1].substr(10)) == j["worst_q"].get<std::uint64_t>());
  CHECK(std::stoull(lines[2].substr(10)) == j["worst_a"].get<std::uint64_t>());
  CHECK(j["eta_star"].get<double>() >= 0.0);
  CHECK(j["eta_star"].get<double>() < 1e-3);
  expect_manifest(js, "uniformity basic");
}

TEST_CASE("cli: uniformity strong reports the probe grid") {
  const RunResult r = run_cli(
      "uniformity strong --g liouville --x 100000 --Q 5 --omega logx "
      "--probes 4 --json");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "strong_uniformity_report.schema.json");
  CHECK(j["omega"] == "logx");
  REQUIRE(j["probe_points"].size() == 4);
  const double x = 100000.0;
  CHECK_NEAR(j["probe_points"][0].get<double>(), x / std::log(x), 1e-6);
  CHECK(j["probe_points"][3] == x);
  for (int i = 1; i < 4; ++i) {
    CHECK(j["probe_points"][i].get<double>() >
          j["probe_points"][i - 1].get<double>());
  }
  CHECK(std::fabs(j["delta"].get<double>()) < 0.05);
  expect_manifest(r, "uniformity strong");
}

TEST_CASE("cli: uniformity stability reports the drift gap") {
  const RunResult r = run_cli(
      "uniformity stability --g liouville --x 100000 --shrink const:10 "
      "--a 1 --q 3 --json");
  CHECK(r.exit_code == 0);
  const json j = expect_valid(r.out, "stability_report.schema.json");
  CHECK(j["shrink"] == "const:10");
  CHECK(j["shrink_value"] == 10.0);
  CHECK(j["a"] == 1);
  CHECK(j["q"] == 3);
  CHECK(j["gap"].get<double>() >= 0.0);
  CHECK(j["gap"].get<double>() < 0.2);
  expect_manifest(r, "uniformity stability");
}
