#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bufchem/cli_io.hpp"
#include "bufchem/error.hpp"

using namespace bufchem;

namespace {

const std::string kFixtures = BUFCHEM_FIXTURES;

const char* kHaldane = R"(seed = 5
[growth]
type = haldane
mu_bar = 12
K = 1
K_I = 0.08
[operating]
S_in = 1.4
D = 1
)";

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::string& command, const std::string& text, OutputOptions opts = {}) {
  std::ostringstream out, err;
  const int code = dispatch(command, parse_config_text(text), opts, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("reference fixture parses") {
  const RunConfig cfg = parse_config(kFixtures + "/table1.ini");
  const auto* h = cfg.model.as_haldane();
  REQUIRE(h);
  CHECK(h->mu_bar == 12.0);
  CHECK(h->K == 1.0);
  CHECK(h->K_I == 0.08);
  CHECK(dilution(cfg) == 1.0);
  CHECK(cfg.S_in == 1.4);
  CHECK(cfg.seed == 20240611u);
}

TEST_CASE("strict parsing errors name the key") {
  CHECK(config_error(std::string(kHaldane) + "K_s = 1\n").find("operating.K_s") !=
        std::string::npos);
  CHECK(config_error(std::string(kHaldane) + "[extra]\nx = 1\n").find("extra") !=
        std::string::npos);

  std::string zero = kHaldane;
  zero.replace(zero.find("K_I = 0.08"), 10, "K_I = 0");
  const auto msg = config_error(zero);
  CHECK(msg.find("growth.K_I") != std::string::npos);
  CHECK(msg.find("parameter must be strictly positive") != std::string::npos);

  std::string bad = kHaldane;
  bad.replace(bad.find("S_in = 1.4"), 10, "S_in = 1.4x");
  CHECK(config_error(bad).find("operating.S_in") != std::string::npos);

  std::string missing = kHaldane;
  missing.replace(missing.find("mu_bar = 12\n"), 12, "");
  CHECK(config_error(missing).find("growth.mu_bar") != std::string::npos);

  CHECK_FALSE(config_error(std::string(kHaldane) + "D = 2\n").empty());  // duplicate key
}

TEST_CASE("alpha/r and the physical quadruple are mutually exclusive") {
  const auto msg = config_error(std::string(kHaldane) +
                                "[buffered]\nalpha = 1\nr = 0.5\nQ1 = 0.5\nQ2 = 0.5\n"
                                "V1 = 0.5\nV2 = 0.5\n");
  CHECK(msg.find("buffered") != std::string::npos);
}

TEST_CASE("physical split feeds the buffered configuration") {
  const char* text = R"([growth]
type = monod
mu_max = 2
K_s = 1
[operating]
S_in = 3
[buffered]
Q1 = 0.8
Q2 = 0.2
V1 = 0.9
V2 = 0.1
)";
  const RunConfig cfg = parse_config_text(text);
  const BufferedConfig b = buffered_config(cfg);
  CHECK(b.D == doctest::Approx(1.0));
  CHECK(b.r == doctest::Approx(0.9));
  CHECK(b.alpha == doctest::Approx(2.0));
}

TEST_CASE("yield rescales biomass on input and output") {
  std::string text = kHaldane;
  text.insert(text.find("K_I"), "yield = 2\n");
  text += "[simulate]\nS = 1.0\nX = 0.4\n[integrator]\nt_end = 1\n";
  const Run r = run("simulate", text);
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  CHECK(header == "t,S,X");
  CHECK(first == "0,1,0.40000000000000002");
}

TEST_CASE("commands produce JSON with the expected content") {
  const Run k = run("kinetics", kHaldane);
  REQUIRE(k.code == 0);
  const auto kj = nlohmann::json::parse(k.out);
  CHECK(kj["lambda"]["lower"].get<double>() == doctest::Approx(0.102954).epsilon(1e-6));
  CHECK(kj["seed"] == 5);

  const Run c = run("classify", kHaldane);
  CHECK(nlohmann::json::parse(c.out)["case"] == "Case2");

  const char* monod = R"([growth]
type = monod
mu_max = 2
K_s = 0.5
[operating]
S_in = 3
D = 1
[buffered]
alpha = 0.8
r = 0.6
)";
  const Run e = run("equilibria", monod);
  REQUIRE(e.code == 0);
  int positive = 0;
  const auto ej = nlohmann::json::parse(e.out);
  for (const auto& eq : ej["equilibria"]) {
    if (eq["branch"] == "BufferPositive") {
      ++positive;
      CHECK(eq["tag"] == "Stable");
    }
  }
  CHECK(positive == 1);
}

TEST_CASE("domain writes CSV plus sidecar") {
  const auto dir = std::filesystem::temp_directory_path() / "bufchem_cli_io_domain";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const Run d = run("domain", std::string(kHaldane) + "[sweep]\nalpha_min = 0.01\n"
                                                      "alpha_max = 0.62\npoints = 50\n",
                    {dir, std::nullopt});
  REQUIRE(d.code == 0);
  std::ifstream csv(dir / "domain.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "alpha,r_bar");
  int rows = 0;
  while (std::getline(csv, line)) {
    const double r = std::stod(line.substr(line.find(',') + 1));
    CHECK(r > 0.0);
    CHECK(r <= 1.0);
    ++rows;
  }
  CHECK(rows == 50);
  std::ifstream side(dir / "domain.json");
  const auto j = nlohmann::json::parse(side);
  CHECK(j.contains("ul_alpha"));
  CHECK(j["ul_alpha"].is_number());
  std::filesystem::remove_all(dir);
}

TEST_CASE("model errors exit 1 with an error object, config errors exit 2") {
  const Run e = run("equilibria", std::string(kHaldane) + "[buffered]\nalpha = 1.5\nr = 0.5\n");
  CHECK(e.code == 1);
  const auto j = nlohmann::json::parse(e.err);
  CHECK(j["error"]["kind"] == "assumption_violated");
  CHECK(e.out.empty());

  std::ostringstream out, err;
  CHECK(run_command("kinetics", kFixtures + "/does_not_exist.ini", {}, out, err) != 0);
  CHECK(nlohmann::json::parse(err.str())["error"]["kind"] == "io");

  const Run a = run("audit", kHaldane);
  CHECK(a.code == 2);
}

TEST_CASE("simulate is deterministic for a fixed seed") {
  const std::string text = std::string(kHaldane) + "[buffered]\nalpha = 0.6\nr = 0.5\n"
                                                    "[integrator]\nt_end = 5\n";
  const Run a = run("simulate", text);
  const Run b = run("simulate", text);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::string other = text;
  other.replace(other.find("seed = 5"), 8, "seed = 6");
  CHECK(run("simulate", other).out != a.out);
}
