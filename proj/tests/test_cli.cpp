#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <openssl/evp.h>
#include <sys/wait.h>

#include "oracles.hpp"
#include "perstab/models.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    static const char* hex = "0123456789abcdef";
    os << hex[md[i] >> 4] << hex[md[i] & 0xF];
  }
  return os.str();
}

// Scratch directory with input files; runs the CLI inside it.
class Sandbox {
 public:
  Sandbox() {
    static int counter = 0;
    root_ = fs::temp_directory_path() / ("perstab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  ~Sandbox() { fs::remove_all(root_); }

  fs::path file(const std::string& name, const std::string& contents) const {
    std::ofstream(root_ / name) << contents;
    return root_ / name;
  }

  fs::path path(const std::string& name) const { return root_ / name; }

  // Returns the exit code; stderr is kept in `err`.
  int run(const std::string& args) {
    const std::string cmd = "cd '" + root_.string() + "' && '" PERSTAB_CLI "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    err = slurp(root_ / "stderr.txt");
    out = slurp(root_ / "stdout.txt");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  json read_json(const std::string& name) const { return json::parse(slurp(root_ / name)); }

  std::string err, out;

 private:
  fs::path root_;
};

const char* kUniform = R"({"kind": "uniformly_damped", "parameters": {"dim": 3}})";
const char* kHeatWave = R"({"kind": "heat_wave_1d", "parameters": {"nx_heat": 32, "nx_wave": 32}})";
const char* kOscillator = R"({"kind": "conservative_oscillator"})";
const char* kScalar = R"({"kind": "diagonal", "parameters": {"eigenvalues": [-1]}})";

}  // namespace

TEST_CASE("help lists every exit code") {
  Sandbox sb;
  CHECK(sb.run("--help") == 0);
  for (int code = 0; code <= 13; ++code) {
    CHECK(sb.out.find("\n" + std::string(code < 10 ? "   " : "  ") + std::to_string(code) + "  ") != std::string::npos);
  }
  for (const char* sub : {"model", "probe", "solve", "verify", "march"}) CHECK(sb.out.find(sub) != std::string::npos);
}

TEST_CASE("model: uniformly damped summary") {
  Sandbox sb;
  sb.file("spec.json", kUniform);
  REQUIRE(sb.run("--out out model spec.json") == 0);
  const json m = sb.read_json("out/model.json");
  CHECK(m.at("dim") == 3);
  CHECK(m.at("abscissa").get<double>() == -1.0);
  CHECK(m.at("stability").at("classification") == "uniform");
}

TEST_CASE("model: heat-wave abscissa agrees with the eigenvalue oracle") {
  Sandbox sb;
  sb.file("spec.json", kHeatWave);
  REQUIRE(sb.run("--out out model spec.json") == 0);
  const json m = sb.read_json("out/model.json");
  const perstab::Generator g = perstab::make_heat_wave_1d(
      {perstab::ModelKind::HeatWave1d, {{"nx_heat", 32}, {"nx_wave", 32}}, {}});
  const double abscissa = m.at("abscissa").get<double>();
  CHECK(abscissa < 0.0);
  CHECK(abscissa == doctest::Approx(oracle::abscissa(g.matrix())).epsilon(1e-6));
  CHECK(m.at("dim") == 96);
  CHECK(m.at("stability").at("classification") == "polynomial");
}

TEST_CASE("malformed JSON reports line and column") {
  Sandbox sb;
  sb.file("bad.json", "{\n  \"kind\": \"diagonal\",\n  \"parameters\": {,}\n}");
  CHECK(sb.run("model bad.json") == 2);
  CHECK(sb.err.find("bad.json:3:18") != std::string::npos);
}

TEST_CASE("distinct exit codes for distinct failures") {
  Sandbox sb;
  CHECK(sb.run("model missing.json") == 12);
  sb.file("sponge.json", R"({"kind": "sponge"})");
  CHECK(sb.run("model sponge.json") == 3);
  sb.file("spec.json", kUniform);
  sb.file("short.json", R"({"period": 1, "modes": [{"n": 0, "re": [1, 2]}]})");
  CHECK(sb.run("solve spec.json short.json") == 4);
  sb.file("sing.json", R"({"kind": "diagonal", "parameters": {"eigenvalues": [0, -1], "invertible": false}})");
  CHECK(sb.run("probe sing.json --decay") == 5);
  sb.file("osc.json", kOscillator);
  CHECK(sb.run("probe osc.json --resolvent --grid linear --lo 0 --hi 2 --points 3") == 0);
  CHECK(sb.run("probe spec.json") == 1);
  CHECK(sb.run("--threads 0 model spec.json") == 1);
  CHECK(sb.run("frobnicate") == 1);
}

TEST_CASE("probe: resolvent of diagonal {-1} follows 1/dist") {
  Sandbox sb;
  sb.file("spec.json", kScalar);
  REQUIRE(sb.run("--out out probe spec.json --resolvent --grid linear --lo 0 --hi 2 --points 21") == 0);
  std::istringstream csv(slurp(sb.path("out/resolvent.csv")));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "s,norm");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto comma = line.find(',');
    const double s = std::stod(line.substr(0, comma));
    const double v = std::stod(line.substr(comma + 1));
    CHECK(v == doctest::Approx(1.0 / std::hypot(1.0, s)).epsilon(1e-14));
    ++rows;
  }
  CHECK(rows == 21);
  const json fit = sb.read_json("out/fit.json");
  CHECK(fit.at("probe") == "resolvent");
}

TEST_CASE("probe: decay of the oscillator is constant, classified conservative") {
  Sandbox sb;
  sb.file("spec.json", kOscillator);
  REQUIRE(sb.run("--out out probe spec.json --decay") == 0);
  std::istringstream csv(slurp(sb.path("out/decay.csv")));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    CHECK(std::stod(line.substr(line.find(',') + 1)) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(sb.read_json("out/fit.json").at("stability").at("classification") == "conservative");
}

TEST_CASE("probe: heat-wave default window gives a positive exponent") {
  Sandbox sb;
  sb.file("spec.json", kHeatWave);
  REQUIRE(sb.run("--out out --threads 4 probe spec.json --resolvent") == 0);
  const json fit = sb.read_json("out/fit.json");
  CHECK(fit.at("fit").at("exponent").get<double>() > 0.3);
}

TEST_CASE("probe: Borichev-Tomilov report") {
  Sandbox sb;
  sb.file("spec.json", R"({"kind": "weakly_damped_chain", "parameters": {"n": 16}})");
  REQUIRE(sb.run("--out out --threads 4 probe spec.json --resolvent --bt --time-lo 30 --time-hi 1000") == 0);
  const json bt = sb.read_json("out/bt.json");
  CHECK(bt.at("pass") == true);
  CHECK(std::abs(bt.at("product").get<double>() - 1.0) <= 0.25);
}

TEST_CASE("solve: zero forcing gives zero and ratio 0") {
  Sandbox sb;
  sb.file("spec.json", kUniform);
  sb.file("zero.json", R"({"period": 2, "modes": [{"n": 0, "re": [0, 0, 0]}, {"n": 1, "re": [0, 0, 0]},
                                                 {"n": -1, "re": [0, 0, 0]}]})");
  REQUIRE(sb.run("--out out solve spec.json zero.json --alpha 0.5") == 0);
  const json s = sb.read_json("out/solution.json");
  CHECK(s.at("loss_ratio").get<double>() == 0.0);
  for (const auto& m : s.at("modes")) {
    for (const auto& v : m.at("re")) CHECK(v.get<double>() == 0.0);
    for (const auto& v : m.at("im")) CHECK(v.get<double>() == 0.0);
  }
  CHECK(s.at("real") == true);
}

TEST_CASE("solve: lattice resonance names the modes") {
  Sandbox sb;
  sb.file("spec.json", kOscillator);
  sb.file("f.json", R"({"period": 6.283185307179586, "modes": [{"n": 1, "re": [0, 0.5]}, {"n": -1, "re": [0, 0.5]}]})");
  CHECK(sb.run("--out out solve spec.json f.json") == 7);
  CHECK(sb.err.find("LatticeResonance") != std::string::npos);
  CHECK(sb.err.find("-1,1") != std::string::npos);
  CHECK_FALSE(fs::exists(sb.path("out/solution.json")));
}

TEST_CASE("solve: random forcing needs a seed and reruns are byte-identical") {
  Sandbox sb;
  sb.file("spec.json", kHeatWave);
  sb.file("f.json", R"({"period": 2, "random": {"n_max": 16}})");
  CHECK(sb.run("--out a solve spec.json f.json") == 1);
  CHECK(sb.err.find("--seed") != std::string::npos);
  REQUIRE(sb.run("--out a --seed 11 solve spec.json f.json") == 0);
  REQUIRE(sb.run("--out b --seed 11 --threads 3 solve spec.json f.json") == 0);
  const json ma = sb.read_json("a/manifest.json"), mb = sb.read_json("b/manifest.json");
  CHECK(ma.at("outputs") == mb.at("outputs"));
  CHECK(ma.at("outputs").size() == 2);
  for (const auto& o : ma.at("outputs")) {
    CHECK(o.at("sha256") == sha256_hex(slurp(sb.path("a/" + o.at("file").get<std::string>()))));
  }
  CHECK(ma.at("seed") == 11);
  CHECK(ma.at("inputs").size() == 2);
  for (const auto& e : fs::directory_iterator(sb.path("a"))) CHECK(e.path().extension() != ".tmp");

  REQUIRE(sb.run("--out c --seed 12 solve spec.json f.json") == 0);
  CHECK(sb.read_json("c/manifest.json").at("outputs") != ma.at("outputs"));
}

TEST_CASE("solve: series CSV has full precision and one row per sample") {
  Sandbox sb;
  sb.file("spec.json", kScalar);
  sb.file("f.json", R"({"period": 1, "modes": [{"n": 0, "re": [0.1]}]})");
  REQUIRE(sb.run("--out out solve spec.json f.json --samples 4") == 0);
  CHECK(slurp(sb.path("out/series.csv")) ==
        "t,component_0\n0,0.10000000000000001\n0.25,0.10000000000000001\n0.5,0.10000000000000001\n"
        "0.75,0.10000000000000001\n");
}

TEST_CASE("verify: seed required, uniform ratios bounded, deterministic") {
  Sandbox sb;
  sb.file("spec.json", kUniform);
  CHECK(sb.run("--out a verify spec.json --alpha 0 --trials 20 --n-max 16") == 1);
  REQUIRE(sb.run("--out a --seed 4 verify spec.json --alpha 0 --m 1 --trials 20 --n-max 16") == 0);
  const json c = sb.read_json("a/certificate.json");
  CHECK(c.at("ratios").size() == 20);
  for (const auto& r : c.at("ratios")) CHECK(r.get<double>() <= 1.0 + 1e-12);
  REQUIRE(sb.run("--out b --seed 4 --threads 2 verify spec.json --alpha 0 --m 1 --trials 20 --n-max 16") == 0);
  CHECK(slurp(sb.path("a/certificate.json")) == slurp(sb.path("b/certificate.json")));
}

TEST_CASE("march: scalar contraction per period") {
  Sandbox sb;
  sb.file("spec.json", kScalar);
  sb.file("f.json", R"({"period": 6.283185307179586, "modes": [{"n": 0, "re": [1]},
      {"n": 1, "re": [0.25], "im": [0.25]}, {"n": -1, "re": [0.25], "im": [-0.25]}]})");
  sb.file("u0.json", "[3]");
  REQUIRE(sb.run("--out out march spec.json f.json --u0 u0.json --periods 2") == 0);
  const json c = sb.read_json("out/convergence.json");
  CHECK(c.at("contraction").get<double>() == doctest::Approx(std::exp(-2.0 * M_PI)).epsilon(0.05));
  CHECK(c.at("verdict") == "converged");
  CHECK(slurp(sb.path("out/gaps.csv")).rfind("period,t,gap\n0,0,", 0) == 0);

  CHECK(sb.run("--out out march spec.json f.json --u0 random") == 1);
  REQUIRE(sb.run("--out r --seed 2 march spec.json f.json --u0 random --periods 2") == 0);
  sb.file("long.json", "[1, 2]");
  CHECK(sb.run("--out out march spec.json f.json --u0 long.json") == 4);
}

TEST_CASE("march: a step larger than the forced modes allow") {
  Sandbox sb;
  sb.file("spec.json", kScalar);
  sb.file("f.json", R"({"period": 1, "modes": [{"n": 5, "re": [1]}, {"n": -5, "re": [1]}]})");
  CHECK(sb.run("--out out march spec.json f.json --dt 0.05 --periods 1") == 9);
}
