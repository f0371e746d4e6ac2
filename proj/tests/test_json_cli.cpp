#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "secmux/json_io.hpp"
#include "test_util.hpp"

using namespace secmux;
namespace fs = std::filesystem;

TEST_CASE("channel json forms", "[io]") {
  const Channel inline_ch = channel_from_json(json::parse(
      R"({"inputs": 2, "outputs": 2, "rows": [[0.9, 0.1], [0.1, 0.9]]})"));
  CHECK(inline_ch.at(0, 1) == Approx(0.1));

  const Channel named = channel_from_json(json::parse(R"({"type": "bsc", "p": 0.2})"));
  CHECK(named.at(0, 1) == Approx(0.2));
  CHECK(channel_from_json(json::parse(R"({"type": "bec", "eps": 0.5})")).outputs() == 3);
  CHECK(channel_from_json(json::parse(R"({"type": "identity", "size": 3})")).is_identity());

  ChannelTable table{{"eve", json::parse(R"({"type": "bsc", "p": 0.3})")}};
  CHECK(channel_from_json(json("eve"), table).at(0, 1) == Approx(0.3));
  CHECK_THROWS_AS(channel_from_json(json("bob"), table), std::invalid_argument);

  // unknown fields are rejected
  CHECK_THROWS_AS(channel_from_json(json::parse(R"({"type": "bsc", "p": 0.1, "x": 1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      channel_from_json(json::parse(R"({"inputs": 1, "outputs": 2, "rows": [[1.0]]})")),
      std::invalid_argument);

  Rng rng(3);
  const Channel c = testutil::random_channel(rng, 3, 4);
  const Channel round = channel_from_json(channel_to_json(c));
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t z = 0; z < 4; ++z) CHECK(round.at(x, z) == c.at(x, z));
  }
}

TEST_CASE("family json roundtrip", "[io]") {
  const HashFamily full = family_from_json(
      json::parse(R"({"kind": "bijective-linear", "q": 2, "dims": [1, 1, 1]})"));
  CHECK(full.kind() == FamilyKind::bijective_linear);
  CHECK(!full.has_explicit_members());
  CHECK(full.layout().space_size() == 8);

  const HashFamily perms = family_from_json(
      json::parse(R"({"kind": "all-permutations", "q": 3, "dims": [1, 1]})"));
  CHECK(perms.kind() == FamilyKind::all_permutations);

  const HashFamily members = family_from_json(json::parse(
      R"({"kind": "bijective-linear", "q": 2, "dims": [1, 1], "members": [[1,0,0,1],[1,1,0,1]]})"));
  REQUIRE(members.has_explicit_members());
  CHECK(members.explicit_members().size() == 2);
  const HashFamily round = family_from_json(family_to_json(members));
  CHECK(round.explicit_members() == members.explicit_members());

  CHECK_THROWS_AS(family_from_json(json::parse(
                      R"({"kind": "bijective-linear", "q": 2, "dims": [1, 1], "members": [[1,0,0,0]]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"kind": "magic", "q": 2, "dims": [1]})")),
                  std::invalid_argument);
}

TEST_CASE("rate tuple json", "[io]") {
  const RateTuple rates = rates_from_json(json::parse(
      R"({"r0": 0.1, "r": [0.2, 0.3], "re": {"1": 0.1, "2": 0.15, "1,2": 0.2}})"));
  CHECK(rates.r0 == 0.1);
  CHECK(rates.r.size() == 2);
  CHECK(rates.re.at({1, 2}) == 0.2);
}

TEST_CASE("simulation config json", "[io]") {
  const auto run = simulation_run_from_json(json::parse(R"({
    "layout": {"q": 2, "dims": [1, 1]},
    "n": 2,
    "p_u": [1.0],
    "v_given_u": {"inputs": 1, "outputs": 2, "rows": [[0.5, 0.5]]},
    "x_given_v": {"type": "identity", "size": 2},
    "bob": {"type": "bsc", "p": 0.1},
    "eve": "eve_channel",
    "channels": {"eve_channel": {"type": "bsc", "p": 0.2}},
    "family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1]},
    "codebook_seeds": [1, 2, 3],
    "rho_grid": [0.25, 0.5, 1.0]
  })"));
  CHECK(run.setup.n == 2);
  CHECK(run.codebook_seeds.size() == 3);
  CHECK(run.family.has_value());
  CHECK(run.rho_grid.size() == 3);
  CHECK_THROWS_AS(simulation_run_from_json(json::parse(R"({"bogus": 1})")),
                  std::invalid_argument);
}

TEST_CASE("format_sig emits 12 significant digits with dot separator", "[io]") {
  CHECK(format_sig(0.1234567890123456) == "0.123456789012");
  CHECK(format_sig(1.0) == "1");
  CHECK(format_sig(-0.5) == "-0.5");
}

TEST_CASE("atomic write replaces the target", "[io]") {
  const fs::path dir = fs::temp_directory_path() / "secmux_io_test";
  fs::create_directories(dir);
  const fs::path target = dir / "out.json";
  write_atomic(target, "first");
  write_atomic(target, "second");
  std::ifstream in(target);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "second");
  CHECK(!fs::exists(target.string() + ".tmp"));
  fs::remove_all(dir);
}

// --- CLI process tests -----------------------------------------------------

namespace {

struct CliRun {
  int exit_code = 0;
  std::string out_file;
};

fs::path test_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "secmux_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SECMUX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli hash verify exit codes", "[cli]") {
  const fs::path dir = test_dir();
  write_file(dir / "linear.json",
             R"({"family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1, 1]}})");
  CHECK(run_cli("hash verify --config " + (dir / "linear.json").string()) == 0);

  write_file(dir / "identity_only.json",
             R"({"family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1],
                 "members": [[1, 0, 0, 1]]}})");
  CHECK(run_cli("hash verify --config " + (dir / "identity_only.json").string()) == 1);

  write_file(dir / "broken.json", R"({"family": {"kind": )");
  CHECK(run_cli("hash verify --config " + (dir / "broken.json").string()) == 2);
  CHECK(run_cli("hash verify --config " + (dir / "missing.json").string()) == 2);
}

TEST_CASE("cli pa check exit codes", "[cli]") {
  const fs::path dir = test_dir();
  write_file(dir / "pa.json", R"({
    "family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1]},
    "eve": {"inputs": 4, "outputs": 2, "rows": [[1,0],[1,0],[0,1],[0,1]]},
    "rho": [0.1, 0.5, 1.0]
  })");
  CHECK(run_cli("pa check --config " + (dir / "pa.json").string()) == 0);

  write_file(dir / "pa_bad_rho.json", R"({
    "family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1]},
    "eve": {"type": "identity", "size": 4},
    "rho": [1.5]
  })");
  CHECK(run_cli("pa check --config " + (dir / "pa_bad_rho.json").string()) == 2);
}

TEST_CASE("cli psi and phi agree with the library", "[cli]") {
  const fs::path dir = test_dir();
  write_file(dir / "psi.json",
             R"({"rho": 0.5, "channel": {"type": "bsc", "p": 0.1}, "prior": [0.5, 0.5]})");
  const fs::path out = dir / "psi_out.json";
  CHECK(run_cli("psi --config " + (dir / "psi.json").string() + " --out " + out.string()) == 0);
  const json parsed = json::parse(read_file(out));
  CHECK(parsed.at("psi").get<double>() ==
        Approx(psi(0.5, Channel::bsc(0.1), Distribution::uniform(2))).margin(1e-12));

  const fs::path out_bits = dir / "psi_bits.json";
  CHECK(run_cli("psi --config " + (dir / "psi.json").string() + " --bits --out " +
                out_bits.string()) == 0);
  const json bits = json::parse(read_file(out_bits));
  CHECK(bits.at("psi").get<double>() ==
        Approx(parsed.at("psi").get<double>() / std::log(2.0)).margin(1e-12));
  CHECK(bits.at("units") == "bits");

  write_file(dir / "phi.json",
             R"({"rho": 0.5, "channel": {"type": "bsc", "p": 0.1}, "prior": [0.5, 0.5]})");
  const fs::path phi_out = dir / "phi_out.json";
  CHECK(run_cli("phi --config " + (dir / "phi.json").string() + " --out " + phi_out.string()) ==
        0);
  CHECK(json::parse(read_file(phi_out)).at("phi").get<double>() ==
        Approx(phi(0.5, Channel::bsc(0.1), Distribution::uniform(2))).margin(1e-12));
}

TEST_CASE("cli region member and scan", "[cli]") {
  const fs::path dir = test_dir();
  write_file(dir / "member.json", R"({
    "region": "bcc",
    "markov": {"p_u": [1.0],
               "v_given_u": {"inputs": 1, "outputs": 2, "rows": [[0.5, 0.5]]},
               "x_given_v": {"type": "identity", "size": 2}},
    "bob": {"type": "bsc", "p": 0.1},
    "eve": {"type": "bsc", "p": 0.2},
    "rates": {"r0": 0.0, "r1": 0.3, "re": 0.17}
  })");
  CHECK(run_cli("region member --config " + (dir / "member.json").string()) == 0);

  write_file(dir / "member_fail.json", R"({
    "region": "bcc",
    "markov": {"p_u": [1.0],
               "v_given_u": {"inputs": 1, "outputs": 2, "rows": [[0.5, 0.5]]},
               "x_given_v": {"type": "identity", "size": 2}},
    "bob": {"type": "bsc", "p": 0.1},
    "eve": {"type": "bsc", "p": 0.2},
    "rates": {"r0": 0.0, "r1": 0.3, "re": 0.18}
  })");
  CHECK(run_cli("region member --config " + (dir / "member_fail.json").string()) == 1);

  write_file(dir / "scan.json", R"({
    "bob": {"type": "bsc", "p": 0.1},
    "eve": {"type": "bsc", "p": 0.2},
    "card_u": 1, "card_v": 2, "resolution": 11
  })");
  const fs::path csv = dir / "scan.csv";
  CHECK(run_cli("region scan --config " + (dir / "scan.json").string() + " --format csv --out " +
                csv.string()) == 0);
  const std::string content = read_file(csv);
  CHECK(content.rfind("index,", 0) == 0);
  CHECK(content.find("re_max") != std::string::npos);

  // the grid contains the identity/uniform corner, so the summary line carries
  // the exact secrecy gap h(0.2) - h(0.1)
  const auto pos = content.find("# best_index=");
  REQUIRE(pos != std::string::npos);
  const auto re_pos = content.find("best_re=", pos);
  REQUIRE(re_pos != std::string::npos);
  const double best_re = std::stod(content.substr(re_pos + 8));
  CHECK(best_re == Approx(0.175319).margin(2e-3));
}

TEST_CASE("cli region scan guard violation exits 3", "[cli]") {
  const fs::path dir = test_dir();
  write_file(dir / "scan_huge.json", R"({
    "bob": {"type": "bsc", "p": 0.1},
    "eve": {"type": "bsc", "p": 0.2},
    "card_u": 4, "card_v": 4, "resolution": 101
  })");
  CHECK(run_cli("region scan --config " + (dir / "scan_huge.json").string()) == 3);
}

TEST_CASE("guard override env raises the budget", "[cli]") {
  const fs::path dir = test_dir();
  // |B| = 9 exceeds the permutation-domain guard of 8
  write_file(dir / "perm9.json",
             R"({"family": {"kind": "all-permutations", "q": 3, "dims": [1, 1]}})");
  CHECK(run_cli("hash verify --config " + (dir / "perm9.json").string()) == 3);
  const std::string env_cmd = "SECMUX_GUARD_OVERRIDE=2 " + std::string(SECMUX_CLI_PATH) +
                              " hash verify --config " + (dir / "perm9.json").string() +
                              " >/dev/null 2>&1";
  const int status = std::system(env_cmd.c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 0);
}

TEST_CASE("cli pa check verbose emits per-member informations", "[cli]") {
  const fs::path dir = test_dir();
  write_file(dir / "pa_verbose.json", R"({
    "family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1]},
    "eve": {"inputs": 4, "outputs": 2, "rows": [[1,0],[1,0],[0,1],[0,1]]},
    "rho": [0.5],
    "verbose": true
  })");
  const fs::path out = dir / "pa_verbose_out.json";
  CHECK(run_cli("pa check --config " + (dir / "pa_verbose.json").string() + " --out " +
                out.string()) == 0);
  const json parsed = json::parse(read_file(out));
  REQUIRE(parsed.at("rows").size() > 0);
  CHECK(parsed.at("rows")[0].at("per_member_mi").size() == 6);
}

TEST_CASE("cli exponent", "[cli]") {
  const fs::path dir = test_dir();
  write_file(dir / "exp.json", R"({
    "rho": 0.5, "r_i": 0.1, "r_p": 0.3,
    "markov": {"p_u": [1.0],
               "v_given_u": {"inputs": 1, "outputs": 2, "rows": [[0.5, 0.5]]},
               "x_given_v": {"type": "identity", "size": 2}},
    "eve": {"type": "bsc", "p": 0.2}
  })");
  const fs::path out = dir / "exp_out.json";
  CHECK(run_cli("exponent --config " + (dir / "exp.json").string() + " --out " + out.string()) ==
        0);
  const json parsed = json::parse(read_file(out));
  const double expected =
      0.5 * (0.1 - 0.3) + psi(0.5, Channel::bsc(0.2), Distribution::uniform(2));
  CHECK(parsed.at("value").get<double>() == Approx(expected).margin(1e-12));

  write_file(dir / "exp_opt.json", R"({
    "r_i": 0.1, "r_p": 0.4,
    "markov": {"p_u": [1.0],
               "v_given_u": {"inputs": 1, "outputs": 2, "rows": [[0.5, 0.5]]},
               "x_given_v": {"type": "identity", "size": 2}},
    "eve": {"type": "bsc", "p": 0.2}
  })");
  CHECK(run_cli("exponent --config " + (dir / "exp_opt.json").string()) == 0);
}

TEST_CASE("cli simulate runs and reports", "[cli]") {
  const fs::path dir = test_dir();
  write_file(dir / "sim.json", R"({
    "layout": {"q": 2, "dims": [1, 1]},
    "n": 2,
    "p_u": [1.0],
    "v_given_u": {"inputs": 1, "outputs": 2, "rows": [[0.5, 0.5]]},
    "x_given_v": {"type": "identity", "size": 2},
    "bob": {"type": "bsc", "p": 0.1},
    "eve": {"type": "bsc", "p": 0.2},
    "family": {"kind": "bijective-linear", "q": 2, "dims": [1, 1]},
    "codebook_seeds": [1, 2, 3],
    "rho_grid": [0.25, 0.5, 1.0]
  })");
  const fs::path out = dir / "sim_out.json";
  CHECK(run_cli("simulate --config " + (dir / "sim.json").string() + " --out " + out.string()) ==
        0);
  const json parsed = json::parse(read_file(out));
  CHECK(parsed.at("existence").at("found").get<bool>());
  CHECK(parsed.at("num_f").get<int>() == 6);
  CHECK(parsed.at("best_pair_error") == parsed.at("best_pair_multiplex_error"));
}

TEST_CASE("cli reruns are byte-identical", "[cli]") {
  const fs::path dir = test_dir();
  // every command, rerun with the same config and seed, must reproduce exactly
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"hash verify", (dir / "linear.json").string()},
      {"pa check", (dir / "pa.json").string()},
      {"psi", (dir / "psi.json").string()},
      {"phi", (dir / "phi.json").string()},
      {"region member", (dir / "member.json").string()},
      {"region scan", (dir / "scan.json").string()},
      {"exponent", (dir / "exp.json").string()},
      {"simulate", (dir / "sim.json").string()},
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& [cmd, config] = cases[i];
    REQUIRE(fs::exists(config));  // written by the earlier cases in this suite
    for (const std::string format : {"json", "csv"}) {
      const fs::path out1 = dir / ("det1_" + std::to_string(i) + "." + format);
      const fs::path out2 = dir / ("det2_" + std::to_string(i) + "." + format);
      CHECK(run_cli(cmd + " --config " + config + " --seed 7 --format " + format + " --out " +
                    out1.string()) == 0);
      CHECK(run_cli(cmd + " --config " + config + " --seed 7 --format " + format + " --out " +
                    out2.string()) == 0);
      CHECK(read_file(out1) == read_file(out2));
    }
  }
}
