#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "gkex/errors.hpp"
#include "gkex/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

gkex::Digest resolve_mask(const std::string &spec, std::uint64_t seed) {
  if (spec == "random") {
    // Deterministic in the master seed so the scenario echo replays exactly.
    gkex::Bytes input = gkex::to_bytes("gkex-rmask");
    for (int i = 7; i >= 0; --i) input.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
    return gkex::sha256_bytes(input);
  }
  gkex::Digest mask;
  try {
    mask = gkex::from_hex(spec);
  } catch (const std::exception &) {
    mask.clear();
  }
  if (mask.size() != gkex::kDigestBytes) {
    // A malformed mask is a usage error, same as any other bad flag value.
    throw gkex::Error(gkex::ErrorCode::InvalidScenario,
                      "rmask must be " + std::to_string(gkex::kDigestBytes) +
                          " bytes of hex or 'random'");
  }
  return mask;
}

int cmd_run(const gkex::Scenario &scenario, const std::string &out_path) {
  gkex::Transcript t = gkex::run_scenario(scenario);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << gkex::serialize_transcript(t);
  }
  std::string expected = gkex::expected_classification(scenario);
  std::cout << "classification: " << t.classification << " (expected " << expected << ")\n";
  for (const auto &[id, outc] : t.outcomes) {
    std::cout << "  " << id << ": " << outc.phase;
    if (outc.abort_reason) std::cout << " [" << *outc.abort_reason << "]";
    if (outc.group_key_fp) std::cout << " key " << outc.group_key_fp->substr(0, 16);
    if (outc.sub_phase) {
      std::cout << " | subgroup " << *outc.sub_phase;
      if (outc.sub_abort_reason) std::cout << " [" << *outc.sub_abort_reason << "]";
      if (outc.subgroup_key_fp) std::cout << " key " << outc.subgroup_key_fp->substr(0, 16);
    }
    std::cout << "\n";
  }
  return t.classification == expected ? kExitOk : kExitFailure;
}

int cmd_verify(const std::string &path) {
  gkex::Transcript t = gkex::parse_transcript(read_file(path));
  gkex::VerifyResult res = gkex::verify_transcript(t);
  if (res.ok) {
    std::cout << "ok: all signatures valid, XOR-sum checks pass\n";
    return kExitOk;
  }
  for (const auto &d : res.diagnostics) std::cout << "fail: " << d << "\n";
  return kExitFailure;
}

int cmd_classify(const std::string &path) {
  gkex::Transcript t = gkex::parse_transcript(read_file(path));
  gkex::OutcomeReport report = gkex::check_agreement(t);
  std::cout << report.classification << "\n";
  std::cout << report.evidence.dump(2) << "\n";
  return report.classification == gkex::expected_classification(t.scenario) ? kExitOk
                                                                            : kExitFailure;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Group key exchange laboratory: mBD+P / mBD+S, the two-insider "
               "key-splitting attack, and the key-confirmation countermeasure"};
  app.require_subcommand(1);

  std::string protocol = "mbd-p", group = "toy", rmask = "random", out_path;
  std::size_t n = 5, victim = 1;
  std::uint64_t seed = 0;
  std::vector<std::size_t> subgroup;
  bool attack = false;

  auto *run = app.add_subcommand("run", "Run a scenario and write its transcript");
  run->add_option("--protocol", protocol, "mbd-p|mbd-s|mbd-p-kc|mbd-s-kc")
      ->check(CLI::IsMember({"mbd-p", "mbd-s", "mbd-p-kc", "mbd-s-kc"}));
  run->add_option("--n", n, "number of parties")->required();
  run->add_option("--subgroup", subgroup, "subgroup member indices, 1-based")->delimiter(',');
  run->add_flag("--attack", attack, "mount the two-insider attack");
  run->add_option("--victim", victim, "victim index, 1-based, within the attacked stage");
  run->add_option("--rmask", rmask, "insider XOR mask: hex digest or 'random'");
  run->add_option("--group", group, "group preset")->check(CLI::IsMember({"toy", "modp-2048"}));
  run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out_path, "transcript output path");

  std::string verify_path, classify_path;
  auto *verify = app.add_subcommand("verify", "Re-check all signatures and XOR sums");
  verify->add_option("transcript", verify_path, "transcript path")->required();
  auto *classify = app.add_subcommand("classify", "Classify a transcript's outcome");
  classify->add_option("transcript", classify_path, "transcript path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) {
      gkex::Scenario s;
      s.protocol = protocol;
      s.n = n;
      s.subgroup = subgroup;
      s.group_preset = group;
      s.seed = seed;
      if (attack) s.attack = gkex::AttackSpec{victim, resolve_mask(rmask, seed)};
      return cmd_run(s, out_path);
    }
    if (verify->parsed()) return cmd_verify(verify_path);
    if (classify->parsed()) return cmd_classify(classify_path);
  } catch (const gkex::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == gkex::ErrorCode::InvalidScenario ? kExitUsage : kExitFailure;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
