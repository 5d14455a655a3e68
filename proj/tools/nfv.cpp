#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "nfv/bribery/solve.hpp"
#include "nfv/bribery/specialize.hpp"
#include "nfv/core/solver.hpp"
#include "nfv/election/json_io.hpp"
#include "nfv/election/random.hpp"
#include "nfv/extended.hpp"
#include "nfv/oracle/brute.hpp"
#include "nfv/reductions/reductions.hpp"

namespace {

using namespace nfv;

enum Exit { kOk = 0, kMismatch = 1, kNoSolution = 2, kMalformed = 3, kResource = 4, kInternal = 5 };

std::string read_input(const std::string &path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  ss << in.rdbuf();
  return ss.str();
}

std::string first_token(const std::string &text) {
  std::istringstream is(text);
  std::string tok;
  is >> tok;
  return tok;
}

struct ElectionArgs {
  std::string path;
  std::string rule;
  std::string model;
  std::string problem = "multi";
};

struct Instance {
  vote::Election election;
  vote::Rule rule;
  vote::WinnerModel model;
};

Instance load_instance(const ElectionArgs &a, const std::string &text) {
  vote::Election e = vote::parse_election(text);
  auto problem = bribery::parse_problem(a.problem);
  bool rule_free = problem == bribery::Problem::Dodgson || problem == bribery::Problem::Young;
  if (a.rule.empty() && !rule_free)
    throw InputError("--rule is required");
  vote::Rule rule = rule_free ? vote::Rule::of(vote::RuleKind::Condorcet, "condorcet")
                              : vote::rule_from_name(a.rule, e.m());
  auto special = bribery::specialize(problem, e, rule);
  std::optional<vote::WinnerModel> requested;
  if (!a.model.empty())
    requested = vote::parse_winner_model(a.model);
  auto model = bribery::effective_model(special.election, special.rule, requested);
  return {std::move(special.election), std::move(special.rule), model};
}

std::string describe_actions(const vote::Election &e, const vote::ActionSet &acts) {
  std::ostringstream os;
  bool any = false;
  for (std::size_t k = 0; k < acts.voters.size(); ++k) {
    const auto &a = acts.voters[k];
    if (a.empty())
      continue;
    any = true;
    os << "  voter " << k + 1 << ":";
    if (!a.swaps.empty()) {
      os << " swaps";
      for (auto [x, y] : a.swaps)
        os << " {" << e.candidates[x] << "," << e.candidates[y] << "}";
    }
    if (a.push != 0)
      os << " push " << (a.push > 0 ? "+" : "") << a.push;
    if (a.toggle)
      os << (e.voters[k].active ? " deactivate" : " activate");
    os << "\n";
  }
  if (!any)
    os << "  (none)\n";
  return os.str();
}

void add_election_options(CLI::App *cmd, ElectionArgs &a, bool need_rule) {
  cmd->add_option("election", a.path, "Election JSON file, '-' for stdin")->required();
  auto *rule = cmd->add_option("--rule", a.rule, std::string("Voting rule: ") + vote::rule_vocabulary());
  if (need_rule)
    rule->required();
  cmd->add_option("--winner-model", a.model, "unique or cowinner (default: per rule)")
      ->check(CLI::IsMember({"unique", "cowinner"}));
  cmd->add_option("--problem", a.problem,
                  "Bribery problem: multi, swap, shift, support, mixed, dollar, manipulation, "
                  "ccav, ccdv, extension, possible-winner, dodgson, young");
}

int solve_program_text(const std::string &text) {
  StandardNFoldProgram p;
  std::optional<ext::RewriteResult> rr;
  if (first_token(text).rfind("(extended", 0) == 0) {
    rr = ext::rewrite(ext::parse_extended(text));
    p = rr->program;
  } else {
    p = from_text(text);
  }
  auto out = solve(p);
  if (is_infeasible(out)) {
    std::cout << "Infeasible\n";
    return kNoSolution;
  }
  if (const auto *u = std::get_if<Unbounded>(&out)) {
    std::cout << "Unbounded\n";
    (void)u;
    return kOk;
  }
  const auto &opt = std::get<Optimal>(out);
  std::cout << "Feasible\nvalue: " << opt.value << "\nassignment:";
  for (Int v : opt.assignment)
    std::cout << ' ' << v;
  std::cout << "\n";
  return kOk;
}

int cmd_solve(const ElectionArgs &a) {
  const std::string text = read_input(a.path);
  const std::string head = first_token(text);
  if (head == "nfold" || head.rfind("(extended", 0) == 0)
    return solve_program_text(text);
  Instance inst = load_instance(a, text);
  bribery::BriberyOptions opt;
  opt.model = inst.model;
  auto res = bribery::solve_multibribery(inst.election, inst.rule, opt);
  std::cout << "rule: " << inst.rule.name << "\nwinner model: " << vote::to_string(res.model)
            << "\nguesses: " << res.log.size() << "\n";
  if (!res.cost) {
    std::cout << "no solution\n";
    return kNoSolution;
  }
  std::cout << "cost: " << *res.cost << "\nguess: " << bribery::describe(*res.guess, inst.election)
            << "\nactions:\n"
            << describe_actions(inst.election, res.actions);
  return kOk;
}

int cmd_oracle_check(const ElectionArgs &a) {
  Instance inst = load_instance(a, read_input(a.path));
  bribery::BriberyOptions opt;
  opt.model = inst.model;
  auto res = bribery::solve_multibribery(inst.election, inst.rule, opt);
  auto ref = oracle::brute_oracle(inst.election, inst.rule, inst.model);
  auto show = [](const std::optional<Int> &c) { return c ? std::to_string(*c) : std::string("none"); };
  std::cout << "solver: " << show(res.cost) << "\noracle: " << show(ref.cost) << "\n";
  if (res.cost != ref.cost) {
    std::cout << "MISMATCH\n";
    return kMismatch;
  }
  std::cout << "match\n";
  return kOk;
}

int cmd_rewrite_dump(const ElectionArgs &a, std::size_t index) {
  Instance inst = load_instance(a, read_input(a.path));
  auto guesses = bribery::enumerate_guesses(inst.election, inst.rule, inst.model);
  if (index >= guesses.size())
    throw InputError("guess index " + std::to_string(index) + " out of range (" +
                     std::to_string(guesses.size()) + " guesses)");
  auto bm = bribery::build_model(inst.election, inst.rule, guesses[index], inst.model);
  auto rr = bribery::rewrite_checked(bm.program);
  write_program(std::cout, rr.program);
  return kOk;
}

int cmd_reduce(const std::string &kind, const std::string &instance) {
  if (kind == "subsetsum") {
    auto inst = reduce::parse_subset_sum(instance);
    write_program(std::cout, reduce::encode_subset_sum(inst.weights, inst.target));
  } else {
    auto inst = reduce::parse_bin_packing(instance);
    auto enc = reduce::encode_bin_packing(inst.items, inst.bins, inst.capacity);
    write_program(std::cout, ext::rewrite(enc.program).program);
  }
  return kOk;
}

int cmd_gen(std::size_t candidates, std::size_t voters, std::uint64_t seed, double truncated) {
  std::mt19937_64 rng(seed);
  vote::RandomElectionOptions opt;
  opt.truncated = truncated;
  std::cout << vote::serialize_election(vote::random_election(rng, candidates, voters, opt));
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Exact n-fold integer programming for multi-bribery in elections"};
  app.require_subcommand(1);

  ElectionArgs solve_args, check_args, dump_args;
  auto *solve_cmd = app.add_subcommand(
      "solve", "Solve a bribery instance (or an nfold / extended program file)");
  add_election_options(solve_cmd, solve_args, false);

  auto *check_cmd = app.add_subcommand("oracle-check", "Compare the solver with the brute-force oracle");
  add_election_options(check_cmd, check_args, false);

  std::size_t guess = 0;
  auto *dump_cmd = app.add_subcommand("rewrite-dump", "Write the standard program of one guess");
  add_election_options(dump_cmd, dump_args, false);
  dump_cmd->add_option("--guess", guess, "Guess index in enumeration order")->required();

  std::string kind, instance;
  auto *reduce_cmd = app.add_subcommand("reduce", "Encode bin packing or subset sum");
  reduce_cmd->add_option("kind", kind, "binpacking ('o1 o2 .. / k B') or subsetsum ('w1 w2 .. / T')")
      ->required()
      ->check(CLI::IsMember({"binpacking", "subsetsum"}));
  reduce_cmd->add_option("instance", instance, "One-line instance")->required();

  std::size_t candidates = 3, voters = 3;
  std::uint64_t seed = 1;
  double truncated = 0.0;
  auto *gen_cmd = app.add_subcommand("gen", "Generate a random election");
  gen_cmd->add_option("--candidates", candidates, "Number of candidates")->check(CLI::Range(1, 64));
  gen_cmd->add_option("--voters", voters, "Number of voters")->check(CLI::Range(0, 10000));
  gen_cmd->add_option("--seed", seed, "Random seed");
  gen_cmd->add_option("--truncated", truncated, "Probability of a top-truncated order")
      ->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kMalformed;
  }

  try {
    if (*solve_cmd)
      return cmd_solve(solve_args);
    if (*check_cmd)
      return cmd_oracle_check(check_args);
    if (*dump_cmd)
      return cmd_rewrite_dump(dump_args, guess);
    if (*reduce_cmd)
      return cmd_reduce(kind, instance);
    if (*gen_cmd)
      return cmd_gen(candidates, voters, seed, truncated);
  } catch (const ParseError &e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return kMalformed;
  } catch (const InputError &e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return kMalformed;
  } catch (const ValidityError &e) {
    std::cerr << "invalid program: " << e.what() << "\n";
    return kMalformed;
  } catch (const ResourceError &e) {
    std::cerr << "resource budget exceeded: " << e.what() << "\n";
    return kResource;
  } catch (const OverflowError &e) {
    std::cerr << "integer overflow: " << e.what() << "\n";
    return kResource;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
