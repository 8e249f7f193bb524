// idvsel: campaigns, oracles, incentive checks and acceptance suites for
// online selection with interdependent values.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "idv/error.hpp"
#include "idv/harness.hpp"
#include "idv/mechanisms.hpp"
#include "idv/oracles.hpp"
#include "idv/serialization.hpp"
#include "idv/suites.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct InstanceArgs {
  std::string file;
  idv::GeneratorSpec gen;
  std::string temporality;

  void add(CLI::App* app, bool positional_name) {
    if (positional_name) {
      app->add_option("name", gen.name,
                      "thm31 | prop32 | counterexample | own_signal | single_max | random")
          ->required();
    } else {
      app->add_option("--instance", file, "instance JSON file");
      app->add_option("--gen", gen.name, "named generator instead of a file");
    }
    app->add_option("--n", gen.n, "number of agents");
    app->add_option("--eps", gen.eps, "counterexample: probability of the large signal");
    app->add_option("--signals", gen.signals, "own_signal: the fixed signals")->delimiter(',');
    app->add_option("--distinct", gen.distinct, "single_max: positive agents before padding");
    app->add_option("--family", gen.family, "random: subadditive | submodular | own_signal");
    app->add_option("--model", gen.model, "random: prophet | secretary");
    app->add_option("--gen-seed", gen.seed, "random: suite seed");
    app->add_option("--index", gen.index, "random: member of the suite");
    app->add_option("--temporality", temporality, "myopic | farsighted");
  }

  idv::Instance build() {
    if (!temporality.empty()) gen.temporality = idv::parse_temporality(temporality);
    if (gen.name == "own_signal") gen.n = gen.signals.size();
    if (!file.empty() && !gen.name.empty()) {
      throw idv::InvalidInput("give either --instance or --gen, not both");
    }
    if (!file.empty()) {
      auto inst = idv::load_instance(file);
      if (gen.temporality) inst = inst.with_temporality(*gen.temporality);
      return inst;
    }
    if (gen.name.empty()) throw idv::InvalidInput("an instance is required (--instance or --gen)");
    return idv::generate_instance(gen);
  }
};

void emit(const idv::Json& j, const std::string& out_dir, const std::string& file_name) {
  if (out_dir.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / file_name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  os << j.dump(2) << '\n';
}

idv::Policy policy_for(const idv::Instance& inst, const std::string& rule,
                       std::optional<double> threshold, std::size_t fixed_index) {
  idv::Policy p;
  p.rule = idv::parse_rule(rule);
  p.fixed_index = fixed_index;
  if (threshold) {
    p.threshold = idv::Threshold(*threshold);
  } else if (idv::needs_threshold(p.rule)) {
    p.threshold = idv::Threshold(idv::exact_opt(inst).value / 2.0);
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online selection with interdependent values"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::optional<std::size_t> trials;
  std::size_t workers = 1;
  std::string out_dir;
  std::string format = "json";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--trials", trials, "Monte Carlo trials");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  };

  // run
  auto* run = app.add_subcommand("run", "Monte Carlo campaign from a config file");
  std::string config_path;
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  add_common(run);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact E[OPT] and E[ALG] by enumeration");
  InstanceArgs oracle_inst;
  oracle_inst.add(oracle, false);
  std::string oracle_rule;
  std::optional<double> oracle_x;
  std::size_t oracle_index = 0;
  oracle->add_option("--rule", oracle_rule, "algo1 | mech2 | algo3 | mech4 | algo5 | naive | fixed");
  oracle->add_option("--threshold", oracle_x, "X for threshold rules (default: exact E[OPT]/2)");
  oracle->add_option("--fixed-index", oracle_index, "arrival time for the fixed rule");
  add_common(oracle);

  // epic
  auto* epic = app.add_subcommand("epic", "exhaustive ex-post incentive check");
  InstanceArgs epic_inst;
  epic_inst.add(epic, false);
  std::string epic_rule;
  std::string epic_payment;
  std::optional<double> epic_x;
  bool refine = false;
  epic->add_option("--rule", epic_rule, "stopping rule")->required();
  epic->add_option("--payment", epic_payment, "payment rule")->required();
  epic->add_option("--threshold", epic_x, "X for threshold rules (default: exact E[OPT]/2)");
  epic->add_flag("--refine", refine, "also try reports next to allocation flips");
  add_common(epic);

  // suite
  auto* suite = app.add_subcommand("suite", "acceptance suites");
  std::string suite_id = "all";
  suite->add_option("id", suite_id, "suite id")->check(CLI::IsMember(idv::suite_ids()));
  add_common(suite);

  // gen
  auto* gen = app.add_subcommand("gen", "write a named instance as JSON");
  InstanceArgs gen_inst;
  gen_inst.add(gen, true);
  add_common(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*run) {
      auto cfg = idv::load_config(config_path);
      cfg.seed = run->count("--seed") ? seed : cfg.seed;
      if (trials) cfg.trials = *trials;
      if (run->count("--workers")) cfg.workers = workers;
      if (!out_dir.empty()) {
        cfg.csv_out = std::filesystem::path(out_dir) / "trials.csv";
        cfg.json_out = std::filesystem::path(out_dir) / "summary.json";
      }
      cfg.validate();
      cfg.keep_records = out_dir.empty() && format == "csv";
      const auto result = idv::run_campaign(cfg);
      if (out_dir.empty()) {
        if (format == "csv") idv::write_csv(std::cout, result.records);
        else std::cout << idv::to_json(result).dump(2) << '\n';
      }
      return kExitPass;
    }
    if (*oracle) {
      const auto inst = oracle_inst.build();
      idv::Json j{{"instance_hash", idv::instance_hash(inst)}};
      const auto opt = idv::exact_opt(inst, workers);
      j["opt"] = {{"value", opt.value}, {"atoms", opt.atoms}, {"is_exact", opt.is_exact}};
      if (!oracle_rule.empty()) {
        const auto p = policy_for(inst, oracle_rule, oracle_x, oracle_index);
        const auto alg = idv::exact_alg(p, inst, workers);
        j["policy"] = p.name();
        j["alg"] = {{"value", alg.value},
                    {"myopic_welfare", alg.myopic_welfare},
                    {"farsighted_welfare", alg.farsighted_welfare},
                    {"payment", alg.payment},
                    {"atoms", alg.atoms},
                    {"is_exact", alg.is_exact}};
        j["ratio"] = alg.value > 0.0 ? idv::Json(opt.value / alg.value) : idv::Json();
      }
      emit(j, out_dir, "oracle.json");
      return kExitPass;
    }
    if (*epic) {
      const auto inst = epic_inst.build();
      idv::Mechanism m{policy_for(inst, epic_rule, epic_x, 0),
                       idv::parse_payment_rule(epic_payment)};
      idv::EpicOptions opts;
      opts.refine = refine;
      const auto report = idv::epic_check(m, inst, opts);
      emit(idv::to_json(report), out_dir, "epic.json");
      return report.passed ? kExitPass : kExitFail;
    }
    if (*suite) {
      idv::SuiteOptions opts;
      opts.seed = suite->count("--seed") ? seed : opts.seed;
      opts.workers = workers;
      const auto report = idv::acceptance_suite(suite_id, opts);
      if (format == "json" && !out_dir.empty()) {
        emit(idv::to_json(report), out_dir, "suite.json");
      } else if (format == "json" && suite->count("--format")) {
        std::cout << idv::to_json(report).dump(2) << '\n';
      } else {
        for (const auto& c : report.criteria) std::cout << idv::format_line(c) << '\n';
      }
      return report.passed() ? kExitPass : kExitFail;
    }
    if (*gen) {
      const auto inst = gen_inst.build();
      emit(idv::to_json(inst), out_dir, gen_inst.gen.name + ".json");
      return kExitPass;
    }
  } catch (const idv::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
