// pmm: simulate pairwise Markov models, decode offline or as a stream with
// committed prefixes, machine-check the sufficient conditions, and run the
// named reproducible experiments.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "pmm/conditions.hpp"
#include "pmm/dp.hpp"
#include "pmm/io.hpp"
#include "pmm/model_zoo.hpp"
#include "pmm/online.hpp"
#include "pmm/recipes.hpp"
#include "pmm/simulate.hpp"

namespace {

// exit codes: 0 ok, 1 zero-likelihood diagnostic, 2 usage/IO, 3 guard
constexpr int kExitDiagnostic = 1;
constexpr int kExitUsage = 2;
constexpr int kExitGuard = 3;

struct OutFile {
  std::ofstream file;
  std::ostream* stream = &std::cout;
  explicit OutFile(const std::string& path) {
    if (path != "-") {
      file.open(path);
      if (!file) throw pmm::UsageError("cannot open output file: " + path);
      stream = &file;
    }
  }
  std::ostream& get() { return *stream; }
};

pmm::ObsSeq read_obs(const std::string& path) {
  if (path == "-") return pmm::read_obs_csv(std::cin);
  std::ifstream in(path);
  if (!in) throw pmm::UsageError("cannot open observation file: " + path);
  return pmm::read_obs_csv(in);
}

int run(int argc, char** argv) {
  CLI::App app{"pairwise Markov model toolkit"};
  app.require_subcommand(1);

  // --- simulate ---
  std::string sim_model, sim_out = "-";
  long long sim_steps = 0;
  std::uint64_t sim_seed = 0;
  auto* sim = app.add_subcommand("simulate", "sample a trajectory");
  sim->add_option("--model", sim_model, "model JSON file")->required();
  sim->add_option("--steps", sim_steps, "number of steps")->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "output CSV path or -");

  // --- decode ---
  std::string dec_model, dec_obs = "-", dec_out = "-", dec_diag, dec_tie = "lex";
  bool dec_online = false, dec_strong = false, dec_exact = false, dec_force = false;
  int dec_order = 0;
  std::optional<int> dec_sep;
  std::optional<long long> dec_maxbuf;
  auto* dec = app.add_subcommand("decode", "best-path decoding (offline or streaming)");
  dec->add_option("--model", dec_model, "model JSON file")->required();
  dec->add_option("--obs", dec_obs, "observation CSV path or - for stdin");
  dec->add_option("--tie", dec_tie, "tie rule: lex or colex")
      ->check(CLI::IsMember({"lex", "colex"}));
  dec->add_option("--out", dec_out, "decode CSV path or -");
  dec->add_option("--diag", dec_diag, "diagnostics JSON path (default stderr)");
  dec->add_flag("--exact", dec_exact, "exact-rational arithmetic (discrete models)");
  dec->add_flag("--online", dec_online, "streaming mode with committed prefixes");
  dec->add_option("--order", dec_order, "node order r scanned by the stream")
      ->check(CLI::NonNegativeNumber);
  dec->add_option("--sep", dec_sep, "minimum gap between commits (default: order)");
  dec->add_flag("--strong", dec_strong, "commit only on strong nodes");
  dec->add_option("--max-buffer", dec_maxbuf, "buffered observation cap");
  dec->add_flag("--force-commit", dec_force, "on overflow, force a best-effort commit");

  // --- check ---
  std::string chk_model, chk_which = "all", chk_out = "-";
  bool chk_strict = false;
  auto* chk = app.add_subcommand("check", "machine-check the sufficient conditions");
  chk->add_option("--model", chk_model, "model JSON file")->required();
  chk->add_option("--which", chk_which, "hmm, discrete, glm, or all")
      ->check(CLI::IsMember({"hmm", "discrete", "glm", "all"}));
  chk->add_flag("--strict-exit", chk_strict, "exit nonzero unless the overall check passes");
  chk->add_option("--out", chk_out, "report JSON path or -");

  // --- experiment ---
  std::string exp_name, exp_out = "-";
  std::uint64_t exp_seed = 0;
  long long exp_steps = 0;
  auto* exp = app.add_subcommand("experiment", "run a named reproducible recipe");
  exp->add_option("--name", exp_name, "recipe name")->required();
  exp->add_option("--seed", exp_seed, "RNG seed");
  exp->add_option("--steps", exp_steps, "override the recipe's default length");
  exp->add_option("--out", exp_out, "output CSV path or -");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (sim->parsed()) {
    const pmm::Model model = pmm::load_model_file(sim_model);
    const pmm::Trajectory traj = pmm::simulate(model, sim_steps, sim_seed);
    OutFile out(sim_out);
    pmm::write_trajectory_csv(out.get(), traj);
    return 0;
  }

  if (dec->parsed()) {
    const pmm::Model model = pmm::load_model_file(dec_model);
    const pmm::TieRule tie = dec_tie == "colex" ? pmm::TieRule::colex() : pmm::TieRule::lex();
    const auto emit_diag = [&](const nlohmann::json& j) {
      if (dec_diag.empty()) {
        std::cerr << j.dump() << '\n';
      } else {
        std::ofstream f(dec_diag);
        if (!f) throw pmm::UsageError("cannot open diagnostics file: " + dec_diag);
        f << j.dump(2) << '\n';
      }
    };

    if (!dec_online) {
      const pmm::ObsSeq obs = read_obs(dec_obs);
      nlohmann::json diag;
      std::vector<int> path;
      bool zero = false;
      if (dec_exact) {
        const auto d = pmm::viterbi_path<pmm::ExactDomain>(model, obs, tie);
        zero = d.zero_likelihood;
        path = d.path;
        diag = {{"max_log_likelihood", zero ? pmm::kLogZero : d.log_likelihood()},
                {"final_tie_count", d.final_tie_count},
                {"zero_likelihood", zero},
                {"arithmetic", "exact"}};
      } else {
        const auto d = pmm::viterbi_path<pmm::LogDomain>(model, obs, tie);
        zero = d.zero_likelihood;
        path = d.path;
        diag = {{"max_log_likelihood", zero ? pmm::kLogZero : d.log_likelihood()},
                {"final_tie_count", d.final_tie_count},
                {"zero_likelihood", zero},
                {"arithmetic", "float"}};
      }
      if (diag["max_log_likelihood"].is_number() &&
          !std::isfinite(diag["max_log_likelihood"].get<double>())) {
        diag["max_log_likelihood"] = "-inf";
      }
      emit_diag(diag);
      if (zero) {
        std::cerr << "decode: no positive-probability path\n";
        return kExitDiagnostic;
      }
      OutFile out(dec_out);
      pmm::write_decode_csv(out.get(), path);
      return 0;
    }

    // streaming mode
    pmm::DecoderConfig cfg;
    cfg.order = dec_order;
    cfg.separation = dec_sep;
    cfg.tie = tie;
    cfg.require_strong = dec_strong;
    cfg.max_buffer = dec_maxbuf;
    cfg.overflow = dec_force ? pmm::DecoderConfig::OverflowPolicy::ForceCommit
                             : pmm::DecoderConfig::OverflowPolicy::Error;
    pmm::StreamDecoder decoder(model, cfg);
    const pmm::ObsSeq obs = read_obs(dec_obs);
    OutFile out(dec_out);
    out.get() << "t,v\n";
    try {
      for (int t = 1; t <= obs.size(); ++t) {
        const auto rows = obs.is_discrete() ? decoder.push(obs.symbol(t)) : decoder.push(obs.point(t));
        for (const auto& r : rows) out.get() << r.t << ',' << r.state << '\n';
        out.get().flush();
      }
    } catch (const pmm::ZeroLikelihoodError& e) {
      nlohmann::json diag = pmm::to_json(decoder.diagnostics());
      diag["error"] = e.what();
      emit_diag(diag);
      return kExitDiagnostic;
    }
    const auto flush = decoder.flush();
    for (const auto& r : flush.provisional) out.get() << r.t << ',' << r.state << '\n';
    nlohmann::json diag = pmm::to_json(flush.diagnostics);
    diag["provisional_from"] = decoder.committed_length() + 1;
    diag["total_log_likelihood"] = flush.total_log_likelihood;
    emit_diag(diag);
    return 0;
  }

  if (chk->parsed()) {
    const pmm::Model model = pmm::load_model_file(chk_model);
    nlohmann::json report;
    bool overall = true;
    bool any = false;
    const auto want = [&](const char* w) { return chk_which == "all" || chk_which == w; };
    if (want("hmm") && model.family() == pmm::Model::Family::Hmm) {
      const auto rep = pmm::check_hmm_corollary(model);
      report["hmm"] = pmm::to_json(rep);
      overall = overall && rep.pass;
      any = true;
    }
    if (want("discrete") && model.discrete()) {
      const auto rep = pmm::check_discrete_corollary(model);
      report["discrete"] = pmm::to_json(rep);
      overall = overall && rep.pass;
      any = true;
    }
    if (want("glm") && model.family() == pmm::Model::Family::GaussianLinearSwitching) {
      const auto rep = pmm::check_glm_corollary(model);
      report["glm"] = pmm::to_json(rep);
      overall = overall && rep.pass;
      any = true;
    }
    if (!any) throw pmm::UsageError("requested check does not apply to this model family");
    report["overall_pass"] = overall;
    OutFile out(chk_out);
    out.get() << report.dump(2) << '\n';
    return (chk_strict && !overall) ? kExitDiagnostic : 0;
  }

  if (exp->parsed()) {
    const auto result = pmm::run_recipe(exp_name, exp_seed, exp_steps);
    OutFile out(exp_out);
    out.get() << result.csv;
    std::cerr << result.meta.dump() << '\n';
    return 0;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pmm::ZeroLikelihoodError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDiagnostic;
  } catch (const pmm::GuardError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitGuard;
  } catch (const pmm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
