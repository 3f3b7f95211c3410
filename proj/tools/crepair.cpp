#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crepair/context.hpp"
#include "crepair/corruption.hpp"
#include "crepair/dataset.hpp"
#include "crepair/diagnostics.hpp"
#include "crepair/error.hpp"
#include "crepair/format.hpp"
#include "crepair/io.hpp"
#include "crepair/nn/checkpoint.hpp"
#include "crepair/nn/features.hpp"
#include "crepair/nn/gradcheck.hpp"
#include "crepair/nn/trainer.hpp"
#include "crepair/repair.hpp"
#include "crepair/run_config.hpp"

namespace fs = std::filesystem;
using namespace crepair;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void report_error(std::string_view code, const std::string& message, const nlohmann::json& details = {}) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  if (!details.is_null() && !details.empty()) j["details"] = details;
  std::cerr << j.dump() << std::endl;
}

void log_json(const nlohmann::ordered_json& j) { std::cerr << j.dump() << std::endl; }

// Options shared by every subcommand: a config file plus the overrides that
// apply to the command at hand.
struct Common {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;

  RunConfig config() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (!preset.empty()) {
      if (preset == "full") c.hyper = nn::HyperParams::full();
      else if (preset == "desk") c.hyper = nn::HyperParams::desk();
      else if (preset == "tiny") c.hyper = nn::HyperParams::tiny();
    }
    if (seed) c.seed = *seed;
    if (threads) {
      c.synthesis.threads = *threads;
      c.training.threads = *threads;
    }
    return c;
  }
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "run configuration JSON")->check(CLI::ExistingFile);
  cmd->add_option("--preset", common.preset, "hyperparameter preset")
      ->check(CLI::IsMember({"full", "desk", "tiny"}));
  cmd->add_option("--seed", common.seed, "root seed");
  cmd->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::vector<BrokenProgram> load_testset(const fs::path& path) {
  if (fs::is_directory(path) || path.extension() == ".c") {
    std::vector<BrokenProgram> set;
    for (auto& p : load_sources(path)) {
      BrokenProgram b;
      b.parent_id = p.source_id;
      b.program = std::move(p);
      set.push_back(std::move(b));
    }
    return set;
  }
  return read_broken_programs(path);
}

std::vector<BrokenProgram> select_split(std::vector<BrokenProgram> records, const std::string& manifest_path,
                                        const std::string& split) {
  if (manifest_path.empty()) return records;
  const DatasetManifest manifest = manifest_from_json(nlohmann::json::parse(read_text_file(manifest_path)));
  DatasetSplits splits = apply_manifest(records, manifest);
  if (split == "train") return std::move(splits.train);
  if (split == "validation") return std::move(splits.validation);
  return std::move(splits.test);
}

// ------------------------------------------------------------ subcommands

struct SynthesizeArgs {
  Common common;
  std::string corpus, out, report;
  std::optional<std::size_t> variants, max_errors;
};

int run_synthesize(const SynthesizeArgs& a) {
  RunConfig rc = a.common.config();
  if (a.variants) rc.synthesis.variants_per_program = *a.variants;
  if (a.max_errors) rc.synthesis.max_errors = *a.max_errors;
  const auto corpus = load_sources(a.corpus);
  const Compiler compiler(rc.compiler);
  AtomicFile out(a.out);
  const SynthesisReport report = synthesize_corpus(
      corpus, rc.synthesis_config(), compiler, [&out](BrokenProgram&& b) { out.stream() << to_json(b).dump() << '\n'; });
  out.commit();
  nlohmann::ordered_json j = report.to_json();
  if (!a.report.empty()) write_json(a.report, j);
  std::cout << j.dump() << std::endl;
  return 0;
}

struct ContextArgs {
  std::string program, out;
  std::size_t budget = 0;
};

int run_context(const ContextArgs& a) {
  const TokenizedProgram program = tokenize(read_text_file(a.program), fs::path(a.program).stem().string());
  const SymbolTables tables = analyzer(program);
  const auto contexts =
      get_context(program, tables, a.budget ? a.budget : std::numeric_limits<std::size_t>::max());
  std::string text;
  for (const auto& c : contexts) {
    nlohmann::ordered_json j;
    j["format_version"] = kFormatVersion;
    j["source_id"] = program.source_id;
    j.update(to_json(c));
    text += j.dump() + "\n";
  }
  if (a.out.empty()) std::cout << text;
  else write_text_file(a.out, text);
  return 0;
}

struct TokenizeArgs {
  std::string program, out;
};

int run_tokenize(const TokenizeArgs& a) {
  const TokenizedProgram program = tokenize(read_text_file(a.program), fs::path(a.program).stem().string());
  const std::string text = to_json(program).dump() + "\n";
  if (a.out.empty()) std::cout << text;
  else write_text_file(a.out, text);
  return 0;
}

struct SplitArgs {
  Common common;
  std::string records, out;
  std::vector<double> ratios;
};

int run_split(const SplitArgs& a) {
  RunConfig rc = a.common.config();
  if (!a.ratios.empty()) rc.split = {a.ratios.at(0), a.ratios.at(1), a.ratios.at(2)};
  DatasetManifest manifest = dedup_split(read_broken_programs(a.records), rc.split, rc.stage_seed("split"));
  manifest.corpus_paths = {a.records};
  write_json(a.out, to_json(manifest));
  std::cout << nlohmann::ordered_json{{"train", manifest.train.size()},
                                      {"validation", manifest.validation.size()},
                                      {"test", manifest.test.size()},
                                      {"pairs_removed", manifest.pairs_removed()}}
                   .dump()
            << std::endl;
  return 0;
}

struct TrainArgs {
  Common common;
  std::string records, manifest, out, loss_csv, resume;
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
};

int run_train(const TrainArgs& a) {
  RunConfig rc = a.common.config();
  if (a.epochs) rc.training.epochs = *a.epochs;
  if (a.lr) rc.hyper.lr = *a.lr;
  const Compiler compiler(rc.compiler);

  std::vector<BrokenProgram> records = read_broken_programs(a.records);
  std::vector<BrokenProgram> train_set = records, validation_set;
  if (!a.manifest.empty()) {
    train_set = select_split(records, a.manifest, "train");
    validation_set = select_split(records, a.manifest, "validation");
  }

  std::optional<nn::LoadedCheckpoint> resumed;
  if (!a.resume.empty()) resumed.emplace(nn::load_checkpoint(a.resume));
  const nn::HyperParams hp = resumed ? resumed->model.hyper_params() : rc.hyper;

  nn::ExampleBuildReport build_report;
  const auto train_examples = nn::build_examples(train_set, compiler, hp, &build_report);
  const auto validation_examples = nn::build_examples(validation_set, compiler, hp);
  log_json({{"event", "examples"},
            {"train", train_examples.size()},
            {"validation", validation_examples.size()},
            {"skipped_programs", build_report.skipped.size()}});

  nn::Model model = resumed ? std::move(resumed->model)
                            : nn::Model(hp, nn::build_vocabulary(train_examples, hp), rc.stage_seed("init"));
  const auto train = nn::prepare_examples(train_examples, model.vocab(), hp);
  const auto validation = nn::prepare_examples(validation_examples, model.vocab(), hp);

  nn::TrainOptions options;
  options.epochs = rc.training.epochs;
  options.threads = rc.training.threads;
  options.seed = rc.stage_seed("train");
  options.accuracy_every = rc.training.accuracy_every;
  options.stop_at_train_accuracy = rc.training.stop_at_train_accuracy;
  options.keep_best_validation = rc.training.keep_best_validation;
  options.on_epoch = [](const nn::EpochSummary& s) {
    nlohmann::ordered_json j{{"event", "epoch"}, {"epoch", s.epoch}, {"mean_total", s.mean_total}};
    if (s.train_accuracy) j["train_accuracy"] = *s.train_accuracy;
    if (s.validation_accuracy) j["validation_accuracy"] = *s.validation_accuracy;
    log_json(j);
  };
  nn::Trainer trainer(model, options);
  if (resumed) {
    if (resumed->state) trainer.state() = *resumed->state;
    if (resumed->optimizer) trainer.optimizer() = *resumed->optimizer;
  }
  const nn::TrainResult result = trainer.run(train, validation);

  nn::save_checkpoint(a.out, model, &trainer.state(), &trainer.optimizer());
  if (!a.loss_csv.empty()) nn::write_loss_trace(a.loss_csv, result.trace);
  nlohmann::ordered_json summary{{"checkpoint", a.out},
                                 {"epochs", result.epochs.size()},
                                 {"steps", result.trace.size()},
                                 {"stopped_early", result.stopped_early}};
  if (result.best_epoch) summary["best_epoch"] = *result.best_epoch;
  if (!result.trace.empty()) summary["final_loss"] = result.trace.back().total;
  std::cout << summary.dump() << std::endl;
  return 0;
}

struct RepairArgs {
  Common common;
  std::string input, model, out, trace;
  std::optional<std::size_t> beam, max_iterations;
};

int run_repair(const RepairArgs& a) {
  RunConfig rc = a.common.config();
  if (a.beam) rc.repair.beam_width = *a.beam;
  if (a.max_iterations) rc.repair.max_iterations = *a.max_iterations;
  const std::string source = read_text_file(a.input);
  const TokenizedProgram program = tokenize(source, fs::path(a.input).stem().string());
  const nn::LoadedCheckpoint ckpt = nn::load_checkpoint(a.model);
  const Compiler compiler(rc.compiler);
  const RepairResult result = repair_program(program, ckpt.model, compiler, rc.repair);
  const bool untouched = result.trace.iterations.empty() || result.program == program;
  const std::string repaired = untouched ? source : detokenize(result.program);
  if (!a.trace.empty()) write_json(a.trace, result.trace.to_json());
  if (a.out.empty()) std::cout << repaired;
  else write_text_file(a.out, repaired);
  log_json({{"status", to_string(result.trace.final_status)},
            {"iterations", result.trace.iteration_count()},
            {"initial_errors", result.trace.initial_errors},
            {"final_errors", result.trace.final_errors}});
  return 0;
}

struct EvaluateArgs {
  Common common;
  std::string testset, manifest, split = "test", model, out;
  bool no_full_repair = false, text = false;
};

int run_evaluate(const EvaluateArgs& a) {
  const RunConfig rc = a.common.config();
  const auto set = select_split(load_testset(a.testset), a.manifest, a.split);
  const nn::LoadedCheckpoint ckpt = nn::load_checkpoint(a.model);
  const Compiler compiler(rc.compiler);
  EvalOptions options;
  options.repair = rc.repair;
  options.full_repair = !a.no_full_repair;
  const Metrics metrics = evaluate(set, ckpt.model, compiler, options);
  nlohmann::ordered_json j = metrics.to_json();
  if (!a.out.empty()) write_json(a.out, j);
  if (a.text) std::cout << metrics.to_text();
  else std::cout << j.dump() << std::endl;
  return 0;
}

struct GradcheckArgs {
  Common common;
  std::string records, out;
  std::size_t examples = 2;
  double epsilon = 1e-4, tolerance = 1e-3;
};

int run_gradcheck(const GradcheckArgs& a) {
  RunConfig rc = a.common.config();
  if (a.common.preset.empty() && a.common.config_path.empty()) rc.hyper = nn::HyperParams::tiny();
  const Compiler compiler(rc.compiler);
  const auto examples = nn::build_examples(read_broken_programs(a.records), compiler, rc.hyper);
  const nn::Vocabulary vocab = nn::build_vocabulary(examples, rc.hyper);
  auto prepared = nn::prepare_examples(examples, vocab, rc.hyper);
  if (prepared.size() > a.examples) prepared.resize(a.examples);
  nn::Model model(rc.hyper, vocab, rc.stage_seed("init"));
  const nn::GradcheckReport report = nn::gradient_check(model, prepared, a.epsilon, a.tolerance);
  nlohmann::ordered_json j = report.to_json();
  if (!a.out.empty()) write_json(a.out, j);
  std::cout << j.dump() << std::endl;
  nn::require_passed(report);
  return 0;
}

int run_config_dump(const Common& common, const std::string& out) {
  const nlohmann::ordered_json j = to_json(common.config());
  if (out.empty()) std::cout << j.dump(2) << std::endl;
  else write_json(out, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crepair: synthesize broken C programs, train a repair model and repair code"};
  app.require_subcommand(1);
  std::function<int()> action;

  SynthesizeArgs synth;
  auto* s = app.add_subcommand("synthesize", "inject compilation errors into correct programs");
  add_common(s, synth.common);
  s->add_option("--corpus", synth.corpus, ".c file or directory of .c files")->required()->check(CLI::ExistingPath);
  s->add_option("--out", synth.out, "broken programs (JSONL)")->required();
  s->add_option("--variants", synth.variants, "variants per program")->check(CLI::PositiveNumber);
  s->add_option("--max-errors", synth.max_errors, "errors per variant, at most")->check(CLI::Range(1, 1000));
  s->add_option("--report", synth.report, "synthesis report (JSON)");
  s->callback([&] { action = [&] { return run_synthesize(synth); }; });

  ContextArgs ctx;
  auto* c = app.add_subcommand("context", "context lines of every line of a program");
  c->add_option("--program", ctx.program, "C source file")->required()->check(CLI::ExistingFile);
  c->add_option("--out", ctx.out, "contexts (JSONL); stdout when omitted");
  c->add_option("--budget", ctx.budget, "token budget per context (0 = unlimited)");
  c->callback([&] { action = [&] { return run_context(ctx); }; });

  TokenizeArgs tok;
  auto* t = app.add_subcommand("tokenize", "tokenized program as JSON");
  t->add_option("--program", tok.program, "C source file")->required()->check(CLI::ExistingFile);
  t->add_option("--out", tok.out, "output JSON; stdout when omitted");
  t->callback([&] { action = [&] { return run_tokenize(tok); }; });

  SplitArgs split;
  auto* sp = app.add_subcommand("split", "deduplicate and split broken programs into train/validation/test");
  add_common(sp, split.common);
  sp->add_option("--records", split.records, "broken programs (JSONL)")->required()->check(CLI::ExistingFile);
  sp->add_option("--out", split.out, "dataset manifest (JSON)")->required();
  sp->add_option("--ratios", split.ratios, "train,validation,test")->delimiter(',')->expected(3);
  sp->callback([&] { action = [&] { return run_split(split); }; });

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "train the localization and repair model");
  add_common(tr, train.common);
  tr->add_option("--records", train.records, "broken programs (JSONL)")->required()->check(CLI::ExistingFile);
  tr->add_option("--manifest", train.manifest, "dataset manifest; train and validation splits are used")
      ->check(CLI::ExistingFile);
  tr->add_option("--out", train.out, "checkpoint path")->required();
  tr->add_option("--loss-csv", train.loss_csv, "per-step loss trace (CSV)");
  tr->add_option("--resume", train.resume, "continue from a checkpoint")->check(CLI::ExistingFile);
  tr->add_option("--epochs", train.epochs, "epochs to run");
  tr->add_option("--lr", train.lr, "learning rate");
  tr->callback([&] { action = [&] { return run_train(train); }; });

  RepairArgs rep;
  auto* r = app.add_subcommand("repair", "repair one C file");
  add_common(r, rep.common);
  r->add_option("--input", rep.input, "C source file")->required()->check(CLI::ExistingFile);
  r->add_option("--model", rep.model, "checkpoint")->required();
  r->add_option("--out", rep.out, "repaired source; stdout when omitted");
  r->add_option("--trace", rep.trace, "repair trace (JSON)");
  r->add_option("--beam", rep.beam, "beam width")->check(CLI::PositiveNumber);
  r->add_option("--max-iterations", rep.max_iterations, "compile/repair rounds")->check(CLI::PositiveNumber);
  r->callback([&] { action = [&] { return run_repair(rep); }; });

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "localization, single repair and full repair metrics");
  add_common(e, ev.common);
  e->add_option("--testset", ev.testset, "broken programs (JSONL), or .c files without ground truth")
      ->required()
      ->check(CLI::ExistingPath);
  e->add_option("--manifest", ev.manifest, "dataset manifest selecting the split")->check(CLI::ExistingFile);
  e->add_option("--split", ev.split, "split to evaluate")->check(CLI::IsMember({"train", "validation", "test"}));
  e->add_option("--model", ev.model, "checkpoint")->required();
  e->add_option("--out", ev.out, "metrics (JSON)");
  e->add_flag("--no-full-repair", ev.no_full_repair, "skip compiler-in-the-loop repair");
  e->add_flag("--text", ev.text, "print a table instead of JSON");
  e->callback([&] { action = [&] { return run_evaluate(ev); }; });

  GradcheckArgs gc;
  auto* g = app.add_subcommand("gradcheck", "finite-difference check of every parameter gradient");
  add_common(g, gc.common);
  g->add_option("--records", gc.records, "broken programs (JSONL)")->required()->check(CLI::ExistingFile);
  g->add_option("--examples", gc.examples, "examples to use")->check(CLI::PositiveNumber);
  g->add_option("--epsilon", gc.epsilon, "central difference step");
  g->add_option("--tolerance", gc.tolerance, "maximum relative error");
  g->add_option("--out", gc.out, "report (JSON)");
  g->callback([&] { action = [&] { return run_gradcheck(gc); }; });

  Common cfg;
  std::string cfg_out;
  auto* cf = app.add_subcommand("config", "print the effective run configuration");
  add_common(cf, cfg);
  cf->add_option("--out", cfg_out, "write to a file instead of stdout");
  cf->callback([&] { action = [&] { return run_config_dump(cfg, cfg_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    report_error("UsageError", err.what());
    return kExitUsage;
  }

  try {
    return action();
  } catch (const Error& err) {
    report_error(to_string(err.code()), err.what(), err.details());
  } catch (const nlohmann::json::exception& err) {
    report_error(to_string(ErrorCode::InvalidInput), err.what());
  } catch (const std::exception& err) {
    report_error("Internal", err.what());
  }
  return kExitFailure;
}
