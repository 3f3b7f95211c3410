#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>

#include "doctest.h"

#include "crepair/error.hpp"
#include "crepair/io.hpp"
#include "crepair/nn/checkpoint.hpp"
#include "crepair/nn/decode.hpp"
#include "crepair/nn/gradcheck.hpp"
#include "crepair/nn/trainer.hpp"
#include "support.hpp"

using namespace crepair;
using namespace crepair::nn;

namespace {

const testsupport::NeuralFixture& tiny() {
  static const auto f = testsupport::neural_fixture(HyperParams::tiny(), 6, 2);
  return f;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("crepair_test_" + name);
}

double row_sum_error(const Mat& m) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) worst = std::max(worst, std::abs(m.row(r).sum() - 1.0));
  return worst;
}

TrainOptions options(std::size_t epochs, std::uint64_t seed, std::size_t threads = 1) {
  TrainOptions o;
  o.epochs = epochs;
  o.seed = seed;
  o.threads = threads;
  return o;
}

std::vector<int> decoder_inputs(const PreparedExample& ex) {
  std::vector<int> in{Vocabulary::kBos};
  in.insert(in.end(), ex.target.begin(), ex.target.end() - 1);
  for (int& id : in)
    if (id < 0) id = Vocabulary::kUnk;
  return in;
}

}  // namespace

TEST_CASE("vocabulary layout") {
  Vocabulary v = Vocabulary::build({"b", "a", "b", "c", "a", "b", "d"}, 2);
  CHECK(v.token(Vocabulary::kPad) == "<PAD>");
  CHECK(v.token(Vocabulary::kEos) == "<EOS>");
  CHECK(v.reserved_count() == 20);
  CHECK(v.token(20) == "b");
  CHECK(v.token(21) == "a");
  CHECK(v.size() == 22);
  CHECK(v.id("d") == Vocabulary::kUnk);
  CHECK(Vocabulary::from_json(nlohmann::json::parse(v.to_json().dump())).tokens() == v.tokens());
  CHECK(Vocabulary::build({"x", "y", "z"}, 1, 21).size() == 21);
  CHECK_THROWS_AS(Vocabulary::build({}), Error);
}

TEST_CASE("hyper-parameter JSON") {
  HyperParams hp = HyperParams::desk();
  CHECK(to_json(hyper_params_from_json(nlohmann::json::parse(to_json(hp).dump()))) == to_json(hp));
  HyperParams partial = hyper_params_from_json({{"d_model", 32}}, HyperParams::tiny());
  CHECK(partial.d_model == 32);
  CHECK(partial.layers == 1);
  CHECK_THROWS_AS(hyper_params_from_json({{"d_modle", 32}}), Error);
  HyperParams bad = HyperParams::tiny();
  bad.heads = 3;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK(HyperParams::full().layers == 5);
  CHECK(HyperParams::full().heads == 8);
  CHECK(HyperParams::full().d_model == 256);
  CHECK(HyperParams::full().lr == 1e-4);
  CHECK(HyperParams::full().batch_size == 25);
  CHECK(HyperParams::full().offset_radius == 50);
}

TEST_CASE("fixture is small enough for the tiny configuration") {
  const auto& f = tiny();
  REQUIRE(f.prepared.size() >= 8);
  CHECK(f.vocab.size() <= 50);
  for (const auto& ex : f.prepared) {
    CHECK(ex.target.back() == Vocabulary::kEos);
    for (const auto& line : ex.lines) CHECK(line.ids.size() <= f.hp.max_seq_len);
  }
}

TEST_CASE("copy map extends the vocabulary with source OOV tokens") {
  Vocabulary v;
  LineSequence seq{{"<BOS>", "foo", "=", "foo", "<EOS>"}, 0};
  EncoderInput in = make_encoder_input(seq, v);
  CopyMap map = make_copy_map(in, v);
  REQUIRE(map.oov.size() == 2);
  CHECK(map.source_ids[0] == Vocabulary::kBos);
  CHECK(map.source_ids[1] == static_cast<int>(v.size()));
  CHECK(map.source_ids[3] == static_cast<int>(v.size()));
  CHECK(map.source_ids[2] == static_cast<int>(v.size() + 1));
  CHECK(map.id("foo", v) == static_cast<int>(v.size()));
  CHECK(map.id("bar", v) == -1);
  CHECK(map.token(static_cast<int>(v.size()), v) == "foo");
  CHECK(in.ids[1] == Vocabulary::kUnk);
}

TEST_CASE("all distributions sum to one and p_gen is strictly inside (0,1)") {
  const auto& f = tiny();
  Model model(f.hp, f.vocab, 7);
  for (const auto& ex : f.prepared) {
    Tape tape(&model.params());
    Encoded enc = model.encode(tape, ex.lines);
    const Mat loc = tape.value(tape.softmax_rows(model.localizer_logits(tape, enc)));
    CHECK(loc.cols() == static_cast<Eigen::Index>(ex.lines.size()));
    CHECK(row_sum_error(loc) < 1e-6);
    DecoderOutputs out = model.decode(tape, model.line_states(tape, enc, ex.error_index),
                                      ex.lines[ex.error_index], ex.copy, decoder_inputs(ex));
    CHECK(row_sum_error(tape.value(out.attention)) < 1e-6);
    CHECK(row_sum_error(tape.value(out.p_vocab)) < 1e-6);
    CHECK(row_sum_error(tape.value(out.p_ext)) < 1e-6);
    CHECK(tape.value(out.p_ext).minCoeff() >= 0.0);
    CHECK(tape.value(out.p_ext).cols() == static_cast<Eigen::Index>(ex.copy.extended_size()));
    CHECK(tape.value(out.p_gen).minCoeff() > 0.0);
    CHECK(tape.value(out.p_gen).maxCoeff() < 1.0);
  }
}

TEST_CASE("forced p_gen reduces the mixture exactly to one pathway") {
  const auto& f = tiny();
  Model model(f.hp, f.vocab, 3);
  const auto& ex = f.prepared.front();
  const auto& src = ex.lines[ex.error_index];
  const Mat memory = encode_line(model, ex.lines, ex.error_index);
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<int> prefix(ex.target.begin(), ex.target.begin() + static_cast<long>(t));
    for (int& id : prefix)
      if (id < 0) id = Vocabulary::kUnk;
    DecodeStep gen = model.decode_step(memory, src, ex.copy, prefix, 1.0);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(gen.p_ext.size());
    padded.head(gen.p_vocab.size()) = gen.p_vocab;
    CHECK(gen.p_ext == padded);

    DecodeStep copy = model.decode_step(memory, src, ex.copy, prefix, 0.0);
    Eigen::VectorXd scattered = Eigen::VectorXd::Zero(copy.p_ext.size());
    for (std::size_t j = 0; j < ex.copy.source_ids.size(); ++j)
      scattered(ex.copy.source_ids[j]) += copy.attention(static_cast<Eigen::Index>(j));
    // Same summands; only the association order of the scatter may differ.
    CHECK((copy.p_ext - scattered).cwiseAbs().maxCoeff() <= 1e-15);
    for (Eigen::Index k = 0; k < copy.p_ext.size(); ++k)
      if (scattered(k) == 0.0) CHECK(copy.p_ext(k) == 0.0);
  }
}

TEST_CASE("generation loss limits") {
  Tape tape;
  const Mat uniform = Mat::Constant(3, 7, 1.0 / 7.0);
  CHECK(tape.scalar(tape.mean_neg_log_pick(tape.constant(uniform), {0, 4, 6}, 1e-10)) ==
        doctest::Approx(std::log(7.0)).epsilon(1e-14));
  Mat onehot = Mat::Zero(2, 5);
  onehot(0, 1) = 1.0;
  onehot(1, 3) = 1.0;
  CHECK(tape.scalar(tape.mean_neg_log_pick(tape.constant(onehot), {1, 3}, 1e-10)) == 0.0);
  CHECK(tape.scalar(tape.mean_neg_log_pick(tape.constant(onehot), {1, -1}, 1e-10)) ==
        doctest::Approx(-std::log(1e-10) / 2));
}

TEST_CASE("total loss is the plain sum of localization and generation terms") {
  const auto& f = tiny();
  Model model(f.hp, f.vocab, 5);
  for (const auto& ex : f.prepared) {
    Tape tape(&model.params());
    LossTerms t = model.loss(tape, ex);
    CHECK(tape.scalar(t.total) == tape.scalar(t.loc) + tape.scalar(t.gen));
    Encoded enc = model.encode(tape, ex.lines);
    const Mat logits = tape.value(model.localizer_logits(tape, enc));
    const double lse = std::log((logits.array() - logits.maxCoeff()).exp().sum()) + logits.maxCoeff();
    CHECK(tape.scalar(t.loc) == doctest::Approx(lse - logits(0, static_cast<Eigen::Index>(ex.error_index))));
  }
}

TEST_CASE("localizer ranking is invariant to a uniform logit shift") {
  const auto& f = tiny();
  Model model(f.hp, f.vocab, 9);
  const auto& ex = f.prepared.front();
  const Eigen::VectorXd before = model.localize(ex.lines);
  model.params().value("loc.b2")(0, 0) += 40.0;
  const Eigen::VectorXd after = model.localize(ex.lines);
  Eigen::Index a, b;
  before.maxCoeff(&a);
  after.maxCoeff(&b);
  CHECK(a == b);
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("line offset saturates at the configured radius") {
  const auto& f = tiny();
  Model model(f.hp, f.vocab, 2);
  auto lines = f.prepared.front().lines;
  const int r = static_cast<int>(f.hp.offset_radius);
  lines[0].offset = r;
  const Eigen::VectorXd at_radius = model.localize(lines);
  lines[0].offset = r + 17;
  CHECK(model.localize(lines) == at_radius);
  lines[0].offset = -r;
  const Eigen::VectorXd at_neg = model.localize(lines);
  lines[0].offset = -r - 3;
  CHECK(model.localize(lines) == at_neg);
}

TEST_CASE("gradient check covers every tensor on the tiny configuration") {
  const auto& f = tiny();
  Model model(f.hp, f.vocab, 11);
  std::vector<PreparedExample> two(f.prepared.begin(), f.prepared.begin() + 2);
  GradcheckReport report = gradient_check(model, two);
  std::map<std::string, std::size_t> entries;
  for (const auto& t : report.tensors) entries[t.name] = t.entries;
  CHECK(report.tensors.size() == model.params().size());
  for (const char* name : {"ptr.w_h", "ptr.w_s", "ptr.w_x", "ptr.b", "loc.b2", "enc.0.attn.bq", "out.bp"})
    CHECK(entries.count(name) == 1);
  for (const auto& t : report.tensors) {
    CAPTURE(t.name);
    CHECK(t.entries == static_cast<std::size_t>(model.params().value(t.name).size()));
    CHECK(t.max_rel_error < 1e-3);
  }
  CHECK(report.passed());
  CHECK_NOTHROW(require_passed(report));
  CHECK(report.to_json()["tensors"].size() == report.tensors.size());
  GradcheckReport failing = report;
  failing.tensors[0].max_rel_error = 0.5;
  CHECK_THROWS_AS(require_passed(failing), Error);
}

TEST_CASE("checkpoint round trip is bit-identical") {
  const auto& f = tiny();
  Model model(f.hp, f.vocab, 13);
  Trainer trainer(model, options(1, 4));
  trainer.run(std::vector<PreparedExample>(f.prepared.begin(), f.prepared.begin() + 4));
  const auto path = temp_path("ckpt.bin");
  save_checkpoint(path, model, &trainer.state(), &trainer.optimizer());
  LoadedCheckpoint loaded = load_checkpoint(path);
  REQUIRE(loaded.model.params().size() == model.params().size());
  for (std::size_t i = 0; i < model.params().size(); ++i) CHECK(loaded.model.params().value(i) == model.params().value(i));
  CHECK(loaded.model.vocab().tokens() == model.vocab().tokens());
  REQUIRE(loaded.state);
  CHECK(loaded.state->step == trainer.state().step);
  REQUIRE(loaded.optimizer);
  CHECK(loaded.optimizer->steps() == trainer.optimizer().steps());
  CHECK(loaded.optimizer->first_moments()[3] == trainer.optimizer().first_moments()[3]);
  for (const auto& ex : f.prepared) {
    CHECK(loaded.model.localize(ex.lines) == model.localize(ex.lines));
    const Mat m1 = encode_line(model, ex.lines, ex.error_index);
    const Mat m2 = encode_line(loaded.model, ex.lines, ex.error_index);
    CHECK(m1 == m2);
    CHECK(loaded.model.decode_step(m2, ex.lines[ex.error_index], ex.copy, {}).p_ext ==
          model.decode_step(m1, ex.lines[ex.error_index], ex.copy, {}).p_ext);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(temp_path("absent.bin")), Error);
  try {
    load_checkpoint(temp_path("absent.bin"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModelMissing);
  }
}

TEST_CASE("checkpoint version is checked") {
  const auto path = temp_path("ckpt_v2.bin");
  {
    std::ofstream out(path);
    out << "{\"format_version\":2}\n";
  }
  try {
    load_checkpoint(path);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedVersion);
  }
  std::filesystem::remove(path);
}

TEST_CASE("beam width one equals greedy decoding") {
  const auto& f = tiny();
  Model model(f.hp, f.vocab, 17);
  for (const auto& ex : f.prepared) {
    const Mat memory = encode_line(model, ex.lines, ex.error_index);
    auto scorer = model_scorer(model, memory, ex.lines[ex.error_index], ex.copy);
    Hypothesis greedy = greedy_search(scorer, f.hp.max_target_len, Vocabulary::kEos);
    auto beam = beam_search(scorer, 1, f.hp.max_target_len, Vocabulary::kEos);
    REQUIRE(beam.size() == 1);
    CHECK(beam[0].ids == greedy.ids);
    CHECK(beam[0].log_prob == greedy.log_prob);
    auto wide = beam_search(scorer, 4, f.hp.max_target_len, Vocabulary::kEos);
    for (std::size_t i = 0; i < wide.size(); ++i) {
      CHECK(std::isfinite(wide[i].log_prob));
      if (i) CHECK(wide[i].log_prob <= wide[i - 1].log_prob);
    }
  }
}

namespace {

// Per-step distributions that ignore the prefix. With `eos_allowed` false
// every sequence has the full length, and then beam search is exact: any
// prefix beaten by B others has B completions beating it. Once EOS may end
// a hypothesis early that argument breaks, so only consistency is checked.
StepScorer toy_scorer(std::size_t vocab, std::size_t max_len, int eos, bool eos_allowed, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> steps;
  for (std::size_t t = 0; t < max_len; ++t) {
    Eigen::VectorXd logits(static_cast<Eigen::Index>(vocab));
    for (Eigen::Index i = 0; i < logits.size(); ++i) logits(i) = 2.0 * rng.normal();
    if (!eos_allowed) logits(eos) = -std::numeric_limits<double>::infinity();
    const double lse = std::log(logits.array().exp().sum());
    steps.push_back((logits.array() - lse).matrix());
  }
  return [steps](const std::vector<int>& prefix) { return steps.at(prefix.size()); };
}

struct Enumerated {
  std::vector<int> ids;
  double log_prob;
};

void enumerate_all(const StepScorer& scorer, std::size_t max_len, int eos, std::vector<int>& prefix,
                   double lp, std::vector<Enumerated>& out) {
  const Eigen::VectorXd logp = scorer(prefix);
  for (Eigen::Index id = 0; id < logp.size(); ++id) {
    if (!std::isfinite(logp(id))) continue;
    if (static_cast<int>(id) == eos) {
      out.push_back({prefix, lp + logp(id)});
      continue;
    }
    prefix.push_back(static_cast<int>(id));
    if (prefix.size() == max_len) out.push_back({prefix, lp + logp(id)});
    else enumerate_all(scorer, max_len, eos, prefix, lp + logp(id), out);
    prefix.pop_back();
  }
}

std::vector<Enumerated> enumerate_sorted(const StepScorer& scorer, std::size_t max_len, int eos) {
  std::vector<Enumerated> all;
  std::vector<int> prefix;
  enumerate_all(scorer, max_len, eos, prefix, 0.0, all);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.log_prob > b.log_prob; });
  return all;
}

}  // namespace

TEST_CASE("beam search equals exhaustive enumeration on fixed-length toy scorers") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t vocab = 3 + seed % 6, max_len = 1 + seed % 4;
    const int eos = static_cast<int>(seed % vocab);
    StepScorer scorer = toy_scorer(vocab, max_len, eos, false, seed);
    const auto all = enumerate_sorted(scorer, max_len, eos);
    for (std::size_t B : {1, 2, 3, 5, 8}) {
      CAPTURE(seed);
      CAPTURE(B);
      auto beam = beam_search(scorer, B, max_len, eos);
      REQUIRE(beam.size() == std::min(B, all.size()));
      for (std::size_t i = 0; i < beam.size(); ++i) {
        CHECK(beam[i].ids == all[i].ids);
        CHECK(beam[i].log_prob == doctest::Approx(all[i].log_prob).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("beam search with early EOS returns real sequences with their scores") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t vocab = 3 + seed % 6, max_len = 1 + seed % 4;
    const int eos = static_cast<int>(seed % vocab);
    StepScorer scorer = toy_scorer(vocab, max_len, eos, true, seed);
    const auto all = enumerate_sorted(scorer, max_len, eos);
    std::map<std::vector<int>, double> score;
    for (const auto& e : all) score[e.ids] = e.log_prob;
    for (std::size_t B : {1, 3, 8}) {
      auto beam = beam_search(scorer, B, max_len, eos);
      REQUIRE(!beam.empty());
      CHECK(beam[0].log_prob <= all[0].log_prob + 1e-12);
      for (std::size_t i = 0; i < beam.size(); ++i) {
        REQUIRE(score.count(beam[i].ids) == 1);
        CHECK(beam[i].log_prob == doctest::Approx(score[beam[i].ids]).epsilon(1e-12));
        if (i) CHECK(beam[i].log_prob <= beam[i - 1].log_prob);
      }
    }
    // Wide enough to keep every hypothesis, beam search is exhaustive.
    auto wide = beam_search(scorer, all.size(), max_len, eos);
    REQUIRE(wide.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(wide[i].log_prob == doctest::Approx(all[i].log_prob).epsilon(1e-12));
  }
}

TEST_CASE("training is deterministic and thread count does not change the numbers") {
  const auto& f = tiny();
  auto run = [&](std::size_t threads) {
    HyperParams hp = f.hp;
    hp.dropout = 0.1;
    Model model(hp, f.vocab, 21);
    Trainer trainer(model, options(3, 8, threads));
    return std::make_pair(trainer.run(f.prepared).trace, model.params().value("out.Vp"));
  };
  auto [a, pa] = run(1);
  auto [b, pb] = run(1);
  auto [c, pc] = run(3);
  REQUIRE(a.size() >= 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(a[i].total == b[i].total);
    CHECK(a[i].total == c[i].total);
    CHECK(a[i].loc == c[i].loc);
  }
  CHECK(pa == pb);
  CHECK(pa == pc);
}

TEST_CASE("training reduces the loss on a small set") {
  const auto& f = tiny();
  HyperParams hp = f.hp;
  hp.lr = 3e-3;
  Model model(hp, f.vocab, 23);
  const double before = evaluate_loss(model, f.prepared).total;
  Trainer trainer(model, options(15, 2));
  trainer.run(f.prepared);
  CHECK(evaluate_loss(model, f.prepared).total < before);
}

TEST_CASE("non-finite loss aborts with the step") {
  const auto& f = tiny();
  Model model(f.hp, f.vocab, 1);
  model.params().value("loc.b2")(0, 0) = std::numeric_limits<double>::quiet_NaN();
  Trainer trainer(model, options(1, 1));
  try {
    trainer.run(f.prepared);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteLoss);
    CHECK(e.details()["step"] == 0);
  }
}

TEST_CASE("gradient clipping bounds the global norm") {
  GradStore g(2);
  g.accumulate(0, Mat::Constant(2, 2, 10.0));
  g.accumulate(1, Mat::Constant(1, 3, -10.0));
  const double before = clip_global_norm(g, 10.0);
  CHECK(before == doctest::Approx(std::sqrt(700.0)));
  CHECK(std::sqrt(g.squared_norm()) == doctest::Approx(10.0));
  CHECK(clip_global_norm(g, 100.0) == doctest::Approx(10.0));
}

TEST_CASE("loss trace CSV round trip") {
  std::vector<LossRecord> trace{{0, 1.5, 2.25, 3.75}, {1, 0.1, 0.2, 0.30000000000000004}};
  const auto path = temp_path("trace.csv");
  write_loss_trace(path, trace);
  const std::string text = read_text_file(path);
  CHECK(text.rfind("# format_version: 1\nstep,L_loc,L_gen,total\n", 0) == 0);
  auto back = read_loss_trace(path);
  REQUIRE(back.size() == 2);
  CHECK(back[1].total == trace[1].total);
  CHECK(back[0].gen == trace[0].gen);
  std::filesystem::remove(path);
}
