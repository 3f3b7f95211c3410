#include "crepair/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "crepair/error.hpp"

namespace crepair::nn {

EncoderInput make_encoder_input(const LineSequence& seq, const Vocabulary& vocab) {
  EncoderInput in;
  in.ids.reserve(seq.tokens.size());
  for (const auto& t : seq.tokens) in.ids.push_back(vocab.id(t));
  in.source_tokens = seq.tokens;
  in.offset = seq.offset;
  in.pad.assign(seq.tokens.size(), 0);
  return in;
}

int CopyMap::id(const std::string& token, const Vocabulary& vocab) const {
  if (vocab.contains(token)) return vocab.id(token);
  for (std::size_t k = 0; k < oov.size(); ++k)
    if (oov[k] == token) return static_cast<int>(vocab_size + k);
  return -1;
}

std::string CopyMap::token(int id, const Vocabulary& vocab) const {
  if (id < static_cast<int>(vocab_size)) return vocab.token(id);
  return oov.at(static_cast<std::size_t>(id) - vocab_size);
}

CopyMap make_copy_map(const EncoderInput& source, const Vocabulary& vocab) {
  CopyMap map;
  map.vocab_size = vocab.size();
  std::unordered_map<std::string, int> oov_ids;
  for (std::size_t i = 0; i < source.source_tokens.size(); ++i) {
    const auto& t = source.source_tokens[i];
    if (vocab.contains(t)) {
      map.source_ids.push_back(vocab.id(t));
      continue;
    }
    auto [it, inserted] = oov_ids.try_emplace(t, static_cast<int>(map.vocab_size + map.oov.size()));
    if (inserted) map.oov.push_back(t);
    map.source_ids.push_back(it->second);
  }
  return map;
}

PreparedExample prepare_example(const Example& example, const Vocabulary& vocab,
                                const HyperParams& hp) {
  PreparedExample p;
  p.id = example.id;
  for (const auto& seq : example.lines) {
    if (seq.tokens.size() > hp.max_seq_len)
      throw Error(ErrorCode::SequenceTooLong, "sequence longer than max_seq_len",
                  {{"example", example.id}, {"length", seq.tokens.size()}});
    p.lines.push_back(make_encoder_input(seq, vocab));
  }
  p.error_index = example.error_line - 1;
  p.copy = make_copy_map(p.lines.at(p.error_index), vocab);
  if (example.target.size() + 1 > hp.max_target_len)
    throw Error(ErrorCode::TargetTooLong, "target longer than max_target_len",
                {{"example", example.id}, {"length", example.target.size() + 1}});
  p.target_tokens = example.target;
  p.id_map = example.id_map;
  for (const auto& t : example.target) {
    const int id = p.copy.id(t, vocab);
    if (id < 0) p.uncopyable = true;
    p.target.push_back(id);
  }
  p.target.push_back(Vocabulary::kEos);
  return p;
}

std::vector<PreparedExample> prepare_examples(const std::vector<Example>& examples,
                                              const Vocabulary& vocab, const HyperParams& hp) {
  std::vector<PreparedExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(prepare_example(ex, vocab, hp));
  return out;
}

Vocabulary build_vocabulary(const std::vector<Example>& examples, const HyperParams& hp) {
  return Vocabulary::build(vocabulary_stream(examples), hp.min_token_count, hp.max_vocab);
}

Mat sinusoidal_positions(std::size_t n, std::size_t d) {
  Mat pe(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t pos = 0; pos < n; ++pos)
    for (std::size_t i = 0; i < d; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
      const double angle = static_cast<double>(pos) * rate;
      pe(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(i)) = i % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  return pe;
}

namespace {

Mat normal_matrix(Rng& rng, std::size_t rows, std::size_t cols, double stddev) {
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal() * stddev;
  return m;
}

Mat xavier(Rng& rng, std::size_t in, std::size_t out) {
  return normal_matrix(rng, in, out, std::sqrt(2.0 / static_cast<double>(in + out)));
}

Mat zeros(std::size_t rows, std::size_t cols) {
  return Mat::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

Mat ones(std::size_t rows, std::size_t cols) {
  return Mat::Ones(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

}  // namespace

Model::Model(HyperParams hp, Vocabulary vocab, std::uint64_t seed)
    : hp_(std::move(hp)), vocab_(std::move(vocab)) {
  hp_.validate();
  init_parameters(seed);
}

Model::Model(HyperParams hp, Vocabulary vocab, ParameterStore params)
    : hp_(std::move(hp)), vocab_(std::move(vocab)) {
  hp_.validate();
  init_parameters(0);
  if (params.size() != params_.size())
    throw Error(ErrorCode::InvalidInput, "parameter count does not match the configuration",
                {{"expected", params_.size()}, {"found", params.size()}});
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const Mat& src = params.value(params_.name(i));
    Mat& dst = params_.value(i);
    if (src.rows() != dst.rows() || src.cols() != dst.cols())
      throw Error(ErrorCode::InvalidInput, "shape mismatch for " + params_.name(i));
    dst = src;
  }
}

void Model::init_parameters(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "init"));
  const std::size_t d = hp_.d_model;
  const std::size_t f = hp_.ff_dim();
  const std::size_t v = vocab_.size();
  params_.add("embed.token", normal_matrix(rng, v, d, 1.0 / std::sqrt(static_cast<double>(d))));
  params_.add("embed.offset", normal_matrix(rng, 2 * hp_.offset_radius + 1, d, 0.1));

  auto attention_params = [&](const std::string& p) {
    for (const char* w : {"wq", "wk", "wv", "wo"}) {
      params_.add(p + "." + w, xavier(rng, d, d));
      params_.add(p + ".b" + std::string(w + 1), zeros(1, d));
    }
  };
  auto norm_params = [&](const std::string& p) {
    params_.add(p + ".g", ones(1, d));
    params_.add(p + ".b", zeros(1, d));
  };
  auto ff_params = [&](const std::string& p) {
    params_.add(p + ".w1", xavier(rng, d, f));
    params_.add(p + ".b1", zeros(1, f));
    params_.add(p + ".w2", xavier(rng, f, d));
    params_.add(p + ".b2", zeros(1, d));
  };
  for (std::size_t l = 0; l < hp_.layers; ++l) {
    const std::string p = "enc." + std::to_string(l);
    attention_params(p + ".attn");
    norm_params(p + ".ln1");
    ff_params(p + ".ff");
    norm_params(p + ".ln2");
  }
  params_.add("loc.w1", xavier(rng, d, d));
  params_.add("loc.b1", zeros(1, d));
  params_.add("loc.w2", xavier(rng, d, 1));
  params_.add("loc.b2", zeros(1, 1));
  for (std::size_t l = 0; l < hp_.layers; ++l) {
    const std::string p = "dec." + std::to_string(l);
    attention_params(p + ".self");
    norm_params(p + ".ln1");
    attention_params(p + ".cross");
    norm_params(p + ".ln2");
    ff_params(p + ".ff");
    norm_params(p + ".ln3");
  }
  params_.add("out.V", xavier(rng, 2 * d, d));
  params_.add("out.b", zeros(1, d));
  params_.add("out.Vp", xavier(rng, d, v));
  params_.add("out.bp", zeros(1, v));
  params_.add("ptr.w_h", xavier(rng, d, 1));
  params_.add("ptr.w_s", xavier(rng, d, 1));
  params_.add("ptr.w_x", xavier(rng, d, 1));
  params_.add("ptr.b", zeros(1, 1));
}

Var Model::embed(Tape& tape, const std::vector<int>& ids) const {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (int id : ids)
    rows.push_back(static_cast<std::size_t>(id >= 0 && id < static_cast<int>(vocab_.size()) ? id : Vocabulary::kUnk));
  Var e = tape.gather_rows(tape.param("embed.token"), rows);
  return tape.scale(e, std::sqrt(static_cast<double>(hp_.d_model)));
}

Var Model::attention_block(Tape& tape, const std::string& p, Var query_in, Var key_in,
                           const AttentionSpec& spec) const {
  Var q = tape.add_row(tape.matmul(query_in, tape.param(p + ".wq")), tape.param(p + ".bq"));
  Var k = tape.add_row(tape.matmul(key_in, tape.param(p + ".wk")), tape.param(p + ".bk"));
  Var v = tape.add_row(tape.matmul(key_in, tape.param(p + ".wv")), tape.param(p + ".bv"));
  Var o = tape.attention(q, k, v, spec);
  return tape.add_row(tape.matmul(o, tape.param(p + ".wo")), tape.param(p + ".bo"));
}

Var Model::feed_forward(Tape& tape, const std::string& p, Var x, Rng* dropout) const {
  Var h = tape.gelu(tape.add_row(tape.matmul(x, tape.param(p + ".w1")), tape.param(p + ".b1")));
  if (dropout) h = tape.dropout(h, hp_.dropout, *dropout);
  return tape.add_row(tape.matmul(h, tape.param(p + ".w2")), tape.param(p + ".b2"));
}

Var Model::add_norm(Tape& tape, const std::string& p, Var x, Var sub, Rng* dropout) const {
  if (dropout) sub = tape.dropout(sub, hp_.dropout, *dropout);
  return tape.layer_norm(tape.add(x, sub), tape.param(p + ".g"), tape.param(p + ".b"));
}

Encoded Model::encode(Tape& tape, const std::vector<EncoderInput>& lines, Rng* dropout) const {
  if (lines.empty()) throw Error(ErrorCode::InvalidInput, "cannot encode an empty program");
  Encoded enc;
  std::vector<int> ids;
  std::vector<std::size_t> offset_rows;
  std::size_t longest = 0;
  AttentionSpec spec;
  spec.heads = hp_.heads;
  for (const auto& line : lines) {
    if (line.ids.size() > hp_.max_seq_len)
      throw Error(ErrorCode::SequenceTooLong, "sequence longer than max_seq_len",
                  {{"length", line.ids.size()}, {"max_seq_len", hp_.max_seq_len}});
    enc.begin.push_back(ids.size());
    enc.length.push_back(line.ids.size());
    spec.segments.push_back({ids.size(), line.ids.size(), ids.size(), line.ids.size()});
    const long r = static_cast<long>(hp_.offset_radius);
    const std::size_t row = static_cast<std::size_t>(std::clamp<long>(line.offset, -r, r) + r);
    for (std::size_t i = 0; i < line.ids.size(); ++i) {
      ids.push_back(line.ids[i]);
      offset_rows.push_back(row);
      spec.key_mask.push_back(line.pad.empty() ? 0 : line.pad[i]);
    }
    longest = std::max(longest, line.ids.size());
  }
  const Mat pe = sinusoidal_positions(longest, hp_.d_model);
  Mat positions(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(hp_.d_model));
  for (std::size_t s = 0; s < enc.begin.size(); ++s)
    positions.middleRows(static_cast<Eigen::Index>(enc.begin[s]), static_cast<Eigen::Index>(enc.length[s])) =
        pe.topRows(static_cast<Eigen::Index>(enc.length[s]));

  Var x = tape.add(embed(tape, ids), tape.constant(std::move(positions)));
  x = tape.add(x, tape.gather_rows(tape.param("embed.offset"), offset_rows));
  if (dropout) x = tape.dropout(x, hp_.dropout, *dropout);
  for (std::size_t l = 0; l < hp_.layers; ++l) {
    const std::string p = "enc." + std::to_string(l);
    x = add_norm(tape, p + ".ln1", x, attention_block(tape, p + ".attn", x, x, spec), dropout);
    x = add_norm(tape, p + ".ln2", x, feed_forward(tape, p + ".ff", x, dropout), dropout);
  }
  enc.states = x;
  return enc;
}

Var Model::line_states(Tape& tape, const Encoded& encoded, std::size_t index) const {
  std::vector<std::size_t> rows(encoded.length.at(index));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = encoded.begin[index] + i;
  return tape.gather_rows(encoded.states, rows);
}

Var Model::localizer_logits(Tape& tape, const Encoded& encoded) const {
  Var bos = tape.gather_rows(encoded.states, encoded.begin);
  Var h = tape.tanh(tape.add_row(tape.matmul(bos, tape.param("loc.w1")), tape.param("loc.b1")));
  Var logits = tape.add_row(tape.matmul(h, tape.param("loc.w2")), tape.param("loc.b2"));
  return tape.transpose(logits);
}

DecoderOutputs Model::decode(Tape& tape, Var memory, const EncoderInput& source, const CopyMap& copy,
                             const std::vector<int>& inputs, Rng* dropout,
                             std::optional<double> force_pgen) const {
  const std::size_t T = inputs.size();
  const std::size_t m = source.ids.size();
  const double sqrt_d = std::sqrt(static_cast<double>(hp_.d_model));
  DecoderOutputs out;

  out.inputs = embed(tape, inputs);
  Var x = tape.add(out.inputs, tape.constant(sinusoidal_positions(T, hp_.d_model)));
  if (dropout) x = tape.dropout(x, hp_.dropout, *dropout);

  AttentionSpec self;
  self.heads = hp_.heads;
  self.causal = true;
  self.segments.push_back({0, T, 0, T});
  AttentionSpec cross;
  cross.heads = hp_.heads;
  cross.segments.push_back({0, T, 0, m});
  cross.key_mask = source.pad;
  for (std::size_t l = 0; l < hp_.layers; ++l) {
    const std::string p = "dec." + std::to_string(l);
    x = add_norm(tape, p + ".ln1", x, attention_block(tape, p + ".self", x, x, self), dropout);
    x = add_norm(tape, p + ".ln2", x, attention_block(tape, p + ".cross", x, memory, cross), dropout);
    x = add_norm(tape, p + ".ln3", x, feed_forward(tape, p + ".ff", x, dropout), dropout);
  }
  out.states = x;

  Var scores = tape.scale(tape.matmul_nt(x, memory), 1.0 / sqrt_d);
  bool any_pad = false;
  for (char c : source.pad) any_pad = any_pad || c;
  if (any_pad) {
    Mat mask = Mat::Zero(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j)
      if (source.pad[j]) mask.col(static_cast<Eigen::Index>(j)).setConstant(-std::numeric_limits<double>::infinity());
    scores = tape.add(scores, tape.constant(std::move(mask)));
  }
  out.attention = tape.softmax_rows(scores);
  out.context = tape.matmul(out.attention, memory);

  Var hidden = tape.add_row(tape.matmul(tape.concat_cols(x, out.context), tape.param("out.V")),
                            tape.param("out.b"));
  Var logits = tape.add_row(tape.matmul(hidden, tape.param("out.Vp")), tape.param("out.bp"));
  out.p_vocab = tape.softmax_rows(logits);

  if (force_pgen) {
    out.p_gen = tape.constant(Mat::Constant(static_cast<Eigen::Index>(T), 1, *force_pgen));
  } else {
    Var gate = tape.add(tape.add(tape.matmul(out.context, tape.param("ptr.w_h")),
                                 tape.matmul(x, tape.param("ptr.w_s"))),
                        tape.matmul(out.inputs, tape.param("ptr.w_x")));
    out.p_gen = tape.sigmoid(tape.add_row(gate, tape.param("ptr.b")));
  }

  const std::size_t E = copy.extended_size();
  Mat scatter = Mat::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(E));
  for (std::size_t j = 0; j < m; ++j)
    if (source.pad.empty() || !source.pad[j]) scatter(static_cast<Eigen::Index>(j), copy.source_ids[j]) = 1.0;
  Var copied = tape.matmul(out.attention, tape.constant(std::move(scatter)));
  Var generated = tape.pad_cols(out.p_vocab, E);
  out.p_ext = tape.add(tape.mul_col(generated, out.p_gen), tape.mul_col(copied, tape.one_minus(out.p_gen)));
  return out;
}

LossTerms Model::loss(Tape& tape, const PreparedExample& ex, Rng* dropout) const {
  Encoded enc = encode(tape, ex.lines, dropout);
  Var logits = localizer_logits(tape, enc);
  LossTerms terms;
  terms.loc = tape.mean_neg_pick(tape.log_softmax_rows(logits), {static_cast<int>(ex.error_index)});
  Var memory = line_states(tape, enc, ex.error_index);
  std::vector<int> inputs{Vocabulary::kBos};
  inputs.insert(inputs.end(), ex.target.begin(), ex.target.end() - 1);
  for (int& id : inputs)
    if (id < 0) id = Vocabulary::kUnk;
  DecoderOutputs dec = decode(tape, memory, ex.lines[ex.error_index], ex.copy, inputs, dropout);
  terms.gen = tape.mean_neg_log_pick(dec.p_ext, ex.target, 1e-10);
  terms.total = tape.add(terms.loc, terms.gen);
  return terms;
}

Eigen::VectorXd Model::localize(const std::vector<EncoderInput>& lines) const {
  Tape tape(&params_);
  Encoded enc = encode(tape, lines);
  Var p = tape.softmax_rows(localizer_logits(tape, enc));
  return tape.value(p).row(0).transpose();
}

DecodeStep Model::decode_step(const Mat& memory, const EncoderInput& source, const CopyMap& copy,
                              const std::vector<int>& prefix, std::optional<double> force_pgen) const {
  Tape tape(&params_);
  std::vector<int> inputs{Vocabulary::kBos};
  inputs.insert(inputs.end(), prefix.begin(), prefix.end());
  DecoderOutputs out = decode(tape, tape.constant(memory), source, copy, inputs, nullptr, force_pgen);
  const Eigen::Index last = static_cast<Eigen::Index>(inputs.size()) - 1;
  DecodeStep step;
  step.attention = tape.value(out.attention).row(last).transpose();
  step.context = tape.value(out.context).row(last).transpose();
  step.p_vocab = tape.value(out.p_vocab).row(last).transpose();
  step.p_gen = tape.value(out.p_gen)(last, 0);
  step.p_ext = tape.value(out.p_ext).row(last).transpose();
  return step;
}

}  // namespace crepair::nn
