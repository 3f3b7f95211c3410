#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crepair/nn/autodiff.hpp"
#include "crepair/nn/config.hpp"
#include "crepair/nn/features.hpp"
#include "crepair/nn/vocab.hpp"

namespace crepair::nn {

struct EncoderInput {
  std::vector<int> ids;
  std::vector<std::string> source_tokens;
  int offset = 0;
  // Positions excluded as attention keys and copy sources.
  std::vector<char> pad;
};

EncoderInput make_encoder_input(const LineSequence& seq, const Vocabulary& vocab);

// Extended vocabulary of one source sequence: in-vocabulary tokens keep their
// ids, source OOV tokens get vocab.size() + k in order of first appearance.
struct CopyMap {
  std::vector<int> source_ids;  // extended id per source position
  std::vector<std::string> oov;
  std::size_t vocab_size = 0;

  std::size_t extended_size() const { return vocab_size + oov.size(); }
  // Extended id of a token, or -1 when it is neither in vocab nor copyable.
  int id(const std::string& token, const Vocabulary& vocab) const;
  std::string token(int id, const Vocabulary& vocab) const;
};

CopyMap make_copy_map(const EncoderInput& source, const Vocabulary& vocab);

// An Example resolved against a vocabulary.
struct PreparedExample {
  std::string id;
  std::vector<EncoderInput> lines;
  std::size_t error_index = 0;  // 0-based
  CopyMap copy;
  std::vector<int> target;  // extended ids ending in EOS; -1 = not producible
  std::vector<std::string> target_tokens;
  IdMap id_map;  // placeholders of the paired diagnostic
  bool uncopyable = false;
};

PreparedExample prepare_example(const Example& example, const Vocabulary& vocab,
                                const HyperParams& hp);

std::vector<PreparedExample> prepare_examples(const std::vector<Example>& examples,
                                              const Vocabulary& vocab, const HyperParams& hp);

// Vocabulary over the examples' error-line inputs and targets, honouring
// min_token_count and max_vocab.
Vocabulary build_vocabulary(const std::vector<Example>& examples, const HyperParams& hp);

struct Encoded {
  Var states;  // all sequences packed row-wise
  std::vector<std::size_t> begin;
  std::vector<std::size_t> length;
};

struct DecoderOutputs {
  Var attention;  // T x m, pointer attention a^t per row
  Var context;    // T x d, h*_t
  Var states;     // T x d, s_t
  Var inputs;     // T x d, x_t
  Var p_vocab;    // T x |V|
  Var p_gen;      // T x 1
  Var p_ext;      // T x extended
};

struct LossTerms {
  Var loc;
  Var gen;
  Var total;
};

// Last-row view of a decoder pass, for step-wise decoding and inspection.
struct DecodeStep {
  Eigen::VectorXd attention;
  Eigen::VectorXd context;
  Eigen::VectorXd p_vocab;
  double p_gen = 0.0;
  Eigen::VectorXd p_ext;
};

class Model {
 public:
  Model(HyperParams hp, Vocabulary vocab, std::uint64_t seed);
  // For loading: parameters must match the layout the constructor creates.
  Model(HyperParams hp, Vocabulary vocab, ParameterStore params);

  const HyperParams& hyper_params() const { return hp_; }
  const Vocabulary& vocab() const { return vocab_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  Encoded encode(Tape& tape, const std::vector<EncoderInput>& lines, Rng* dropout = nullptr) const;
  Var line_states(Tape& tape, const Encoded& encoded, std::size_t index) const;
  Var localizer_logits(Tape& tape, const Encoded& encoded) const;  // 1 x n

  // Teacher-forced decoder over `inputs` (extended ids; the first is BOS).
  DecoderOutputs decode(Tape& tape, Var memory, const EncoderInput& source, const CopyMap& copy,
                        const std::vector<int>& inputs, Rng* dropout = nullptr,
                        std::optional<double> force_pgen = std::nullopt) const;

  LossTerms loss(Tape& tape, const PreparedExample& example, Rng* dropout = nullptr) const;

  // Localizer distribution over the lines of one program.
  Eigen::VectorXd localize(const std::vector<EncoderInput>& lines) const;

  // Distribution for the token after `prefix` given a fixed memory.
  DecodeStep decode_step(const Mat& memory, const EncoderInput& source, const CopyMap& copy,
                         const std::vector<int>& prefix,
                         std::optional<double> force_pgen = std::nullopt) const;

 private:
  void init_parameters(std::uint64_t seed);
  Var embed(Tape& tape, const std::vector<int>& ids) const;
  Var attention_block(Tape& tape, const std::string& prefix, Var query_in, Var key_in,
                      const AttentionSpec& spec) const;
  Var feed_forward(Tape& tape, const std::string& prefix, Var x, Rng* dropout) const;
  Var add_norm(Tape& tape, const std::string& prefix, Var x, Var sub, Rng* dropout) const;

  HyperParams hp_;
  Vocabulary vocab_;
  ParameterStore params_;
};

// Sinusoidal position encoding, rows 0..n-1.
Mat sinusoidal_positions(std::size_t n, std::size_t d);

}  // namespace crepair::nn
