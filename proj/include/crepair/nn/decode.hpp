#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "crepair/nn/model.hpp"

namespace crepair::nn {

// Log-probabilities of the next token given the tokens emitted so far.
using StepScorer = std::function<Eigen::VectorXd(const std::vector<int>& prefix)>;

struct Hypothesis {
  std::vector<int> ids;  // without the terminating EOS
  double log_prob = 0.0;
  bool terminated = false;  // ended with EOS rather than at the length bound
};

// Length-bounded beam search. At most `max_len` tokens are emitted, EOS
// included. Results are sorted by total log-probability, ties broken by
// lexicographically smaller id sequence.
std::vector<Hypothesis> beam_search(const StepScorer& scorer, std::size_t beam, std::size_t max_len,
                                    int eos);

// Argmax at every step, ties to the lowest id.
Hypothesis greedy_search(const StepScorer& scorer, std::size_t max_len, int eos);

// Scorer over the extended vocabulary of `source`, with `memory` the encoder
// states of that line.
StepScorer model_scorer(const Model& model, const Mat& memory, const EncoderInput& source,
                        const CopyMap& copy);

// Encoder states of line `index` when the whole program is encoded.
Mat encode_line(const Model& model, const std::vector<EncoderInput>& lines, std::size_t index);

// Token texts of a hypothesis. Copied OOV ids resolve through the copy map
// and placeholders known to `id_map` are replaced by their identifiers.
std::vector<std::string> hypothesis_tokens(const Hypothesis& h, const CopyMap& copy,
                                           const Vocabulary& vocab, const IdMap& id_map = {});

// Fraction of examples whose top-k decoded line (true error line given)
// equals the target, for each k in `ks`. Candidates come from one beam of
// width `beam` (0 = the widest k); width 1 is greedy decoding.
std::vector<double> top_k_accuracy(const Model& model, const std::vector<PreparedExample>& examples,
                                   const std::vector<std::size_t>& ks, std::size_t beam = 0);

}  // namespace crepair::nn
