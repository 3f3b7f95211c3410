#include "crepair/nn/decode.hpp"

#include <algorithm>
#include <cmath>

namespace crepair::nn {

namespace {

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.ids < b.ids;
}

}  // namespace

std::vector<Hypothesis> beam_search(const StepScorer& scorer, std::size_t beam, std::size_t max_len,
                                    int eos) {
  beam = std::max<std::size_t>(beam, 1);
  std::vector<Hypothesis> alive{Hypothesis{}};
  std::vector<Hypothesis> finished;
  for (std::size_t step = 0; step < max_len && !alive.empty(); ++step) {
    std::vector<Hypothesis> pool;
    for (const auto& h : alive) {
      const Eigen::VectorXd logp = scorer(h.ids);
      for (Eigen::Index id = 0; id < logp.size(); ++id) {
        if (!std::isfinite(logp(id))) continue;
        Hypothesis next = h;
        next.log_prob += logp(id);
        next.ids.push_back(static_cast<int>(id));
        next.terminated = static_cast<int>(id) == eos;
        pool.push_back(std::move(next));
      }
    }
    const std::size_t keep = std::min(beam, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<long>(keep), pool.end(), better);
    pool.resize(keep);
    alive.clear();
    for (auto& h : pool) (h.terminated ? finished : alive).push_back(std::move(h));
    if (step + 1 == max_len)
      for (auto& h : alive) finished.push_back(std::move(h));
    std::sort(finished.begin(), finished.end(), better);
    if (finished.size() > beam) finished.resize(beam);
    // Log-probabilities only fall as hypotheses grow.
    if (finished.size() == beam && !alive.empty()) {
      const double best_alive = std::max_element(alive.begin(), alive.end(), better)->log_prob;
      if (best_alive < finished.back().log_prob) break;
    }
  }
  for (auto& h : finished)
    if (h.terminated) h.ids.pop_back();
  return finished;
}

Hypothesis greedy_search(const StepScorer& scorer, std::size_t max_len, int eos) {
  Hypothesis h;
  for (std::size_t step = 0; step < max_len; ++step) {
    const Eigen::VectorXd logp = scorer(h.ids);
    Eigen::Index best = 0;
    for (Eigen::Index id = 1; id < logp.size(); ++id)
      if (logp(id) > logp(best)) best = id;
    h.log_prob += logp(best);
    if (static_cast<int>(best) == eos) {
      h.terminated = true;
      break;
    }
    h.ids.push_back(static_cast<int>(best));
  }
  return h;
}

StepScorer model_scorer(const Model& model, const Mat& memory, const EncoderInput& source,
                        const CopyMap& copy) {
  return [&model, memory, source, copy](const std::vector<int>& prefix) {
    Eigen::VectorXd p = model.decode_step(memory, source, copy, prefix).p_ext;
    return Eigen::VectorXd(p.array().log());
  };
}

Mat encode_line(const Model& model, const std::vector<EncoderInput>& lines, std::size_t index) {
  Tape tape(&model.params());
  Encoded enc = model.encode(tape, lines);
  return tape.value(enc.states).middleRows(static_cast<Eigen::Index>(enc.begin.at(index)),
                                           static_cast<Eigen::Index>(enc.length.at(index)));
}

std::vector<std::string> hypothesis_tokens(const Hypothesis& h, const CopyMap& copy,
                                           const Vocabulary& vocab, const IdMap& id_map) {
  std::vector<std::string> out;
  out.reserve(h.ids.size());
  for (int id : h.ids) {
    std::string token = copy.token(id, vocab);
    if (is_placeholder(token))
      for (const auto& [placeholder, original] : id_map)
        if (placeholder == token) token = original;
    out.push_back(std::move(token));
  }
  return out;
}

std::vector<double> top_k_accuracy(const Model& model, const std::vector<PreparedExample>& examples,
                                   const std::vector<std::size_t>& ks, std::size_t beam) {
  std::vector<double> hits(ks.size(), 0.0);
  if (examples.empty()) return hits;
  const std::size_t widest = beam ? beam : ks.empty() ? 1 : *std::max_element(ks.begin(), ks.end());
  for (const auto& ex : examples) {
    const Mat memory = encode_line(model, ex.lines, ex.error_index);
    const auto& source = ex.lines[ex.error_index];
    auto scorer = model_scorer(model, memory, source, ex.copy);
    std::vector<Hypothesis> found;
    if (widest == 1) found.push_back(greedy_search(scorer, model.hyper_params().max_target_len, Vocabulary::kEos));
    else found = beam_search(scorer, widest, model.hyper_params().max_target_len, Vocabulary::kEos);
    std::size_t first_match = found.size();
    for (std::size_t r = 0; r < found.size(); ++r)
      if (hypothesis_tokens(found[r], ex.copy, model.vocab(), ex.id_map) == ex.target_tokens) {
        first_match = r;
        break;
      }
    for (std::size_t i = 0; i < ks.size(); ++i)
      if (first_match < ks[i]) hits[i] += 1.0;
  }
  for (double& h : hits) h /= static_cast<double>(examples.size());
  return hits;
}

}  // namespace crepair::nn
