#include "crepair/nn/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "crepair/error.hpp"
#include "crepair/io.hpp"
#include "crepair/nn/decode.hpp"

namespace crepair::nn {

void Adam::step(ParameterStore& params, const GradStore& grads) {
  if (m_.size() != params.size()) {
    m_.assign(params.size(), Mat());
    v_.assign(params.size(), Mat());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = Mat::Zero(params.value(i).rows(), params.value(i).cols());
      v_[i] = m_[i];
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads.has(i)) {
      m_[i] *= beta1_;
      v_[i] *= beta2_;
    } else {
      const Mat& g = grads.grad(i);
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    }
    params.value(i).array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

void Adam::restore(std::uint64_t t, std::vector<Mat> m, std::vector<Mat> v) {
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

double clip_global_norm(GradStore& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (max_norm > 0.0 && norm > max_norm) grads.scale(max_norm / norm);
  return norm;
}

namespace {

struct ExampleResult {
  GradStore grads;
  double loc = 0.0, gen = 0.0, total = 0.0;
};

ExampleResult differentiate(const Model& model, const PreparedExample& ex, std::uint64_t dropout_seed) {
  ExampleResult r;
  r.grads.resize(model.params().size());
  Tape tape(&model.params(), &r.grads);
  std::optional<Rng> rng;
  if (dropout_seed != 0 && model.hyper_params().dropout > 0.0) rng.emplace(dropout_seed);
  LossTerms terms = model.loss(tape, ex, rng ? &*rng : nullptr);
  r.loc = tape.scalar(terms.loc);
  r.gen = tape.scalar(terms.gen);
  r.total = tape.scalar(terms.total);
  if (!std::isfinite(r.total))
    throw Error(ErrorCode::NonFiniteLoss, "non-finite loss on " + ex.id,
                {{"example", ex.id}, {"L_loc", r.loc}, {"L_gen", r.gen}});
  tape.backward(terms.total);
  return r;
}

}  // namespace

LossRecord batch_gradient(const Model& model, const std::vector<const PreparedExample*>& batch,
                          GradStore& grads, std::uint64_t dropout_seed, std::size_t threads) {
  grads.resize(model.params().size());
  grads.clear();
  LossRecord rec;
  if (batch.empty()) return rec;
  std::vector<ExampleResult> results(batch.size());
  auto run = [&](std::size_t i) {
    const std::uint64_t seed = dropout_seed ? derive_seed(dropout_seed, "example", i) : 0;
    results[i] = differentiate(model, *batch[i], seed);
  };
  threads = std::max<std::size_t>(1, std::min(threads, batch.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) run(i);
  } else {
    std::vector<std::exception_ptr> errors(batch.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < batch.size(); i += threads) {
          try {
            run(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (const auto& r : results) {
    grads.add(r.grads);
    rec.loc += r.loc;
    rec.gen += r.gen;
    rec.total += r.total;
  }
  const double n = static_cast<double>(batch.size());
  grads.scale(1.0 / n);
  rec.loc /= n;
  rec.gen /= n;
  rec.total /= n;
  return rec;
}

LossRecord evaluate_loss(const Model& model, const std::vector<PreparedExample>& examples) {
  LossRecord rec;
  for (const auto& ex : examples) {
    Tape tape(&model.params());
    LossTerms terms = model.loss(tape, ex);
    rec.loc += tape.scalar(terms.loc);
    rec.gen += tape.scalar(terms.gen);
    rec.total += tape.scalar(terms.total);
  }
  if (!examples.empty()) {
    const double n = static_cast<double>(examples.size());
    rec.loc /= n;
    rec.gen /= n;
    rec.total /= n;
  }
  return rec;
}

nlohmann::ordered_json to_json(const TrainState& state) {
  return {{"seed", state.seed}, {"epoch", state.epoch}, {"step", state.step}};
}

TrainState train_state_from_json(const nlohmann::json& j) {
  TrainState s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.epoch = j.at("epoch").get<std::size_t>();
  s.step = j.at("step").get<std::size_t>();
  return s;
}

Trainer::Trainer(Model& model, TrainOptions options)
    : model_(model), options_(std::move(options)), adam_(model.hyper_params().lr) {
  state_.seed = options_.seed;
}

TrainResult Trainer::run(const std::vector<PreparedExample>& train,
                         const std::vector<PreparedExample>& validation) {
  if (train.empty()) throw Error(ErrorCode::EmptyCorpus, "no training examples");
  const HyperParams& hp = model_.hyper_params();
  TrainResult result;
  GradStore grads(model_.params().size());
  std::optional<ParameterStore> best;
  double best_accuracy = -1.0;
  const std::size_t last_epoch = state_.epoch + options_.epochs;
  while (state_.epoch < last_epoch) {
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle(derive_seed(state_.seed, "shuffle", state_.epoch));
    shuffle.shuffle(order);
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      std::vector<const PreparedExample*> batch;
      for (std::size_t i = start; i < std::min(order.size(), start + hp.batch_size); ++i)
        batch.push_back(&train[order[i]]);
      LossRecord rec;
      try {
        rec = batch_gradient(model_, batch, grads, derive_seed(state_.seed, "dropout", state_.step),
                             options_.threads);
      } catch (Error& e) {
        if (e.code() != ErrorCode::NonFiniteLoss) throw;
        nlohmann::json details = e.details();
        details["step"] = state_.step;
        details["epoch"] = state_.epoch;
        throw Error(ErrorCode::NonFiniteLoss, std::string(e.what()) + " at step " + std::to_string(state_.step),
                    details);
      }
      clip_global_norm(grads, hp.grad_clip);
      adam_.step(model_.params(), grads);
      rec.step = state_.step++;
      epoch_total += rec.total * static_cast<double>(batch.size());
      result.trace.push_back(rec);
    }
    EpochSummary summary;
    summary.epoch = state_.epoch++;
    summary.mean_total = epoch_total / static_cast<double>(train.size());
    const bool measure = options_.accuracy_every > 0 && state_.epoch % options_.accuracy_every == 0;
    if (measure) summary.train_accuracy = top_k_accuracy(model_, train, {1}, options_.accuracy_beam)[0];
    if (!validation.empty()) {
      summary.validation_accuracy = top_k_accuracy(model_, validation, {1}, options_.accuracy_beam)[0];
      if (options_.keep_best_validation && *summary.validation_accuracy >= best_accuracy) {
        best_accuracy = *summary.validation_accuracy;
        best = model_.params();
        result.best_epoch = summary.epoch;
      }
    }
    result.epochs.push_back(summary);
    if (options_.on_epoch) options_.on_epoch(summary);
    if (options_.stop_at_train_accuracy > 0.0 && summary.train_accuracy &&
        *summary.train_accuracy >= options_.stop_at_train_accuracy) {
      result.stopped_early = true;
      break;
    }
  }
  if (best) model_.params() = std::move(*best);
  return result;
}

void write_loss_trace(const std::filesystem::path& path, const std::vector<LossRecord>& trace) {
  AtomicFile file(path);
  auto& out = file.stream();
  out << "# format_version: 1\nstep,L_loc,L_gen,total\n" << std::setprecision(17);
  for (const auto& r : trace) out << r.step << ',' << r.loc << ',' << r.gen << ',' << r.total << '\n';
  file.commit();
}

std::vector<LossRecord> read_loss_trace(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<LossRecord> trace;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line != "# format_version: 1")
        throw Error(ErrorCode::UnsupportedVersion, "unsupported loss trace version", {{"line", line}});
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    LossRecord r;
    char comma;
    std::istringstream row(line);
    if (!(row >> r.step >> comma >> r.loc >> comma >> r.gen >> comma >> r.total))
      throw Error(ErrorCode::InvalidInput, "malformed loss trace row", {{"line", line}});
    trace.push_back(r);
  }
  return trace;
}

}  // namespace crepair::nn
