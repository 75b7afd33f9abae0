#include "gecqe/training.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numeric>

#include "gecqe/errors.hpp"
#include "gecqe/random.hpp"

namespace gecqe {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive and finite");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
}

namespace {

void check_ged_head(const EncoderCheckpoint& checkpoint) {
  if (!checkpoint.ged_head) throw StructuralError("checkpoint has no GED head");
}

// Reduces per-example gradients and losses in index order.
LossAndGradient reduce(const EncoderCheckpoint& checkpoint, std::vector<ExampleGradient>& grads,
                       const std::vector<double>& losses, double scale) {
  LossAndGradient out;
  out.gradient = Gradient::zeros_like(checkpoint);
  const ParameterLayout layout = checkpoint.layout();
  for (std::size_t i = 0; i < grads.size(); ++i) {
    accumulate(out.gradient, grads[i], layout);
    out.loss += losses[i];
  }
  out.loss *= scale;
  if (!std::isfinite(out.loss)) throw TrainingError("non-finite loss");
  return out;
}

}  // namespace

LossAndGradient ged_loss(const EncoderCheckpoint& checkpoint, std::span<const LabeledSentence> batch,
                         Exec exec) {
  check_ged_head(checkpoint);
  const GedHead& head = *checkpoint.ged_head;
  const std::size_t dim = checkpoint.config.dim;
  std::size_t sentences = 0;
  for (const auto& s : batch) {
    if (s.tokens.size() != s.labels.size()) {
      throw StructuralError("labeled sentence has " + std::to_string(s.tokens.size()) + " tokens and " +
                            std::to_string(s.labels.size()) + " labels");
    }
    for (auto l : s.labels)
      if (l >= head.num_labels) throw StructuralError("label index outside the GED head");
    if (!s.tokens.empty()) ++sentences;
  }
  if (sentences == 0) throw StructuralError("GED batch has no tokens");
  const double inv_batch = 1.0 / static_cast<double>(sentences);

  std::vector<ExampleGradient> grads(batch.size());
  std::vector<double> losses(batch.size(), 0.0);
  for_each_index(batch.size(), exec, [&](std::size_t b) {
    const LabeledSentence& s = batch[b];
    ExampleGradient& g = grads[b];
    g = ExampleGradient::zeros_like(checkpoint);
    if (s.tokens.empty()) return;
    const ForwardPass pass = forward(checkpoint, s.tokens);
    const std::vector<double>& h = pass.states.back();
    const std::size_t n = pass.count;
    const double scale = inv_batch / static_cast<double>(n);
    std::vector<double> state_grad(n * dim, 0.0);
    std::vector<double> logits(head.num_labels);
    double nll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* hi = h.data() + i * dim;
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < head.num_labels; ++k) {
        double z = head.bias[k];
        const double* wk = head.weight.data() + k * dim;
        for (std::size_t d = 0; d < dim; ++d) z += wk[d] * hi[d];
        logits[k] = z;
        peak = std::max(peak, z);
      }
      double total = 0.0;
      for (double z : logits) total += std::exp(z - peak);
      const double log_norm = peak + std::log(total);
      nll += log_norm - logits[s.labels[i]];
      double* gi = state_grad.data() + i * dim;
      for (std::size_t k = 0; k < head.num_labels; ++k) {
        const double dlogit = (std::exp(logits[k] - log_norm) - (k == s.labels[i] ? 1.0 : 0.0)) * scale;
        g.ged_bias[k] += dlogit;
        double* gw = g.ged_weight.data() + k * dim;
        const double* wk = head.weight.data() + k * dim;
        for (std::size_t d = 0; d < dim; ++d) {
          gw[d] += dlogit * hi[d];
          gi[d] += dlogit * wk[d];
        }
      }
    }
    losses[b] = nll / static_cast<double>(n);
    backward(checkpoint, pass, state_grad, g);
  });
  return reduce(checkpoint, grads, losses, inv_batch);
}

LossAndGradient qe_loss(const EncoderCheckpoint& checkpoint, std::span<const PairExample> batch,
                        Exec exec) {
  if (!checkpoint.qe_head) throw StructuralError("checkpoint has no QE head");
  if (batch.empty()) throw StructuralError("QE batch is empty");
  const QeHead& head = *checkpoint.qe_head;
  const std::size_t dim = checkpoint.config.dim;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  std::vector<ExampleGradient> grads(batch.size());
  std::vector<double> losses(batch.size(), 0.0);
  for_each_index(batch.size(), exec, [&](std::size_t b) {
    const PairExample& p = batch[b];
    ExampleGradient& g = grads[b];
    g = ExampleGradient::zeros_like(checkpoint);
    const ForwardPass plus = forward(checkpoint, p.s_plus);
    const ForwardPass minus = forward(checkpoint, p.s_minus);

    auto pooled = [dim](const ForwardPass& pass) {
      std::vector<double> out(dim, 0.0);
      if (pass.count == 0) return out;
      const std::vector<double>& h = pass.states.back();
      for (std::size_t i = 0; i < pass.count; ++i)
        for (std::size_t d = 0; d < dim; ++d) out[d] += h[i * dim + d];
      for (double& v : out) v /= static_cast<double>(pass.count);
      return out;
    };
    const std::vector<double> pp = pooled(plus);
    const std::vector<double> pm = pooled(minus);
    double r_plus = head.bias, r_minus = head.bias;
    for (std::size_t d = 0; d < dim; ++d) {
      r_plus += head.weight[d] * pp[d];
      r_minus += head.weight[d] * pm[d];
    }
    const double s = sigmoid(r_minus - r_plus);
    losses[b] = s;
    // d loss / d R(s_minus); d loss / d R(s_plus) is its negative.
    const double gm = s * (1.0 - s) * inv_batch;
    for (std::size_t d = 0; d < dim; ++d) g.qe_weight[d] += gm * (pm[d] - pp[d]);

    auto push_back = [&](const ForwardPass& pass, double sign) {
      if (pass.count == 0) return;
      std::vector<double> state_grad(pass.count * dim);
      const double per_token = sign * gm / static_cast<double>(pass.count);
      for (std::size_t i = 0; i < pass.count; ++i)
        for (std::size_t d = 0; d < dim; ++d) state_grad[i * dim + d] = per_token * head.weight[d];
      backward(checkpoint, pass, state_grad, g);
    };
    push_back(plus, -1.0);
    push_back(minus, 1.0);
  });
  return reduce(checkpoint, grads, losses, inv_batch);
}

std::string_view ged_metric_name(GedDevMetric metric) {
  switch (metric) {
    case GedDevMetric::f05: return "f0.5";
    case GedDevMetric::accuracy: return "accuracy";
    case GedDevMetric::macro_f1: return "macro_f1";
  }
  return "f0.5";
}

GedDevMetric parse_ged_metric(std::string_view text) {
  for (auto m : {GedDevMetric::f05, GedDevMetric::accuracy, GedDevMetric::macro_f1}) {
    if (ged_metric_name(m) == text) return m;
  }
  if (text == "f05") return GedDevMetric::f05;
  throw ConfigError("unknown GED dev metric '" + std::string(text) + "'");
}

double GedEvaluation::get(GedDevMetric metric) const {
  switch (metric) {
    case GedDevMetric::f05: return f05;
    case GedDevMetric::accuracy: return accuracy;
    case GedDevMetric::macro_f1: return macro_f1;
  }
  return f05;
}

GedEvaluation evaluate_ged(const EncoderCheckpoint& checkpoint,
                           std::span<const LabeledSentence> sentences, Exec exec) {
  check_ged_head(checkpoint);
  const Taxonomy& taxonomy = Taxonomy::get(checkpoint.ged_head->taxonomy);
  std::vector<std::vector<std::size_t>> predicted(sentences.size());
  for_each_index(sentences.size(), exec, [&](std::size_t s) {
    const auto probs = ged_probabilities(checkpoint, sentences[s].tokens, taxonomy);
    for (const auto& row : probs) {
      predicted[s].push_back(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()));
    }
  });

  const std::size_t labels = taxonomy.size();
  std::vector<std::size_t> tp(labels, 0), fp(labels, 0), fn(labels, 0);
  std::size_t correct = 0, total = 0;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& gold = sentences[s].labels;
    if (gold.size() != predicted[s].size()) throw StructuralError("labeled sentence has mismatched lengths");
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const std::size_t g = gold[i], p = predicted[s][i];
      if (g >= labels) throw StructuralError("gold label outside the taxonomy");
      ++total;
      if (g == p) {
        ++correct;
        if (g != 0) ++tp[g];
        continue;
      }
      if (p != 0) ++fp[p];
      if (g != 0) ++fn[g];
    }
  }

  GedEvaluation out;
  out.accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 1.0;
  std::size_t TP = 0, FP = 0, FN = 0;
  double f1_sum = 0.0;
  std::size_t f1_count = 0;
  for (std::size_t k = 1; k < labels; ++k) {
    TP += tp[k];
    FP += fp[k];
    FN += fn[k];
    const std::size_t seen = tp[k] + fp[k] + fn[k];
    if (seen == 0) continue;
    f1_sum += 2.0 * static_cast<double>(tp[k]) / static_cast<double>(2 * tp[k] + fp[k] + fn[k]);
    ++f1_count;
  }
  out.macro_f1 = f1_count ? f1_sum / static_cast<double>(f1_count) : 1.0;
  if (TP + FP + FN == 0) {
    out.f05 = 1.0;
  } else {
    const double precision = TP + FP ? static_cast<double>(TP) / static_cast<double>(TP + FP) : 0.0;
    const double recall = TP + FN ? static_cast<double>(TP) / static_cast<double>(TP + FN) : 0.0;
    const double denom = 0.25 * precision + recall;
    out.f05 = denom > 0.0 ? 1.25 * precision * recall / denom : 0.0;
  }
  return out;
}

double ranking_accuracy(const EncoderCheckpoint& checkpoint, std::span<const PairExample> pairs,
                        Exec exec) {
  if (pairs.empty()) throw StructuralError("ranking accuracy of an empty pair set");
  if (!checkpoint.qe_head) throw StructuralError("checkpoint has no QE head");
  std::vector<char> ok(pairs.size(), 0);
  for_each_index(pairs.size(), exec, [&](std::size_t i) {
    ok[i] = qe_score(checkpoint, pairs[i].s_plus) > qe_score(checkpoint, pairs[i].s_minus);
  });
  const auto hits = std::count(ok.begin(), ok.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

std::string serialize_log(const std::vector<EpochLog>& log) {
  std::string out;
  for (const auto& e : log) {
    nlohmann::json j = {{"epoch", e.epoch}, {"train_loss", e.train_loss}};
    if (std::isfinite(e.dev_metric)) {
      j["dev_metric"] = e.dev_metric;
    } else {
      j["dev_metric"] = nullptr;
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

template <class Example, class LossFn, class EvalFn>
TrainResult train_loop(EncoderCheckpoint checkpoint, const TrainConfig& config,
                       std::span<const Example> train, LossFn&& loss_fn, EvalFn&& eval_fn) {
  TrainResult result;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(train.size());
  std::vector<Example> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, epoch));
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      StepRecord step{epoch, {order.begin() + static_cast<std::ptrdiff_t>(start),
                              order.begin() + static_cast<std::ptrdiff_t>(stop)},
                      config.learning_rate};
      batch.clear();
      for (auto i : step.batch) batch.push_back(train[i]);
      const LossAndGradient lg = loss_fn(checkpoint, std::span<const Example>(batch));
      apply_gradient_step(checkpoint, lg.gradient, config.learning_rate);
      loss_sum += lg.loss * static_cast<double>(batch.size());
      result.steps.push_back(std::move(step));
    }
    EpochLog entry{epoch, loss_sum / static_cast<double>(train.size()),
                   std::numeric_limits<double>::quiet_NaN()};
    if (config.eval_every || epoch == config.epochs) {
      entry.dev_metric = eval_fn(checkpoint);
      if (entry.dev_metric > best) {
        best = entry.dev_metric;
        result.checkpoint = checkpoint;
        result.selected_epoch = epoch;
      }
    }
    result.log.push_back(entry);
  }
  if (result.selected_epoch == 0) {
    // Every evaluation was NaN; keep the final epoch.
    result.checkpoint = checkpoint;
    result.selected_epoch = config.epochs;
  }
  return result;
}

EncoderCheckpoint prepare_qe(const EncoderCheckpoint& ged_checkpoint) {
  EncoderCheckpoint ck = ged_checkpoint;
  ck.parent_hash = content_hash(ged_checkpoint);
  ck.ged_head.reset();
  ck.add_qe_head();
  return ck;
}

}  // namespace

TrainResult train_ged(const EncoderCheckpoint& initial, const TrainConfig& config,
                      TaxonomyName taxonomy, std::span<const LabeledSentence> train,
                      std::span<const LabeledSentence> dev, GedDevMetric metric, Exec exec) {
  config.validate();
  if (train.empty() || dev.empty()) throw StructuralError("GED training needs non-empty train and dev sets");
  EncoderCheckpoint ck = initial;
  if (!ck.ged_head || ck.ged_head->taxonomy != taxonomy) ck.add_ged_head(taxonomy);
  ck.qe_head.reset();
  return train_loop<LabeledSentence>(
      std::move(ck), config, train,
      [exec](const EncoderCheckpoint& c, std::span<const LabeledSentence> b) { return ged_loss(c, b, exec); },
      [&](const EncoderCheckpoint& c) { return evaluate_ged(c, dev, exec).get(metric); });
}

TrainResult train_qe(const EncoderCheckpoint& ged_checkpoint, const TrainConfig& config,
                     std::span<const PairExample> train, std::span<const PairExample> dev,
                     Exec exec) {
  config.validate();
  if (train.empty() || dev.empty()) throw StructuralError("QE training needs non-empty train and dev pair sets");
  return train_loop<PairExample>(
      prepare_qe(ged_checkpoint), config, train,
      [exec](const EncoderCheckpoint& c, std::span<const PairExample> b) { return qe_loss(c, b, exec); },
      [&](const EncoderCheckpoint& c) { return ranking_accuracy(c, dev, exec); });
}

EncoderCheckpoint replay_qe_steps(const EncoderCheckpoint& ged_checkpoint,
                                  std::span<const PairExample> train,
                                  std::span<const StepRecord> steps, std::size_t through_epoch,
                                  Exec exec) {
  EncoderCheckpoint ck = prepare_qe(ged_checkpoint);
  std::vector<PairExample> batch;
  for (const auto& step : steps) {
    if (step.epoch > through_epoch) break;
    batch.clear();
    for (auto i : step.batch) {
      if (i >= train.size()) throw StructuralError("step refers to a pair outside the training set");
      batch.push_back(train[i]);
    }
    const LossAndGradient lg = qe_loss(ck, batch, exec);
    apply_gradient_step(ck, lg.gradient, step.learning_rate);
  }
  return ck;
}

std::size_t epochs_to_reach(const std::vector<EpochLog>& log, double threshold) {
  for (const auto& e : log)
    if (e.dev_metric >= threshold) return e.epoch;
  return 0;
}

SelectionProtocol SelectionProtocol::with_n_seeds(std::size_t n, std::uint64_t first) {
  if (n < 1) throw ConfigError("at least one seed is required");
  SelectionProtocol p;
  p.seeds.clear();
  for (std::size_t i = 0; i < n; ++i) p.seeds.push_back(first + i);
  return p;
}

SelectionResult select_over_seeds(const SelectionProtocol& protocol,
                                  const std::function<SeedRun(std::uint64_t)>& train_fn, Exec exec) {
  if (protocol.seeds.empty()) throw ConfigError("at least one seed is required");
  SelectionResult result;
  result.runs.resize(protocol.seeds.size());
  for_each_index(protocol.seeds.size(), exec,
                 [&](std::size_t i) { result.runs[i] = train_fn(protocol.seeds[i]); });
  for (std::size_t i = 1; i < result.runs.size(); ++i) {
    if (result.runs[i].devtest_accuracy > result.runs[result.selected].devtest_accuracy) result.selected = i;
  }
  return result;
}

SeedRun run_pipeline(const PipelineData& data, const PipelineConfig& config, std::uint64_t seed,
                     Exec exec) {
  SeedRun run;
  run.seed = seed;

  EncoderConfig encoder = config.encoder;
  encoder.seed = derive_seed(seed, 1);
  TrainConfig ged_cfg = config.ged;
  ged_cfg.seed = derive_seed(seed, 2);
  TrainConfig qe_cfg = config.qe;
  qe_cfg.seed = derive_seed(seed, 3);

  const EncoderCheckpoint initial = EncoderCheckpoint::initialize(encoder, config.vocab);
  run.ged = train_ged(initial, ged_cfg, config.taxonomy, data.ged_train, data.ged_dev, config.ged_metric, exec);

  const auto& ged = run.ged.checkpoint;
  const auto train_pairs = build_pair_dataset(ged, data.qe_train, config.pairs, config.pair_seed, exec);
  const auto dev_pairs = build_pair_dataset(ged, data.qe_dev, config.pairs, derive_seed(config.pair_seed, 1), exec);
  const auto devtest_pairs =
      build_pair_dataset(ged, data.qe_devtest, config.pairs, derive_seed(config.pair_seed, 2), exec);
  if (train_pairs.empty() || dev_pairs.empty() || devtest_pairs.empty()) {
    throw TrainingError("pair generation produced an empty train, dev or devtest set");
  }
  run.qe = train_qe(ged, qe_cfg, train_pairs, dev_pairs, exec);
  run.devtest_accuracy = ranking_accuracy(run.qe.checkpoint, devtest_pairs, exec);
  return run;
}

}  // namespace gecqe
