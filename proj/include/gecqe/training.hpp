#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gecqe/corpus.hpp"
#include "gecqe/encoder.hpp"
#include "gecqe/gedlabel.hpp"
#include "gecqe/impact_pairs.hpp"
#include "gecqe/parallel.hpp"

namespace gecqe {

// Plain mini-batch gradient descent settings.
struct TrainConfig {
  std::size_t epochs = 1;
  double learning_rate = 0.1;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  bool eval_every = true;  // evaluate dev after every epoch; otherwise only the last

  void validate() const;
};

struct LossAndGradient {
  double loss = 0.0;
  Gradient gradient;
};

// Mean over sentences of the per-sentence mean negative log-likelihood of the
// gold labels. Sentences without tokens are skipped.
LossAndGradient ged_loss(const EncoderCheckpoint& checkpoint,
                         std::span<const LabeledSentence> batch, Exec exec = Exec::parallel);

// Mean of sigmoid(R(s_minus) - R(s_plus)); the loss is the sigmoid itself.
LossAndGradient qe_loss(const EncoderCheckpoint& checkpoint, std::span<const PairExample> batch,
                        Exec exec = Exec::parallel);

enum class GedDevMetric { f05, accuracy, macro_f1 };

std::string_view ged_metric_name(GedDevMetric metric);
GedDevMetric parse_ged_metric(std::string_view text);

struct GedEvaluation {
  double f05 = 0.0;       // micro-averaged over non-CORRECT labels
  double accuracy = 0.0;  // token accuracy
  double macro_f1 = 0.0;  // mean F1 over non-CORRECT labels seen in gold or prediction
  double get(GedDevMetric metric) const;
};

GedEvaluation evaluate_ged(const EncoderCheckpoint& checkpoint,
                           std::span<const LabeledSentence> sentences, Exec exec = Exec::parallel);

// Fraction of pairs with R(s_plus) > R(s_minus).
double ranking_accuracy(const EncoderCheckpoint& checkpoint, std::span<const PairExample> pairs,
                        Exec exec = Exec::parallel);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_metric = 0.0;
};

// One optimizer step: the training-set indices of its batch.
struct StepRecord {
  std::size_t epoch = 0;
  std::vector<std::size_t> batch;
  double learning_rate = 0.0;
};

struct TrainResult {
  EncoderCheckpoint checkpoint;  // the selected epoch
  std::vector<EpochLog> log;
  std::size_t selected_epoch = 0;
  std::vector<StepRecord> steps;  // every step of every epoch
};

// JSON lines {"epoch":..,"train_loss":..,"dev_metric":..}
std::string serialize_log(const std::vector<EpochLog>& log);

// Starts from `initial` (its encoder weights; a zero GED head for `taxonomy`
// is attached when missing). Returns the epoch with the highest dev metric,
// earlier epoch on ties.
TrainResult train_ged(const EncoderCheckpoint& initial, const TrainConfig& config,
                      TaxonomyName taxonomy, std::span<const LabeledSentence> train,
                      std::span<const LabeledSentence> dev, GedDevMetric metric = GedDevMetric::f05,
                      Exec exec = Exec::parallel);

// Fine-tunes the GED encoder with a fresh zero QE head; the GED head is
// dropped and the parent hash recorded. Selection by dev ranking accuracy.
TrainResult train_qe(const EncoderCheckpoint& ged_checkpoint, const TrainConfig& config,
                     std::span<const PairExample> train, std::span<const PairExample> dev,
                     Exec exec = Exec::parallel);

// Re-runs the recorded steps (up to and including `through_epoch`) from the
// GED checkpoint.
EncoderCheckpoint replay_qe_steps(const EncoderCheckpoint& ged_checkpoint,
                                  std::span<const PairExample> train,
                                  std::span<const StepRecord> steps, std::size_t through_epoch,
                                  Exec exec = Exec::parallel);

// First epoch whose dev metric reaches threshold; 0 when never.
std::size_t epochs_to_reach(const std::vector<EpochLog>& log, double threshold);

struct SelectionProtocol {
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

  static SelectionProtocol with_n_seeds(std::size_t n, std::uint64_t first = 0);
};

struct SeedRun {
  std::uint64_t seed = 0;
  TrainResult ged;
  TrainResult qe;
  double devtest_accuracy = 0.0;
};

struct SelectionResult {
  std::vector<SeedRun> runs;
  std::size_t selected = 0;

  const SeedRun& best() const { return runs.at(selected); }
};

// Runs train_fn per seed and keeps the highest devtest accuracy; ties go to
// the lowest index. Seeds run concurrently with Exec::parallel.
SelectionResult select_over_seeds(const SelectionProtocol& protocol,
                                  const std::function<SeedRun(std::uint64_t)>& train_fn,
                                  Exec exec = Exec::serial);

struct PipelineData {
  std::vector<LabeledSentence> ged_train;
  std::vector<LabeledSentence> ged_dev;
  std::vector<ParallelPair> qe_train;
  std::vector<ParallelPair> qe_dev;
  std::vector<ParallelPair> qe_devtest;
};

struct PipelineConfig {
  EncoderConfig encoder;
  Vocab vocab;
  TaxonomyName taxonomy = TaxonomyName::binary;
  GedDevMetric ged_metric = GedDevMetric::f05;
  TrainConfig ged{5, 0.1, 16, 0, true};
  TrainConfig qe{10, 0.1, 16, 0, true};
  PairOptions pairs;
  std::uint64_t pair_seed = 0;
};

// GED training, pair generation with the GED model, QE training, and devtest
// ranking accuracy for one seed. The seed drives encoder initialization and
// batch order; pair sampling uses pair_seed.
SeedRun run_pipeline(const PipelineData& data, const PipelineConfig& config, std::uint64_t seed,
                     Exec exec = Exec::parallel);

}  // namespace gecqe
