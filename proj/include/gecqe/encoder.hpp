#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gecqe/gedlabel.hpp"
#include "gecqe/types.hpp"

namespace gecqe {

class Vocab {
 public:
  static constexpr std::int32_t kUnk = 0;
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocab();
  // tokens[0] must be the UNK token; duplicates are rejected.
  explicit Vocab(std::vector<std::string> tokens);

  // Frequency-ordered (ties lexicographic) vocabulary over all sentences.
  static Vocab build(const std::vector<Tokens>& sentences, std::size_t min_count = 1);

  std::int32_t id(std::string_view token) const;
  std::vector<std::int32_t> ids(const Tokens& tokens) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

// Neighbours on each side mixed into a token's context average.
inline constexpr std::size_t kWindowRadius = 2;

struct EncoderConfig {
  std::size_t dim = 64;
  std::size_t depth = 2;
  std::uint64_t seed = 0;

  bool operator==(const EncoderConfig&) const = default;
};

// Offsets into the flat parameter vector. Layout:
//   embeddings [vocab x dim]
//   per layer: self weight [dim x dim], context weight [dim x dim],
//              bias [dim], window weights [2 * kWindowRadius + 1]
struct ParameterLayout {
  std::size_t dim = 0;
  std::size_t vocab = 0;
  std::size_t depth = 0;
  std::size_t embedding_size = 0;
  std::size_t layer_size = 0;

  ParameterLayout(const EncoderConfig& config, std::size_t vocab_size);

  std::size_t total() const { return embedding_size + depth * layer_size; }
  std::size_t layer_offset(std::size_t layer) const { return embedding_size + layer * layer_size; }
  std::size_t self_weight(std::size_t layer) const { return layer_offset(layer); }
  std::size_t context_weight(std::size_t layer) const { return layer_offset(layer) + dim * dim; }
  std::size_t bias(std::size_t layer) const { return layer_offset(layer) + 2 * dim * dim; }
  std::size_t window(std::size_t layer) const { return layer_offset(layer) + 2 * dim * dim + dim; }
};

struct GedHead {
  TaxonomyName taxonomy = TaxonomyName::binary;
  std::size_t num_labels = 0;
  std::vector<double> weight;  // [num_labels x dim], row-major
  std::vector<double> bias;    // [num_labels]

  bool operator==(const GedHead&) const = default;
};

struct QeHead {
  std::vector<double> weight;  // [dim]
  double bias = 0.0;

  bool operator==(const QeHead&) const = default;
};

struct EncoderCheckpoint {
  EncoderConfig config;
  Vocab vocab;
  std::vector<double> parameters;
  std::optional<GedHead> ged_head;
  std::optional<QeHead> qe_head;
  // Content hash of the checkpoint this one was fine-tuned from.
  std::optional<std::string> parent_hash;

  // Embeddings and layer weights uniform in [-1/sqrt(dim), 1/sqrt(dim)],
  // window weights 1, biases 0. No heads.
  static EncoderCheckpoint initialize(const EncoderConfig& config, Vocab vocab);

  ParameterLayout layout() const { return ParameterLayout(config, vocab.size()); }
  void add_ged_head(TaxonomyName taxonomy);  // zero-initialized
  void add_qe_head();                        // zero-initialized

  // Throws StructuralError on shape mismatches or non-finite values.
  void validate() const;

  bool operator==(const EncoderCheckpoint&) const = default;
};

struct TokenEmbeddings {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> tokens;  // [count x dim]
  std::vector<double> pooled;  // mean over tokens; zeros when count == 0

  std::span<const double> token(std::size_t i) const {
    return std::span<const double>(tokens).subspan(i * dim, dim);
  }
};

// Any backend producing contextual token vectors. The reference encoder below
// implements it; an external pretrained model can be adapted behind it for
// inference-only uses (similarity, impacts).
class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;
  virtual TokenEmbeddings encode(const Tokens& tokens) const = 0;
  virtual std::size_t dim() const = 0;
};

// Activations kept for the backward pass.
struct ForwardPass {
  std::vector<std::int32_t> ids;
  std::vector<std::vector<double>> states;    // depth + 1 entries, each [n x dim]
  std::vector<std::vector<double>> contexts;  // depth entries, each [n x dim]
  std::size_t count = 0;
};

ForwardPass forward(const EncoderCheckpoint& checkpoint, const Tokens& tokens);
TokenEmbeddings encode(const EncoderCheckpoint& checkpoint, const Tokens& tokens);

class ReferenceEncoder final : public SentenceEncoder {
 public:
  explicit ReferenceEncoder(const EncoderCheckpoint& checkpoint) : checkpoint_(checkpoint) {}
  TokenEmbeddings encode(const Tokens& tokens) const override;
  std::size_t dim() const override { return checkpoint_.config.dim; }

 private:
  const EncoderCheckpoint& checkpoint_;
};

// R(S) = w . pooled(S) + b. Throws StructuralError without a QE head.
double qe_score(const EncoderCheckpoint& checkpoint, const Tokens& tokens);
double qe_score(const EncoderCheckpoint& checkpoint, const TokenEmbeddings& embeddings);

// Softmax over the GED head, one row per token.
std::vector<std::vector<double>> ged_probabilities(const EncoderCheckpoint& checkpoint,
                                                   const Tokens& tokens,
                                                   const Taxonomy& taxonomy);

// Cosine of pooled vectors, clamped to [-1, 1]. Two zero vectors give 1; one
// zero vector gives 0.
double cosine(std::span<const double> a, std::span<const double> b);
double similarity(const SentenceEncoder& encoder, const Tokens& a, const Tokens& b);
double similarity(const EncoderCheckpoint& checkpoint, const Tokens& a, const Tokens& b);

// Gradient with the same shape as a checkpoint. Heads are empty when the
// checkpoint has no such head.
struct Gradient {
  std::vector<double> encoder;
  std::vector<double> ged_weight;
  std::vector<double> ged_bias;
  std::vector<double> qe_weight;
  double qe_bias = 0.0;

  static Gradient zeros_like(const EncoderCheckpoint& checkpoint);
  std::vector<double> flatten() const;
};

// Per-example gradient: dense layer and head parts plus per-token rows for
// the embedding table. Summed into a Gradient in example order.
struct ExampleGradient {
  std::vector<double> layers;  // [depth x layer_size]
  std::vector<std::int32_t> ids;
  std::vector<double> rows;  // [ids.size() x dim]
  std::vector<double> ged_weight;
  std::vector<double> ged_bias;
  std::vector<double> qe_weight;
  double qe_bias = 0.0;

  static ExampleGradient zeros_like(const EncoderCheckpoint& checkpoint);
};

// Backpropagates d(loss)/d(final states) ([count x dim]) into grad.
void backward(const EncoderCheckpoint& checkpoint, const ForwardPass& pass,
              std::span<const double> state_grad, ExampleGradient& grad);

void accumulate(Gradient& total, const ExampleGradient& example, const ParameterLayout& layout);

// Flat view over every trainable value: encoder, GED weight, GED bias,
// QE weight, QE bias (heads only when present).
std::vector<double> flatten_parameters(const EncoderCheckpoint& checkpoint);
void assign_parameters(EncoderCheckpoint& checkpoint, std::span<const double> flat);

// parameters -= learning_rate * gradient
void apply_gradient_step(EncoderCheckpoint& checkpoint, const Gradient& gradient,
                         double learning_rate);

// Versioned JSON container; doubles are written with round-trip precision.
std::string serialize_checkpoint(const EncoderCheckpoint& checkpoint);
EncoderCheckpoint parse_checkpoint(std::string_view text);
void save_checkpoint(const EncoderCheckpoint& checkpoint, const std::filesystem::path& path);
EncoderCheckpoint load_checkpoint(const std::filesystem::path& path);

// SHA-256 (hex) of the serialized checkpoint.
std::string content_hash(const EncoderCheckpoint& checkpoint);
std::string sha256_hex(std::string_view data);

double sigmoid(double x);

}  // namespace gecqe
