#include "gecqe/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gecqe/errors.hpp"
#include "gecqe/random.hpp"

namespace gecqe {

Vocab::Vocab() : Vocab(std::vector<std::string>{std::string(kUnkToken)}) {}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != kUnkToken) {
    throw SchemaError("vocabulary must start with the " + std::string(kUnkToken) + " token");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<std::int32_t>(i)).second) {
      throw SchemaError("duplicate vocabulary entry '" + tokens_[i] + "'");
    }
  }
}

Vocab Vocab::build(const std::vector<Tokens>& sentences, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences)
    for (const auto& t : s) ++counts[t];
  counts.erase(std::string(kUnkToken));
  std::vector<std::pair<std::string, std::size_t>> entries;
  for (auto& [tok, n] : counts)
    if (n >= min_count) entries.emplace_back(tok, n);
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens{std::string(kUnkToken)};
  for (auto& [tok, n] : entries) tokens.push_back(tok);
  return Vocab(std::move(tokens));
}

std::int32_t Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::int32_t> Vocab::ids(const Tokens& tokens) const {
  std::vector<std::int32_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

ParameterLayout::ParameterLayout(const EncoderConfig& config, std::size_t vocab_size)
    : dim(config.dim),
      vocab(vocab_size),
      depth(config.depth),
      embedding_size(vocab_size * config.dim),
      layer_size(2 * config.dim * config.dim + config.dim + 2 * kWindowRadius + 1) {}

EncoderCheckpoint EncoderCheckpoint::initialize(const EncoderConfig& config, Vocab vocab) {
  if (config.dim < 2) throw ConfigError("encoder dim must be at least 2");
  EncoderCheckpoint ck;
  ck.config = config;
  ck.vocab = std::move(vocab);
  const ParameterLayout layout = ck.layout();
  ck.parameters.assign(layout.total(), 0.0);
  Rng rng(config.seed);
  const double range = 1.0 / std::sqrt(static_cast<double>(config.dim));
  for (std::size_t i = 0; i < layout.embedding_size; ++i) ck.parameters[i] = rng.uniform(-range, range);
  for (std::size_t l = 0; l < layout.depth; ++l) {
    for (std::size_t i = layout.self_weight(l); i < layout.bias(l); ++i) {
      ck.parameters[i] = rng.uniform(-range, range);
    }
    for (std::size_t k = 0; k < 2 * kWindowRadius + 1; ++k) ck.parameters[layout.window(l) + k] = 1.0;
  }
  return ck;
}

void EncoderCheckpoint::add_ged_head(TaxonomyName taxonomy) {
  const std::size_t labels = Taxonomy::get(taxonomy).size();
  ged_head = GedHead{taxonomy, labels, std::vector<double>(labels * config.dim, 0.0),
                     std::vector<double>(labels, 0.0)};
}

void EncoderCheckpoint::add_qe_head() { qe_head = QeHead{std::vector<double>(config.dim, 0.0), 0.0}; }

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void EncoderCheckpoint::validate() const {
  if (config.dim < 2) throw StructuralError("encoder dim must be at least 2");
  if (parameters.size() != layout().total()) {
    throw StructuralError("parameter vector has " + std::to_string(parameters.size()) +
                          " values, expected " + std::to_string(layout().total()));
  }
  if (!all_finite(parameters)) throw StructuralError("non-finite encoder parameter");
  if (ged_head) {
    const std::size_t labels = Taxonomy::get(ged_head->taxonomy).size();
    if (ged_head->num_labels != labels || ged_head->weight.size() != labels * config.dim ||
        ged_head->bias.size() != labels) {
      throw StructuralError("GED head shape does not match taxonomy " +
                            std::string(taxonomy_name(ged_head->taxonomy)));
    }
    if (!all_finite(ged_head->weight) || !all_finite(ged_head->bias)) {
      throw StructuralError("non-finite GED head parameter");
    }
  }
  if (qe_head) {
    if (qe_head->weight.size() != config.dim) throw StructuralError("QE head width does not match dim");
    if (!all_finite(qe_head->weight) || !std::isfinite(qe_head->bias)) {
      throw StructuralError("non-finite QE head parameter");
    }
  }
}

ForwardPass forward(const EncoderCheckpoint& checkpoint, const Tokens& tokens) {
  const ParameterLayout layout = checkpoint.layout();
  const std::size_t dim = layout.dim;
  const std::size_t n = tokens.size();
  const double* p = checkpoint.parameters.data();

  ForwardPass pass;
  pass.count = n;
  pass.ids = checkpoint.vocab.ids(tokens);
  pass.states.assign(layout.depth + 1, std::vector<double>(n * dim, 0.0));
  pass.contexts.assign(layout.depth, std::vector<double>(n * dim, 0.0));

  for (std::size_t i = 0; i < n; ++i) {
    const double* row = p + static_cast<std::size_t>(pass.ids[i]) * dim;
    std::copy(row, row + dim, pass.states[0].begin() + static_cast<std::ptrdiff_t>(i * dim));
  }

  const auto radius = static_cast<std::ptrdiff_t>(kWindowRadius);
  for (std::size_t l = 0; l < layout.depth; ++l) {
    const double* ws = p + layout.self_weight(l);
    const double* wc = p + layout.context_weight(l);
    const double* b = p + layout.bias(l);
    const double* a = p + layout.window(l);
    const std::vector<double>& h = pass.states[l];
    std::vector<double>& c = pass.contexts[l];
    std::vector<double>& out = pass.states[l + 1];

    for (std::size_t i = 0; i < n; ++i) {
      double* ci = c.data() + i * dim;
      std::size_t neighbours = 0;
      for (std::ptrdiff_t o = -radius; o <= radius; ++o) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + o;
        if (o == 0 || j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
        ++neighbours;
        const double w = a[o + radius];
        const double* hj = h.data() + static_cast<std::size_t>(j) * dim;
        for (std::size_t d = 0; d < dim; ++d) ci[d] += w * hj[d];
      }
      if (neighbours > 0) {
        const double inv = 1.0 / static_cast<double>(neighbours);
        for (std::size_t d = 0; d < dim; ++d) ci[d] *= inv;
      }
      const double* hi = h.data() + i * dim;
      double* oi = out.data() + i * dim;
      for (std::size_t r = 0; r < dim; ++r) {
        double z = b[r];
        const double* wsr = ws + r * dim;
        const double* wcr = wc + r * dim;
        for (std::size_t k = 0; k < dim; ++k) z += wsr[k] * hi[k] + wcr[k] * ci[k];
        oi[r] = std::tanh(z);
      }
    }
  }
  return pass;
}

namespace {

TokenEmbeddings to_embeddings(ForwardPass&& pass, std::size_t dim) {
  TokenEmbeddings out;
  out.count = pass.count;
  out.dim = dim;
  out.tokens = std::move(pass.states.back());
  out.pooled.assign(dim, 0.0);
  if (out.count > 0) {
    for (std::size_t i = 0; i < out.count; ++i)
      for (std::size_t d = 0; d < dim; ++d) out.pooled[d] += out.tokens[i * dim + d];
    const double inv = 1.0 / static_cast<double>(out.count);
    for (double& v : out.pooled) v *= inv;
  }
  return out;
}

}  // namespace

TokenEmbeddings encode(const EncoderCheckpoint& checkpoint, const Tokens& tokens) {
  return to_embeddings(forward(checkpoint, tokens), checkpoint.config.dim);
}

TokenEmbeddings ReferenceEncoder::encode(const Tokens& tokens) const {
  return gecqe::encode(checkpoint_, tokens);
}

double qe_score(const EncoderCheckpoint& checkpoint, const TokenEmbeddings& embeddings) {
  if (!checkpoint.qe_head) throw StructuralError("checkpoint has no QE head");
  const QeHead& head = *checkpoint.qe_head;
  if (embeddings.pooled.size() != head.weight.size()) {
    throw StructuralError("embedding width does not match the QE head");
  }
  double r = head.bias;
  for (std::size_t d = 0; d < head.weight.size(); ++d) r += head.weight[d] * embeddings.pooled[d];
  return r;
}

double qe_score(const EncoderCheckpoint& checkpoint, const Tokens& tokens) {
  if (!checkpoint.qe_head) throw StructuralError("checkpoint has no QE head");
  return qe_score(checkpoint, encode(checkpoint, tokens));
}

std::vector<std::vector<double>> ged_probabilities(const EncoderCheckpoint& checkpoint,
                                                   const Tokens& tokens,
                                                   const Taxonomy& taxonomy) {
  if (!checkpoint.ged_head) throw StructuralError("checkpoint has no GED head");
  const GedHead& head = *checkpoint.ged_head;
  if (head.taxonomy != taxonomy.name() || head.num_labels != taxonomy.size()) {
    throw StructuralError("GED head was trained for taxonomy " +
                          std::string(taxonomy_name(head.taxonomy)) + ", not " +
                          std::string(taxonomy_name(taxonomy.name())));
  }
  const std::size_t dim = checkpoint.config.dim;
  const TokenEmbeddings emb = encode(checkpoint, tokens);
  std::vector<std::vector<double>> out(emb.count, std::vector<double>(head.num_labels));
  for (std::size_t i = 0; i < emb.count; ++i) {
    const auto h = emb.token(i);
    auto& row = out[i];
    double peak = -INFINITY;
    for (std::size_t k = 0; k < head.num_labels; ++k) {
      double z = head.bias[k];
      for (std::size_t d = 0; d < dim; ++d) z += head.weight[k * dim + d] * h[d];
      row[k] = z;
      peak = std::max(peak, z);
    }
    double total = 0.0;
    for (double& z : row) {
      z = std::exp(z - peak);
      total += z;
    }
    for (double& z : row) z /= total;
  }
  return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw StructuralError("cosine of vectors with different widths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double similarity(const SentenceEncoder& encoder, const Tokens& a, const Tokens& b) {
  const TokenEmbeddings ea = encoder.encode(a);
  const TokenEmbeddings eb = encoder.encode(b);
  return cosine(ea.pooled, eb.pooled);
}

double similarity(const EncoderCheckpoint& checkpoint, const Tokens& a, const Tokens& b) {
  return similarity(ReferenceEncoder(checkpoint), a, b);
}

Gradient Gradient::zeros_like(const EncoderCheckpoint& checkpoint) {
  Gradient g;
  g.encoder.assign(checkpoint.parameters.size(), 0.0);
  if (checkpoint.ged_head) {
    g.ged_weight.assign(checkpoint.ged_head->weight.size(), 0.0);
    g.ged_bias.assign(checkpoint.ged_head->bias.size(), 0.0);
  }
  if (checkpoint.qe_head) g.qe_weight.assign(checkpoint.qe_head->weight.size(), 0.0);
  return g;
}

std::vector<double> Gradient::flatten() const {
  std::vector<double> out;
  out.reserve(encoder.size() + ged_weight.size() + ged_bias.size() + qe_weight.size() + 1);
  out.insert(out.end(), encoder.begin(), encoder.end());
  out.insert(out.end(), ged_weight.begin(), ged_weight.end());
  out.insert(out.end(), ged_bias.begin(), ged_bias.end());
  if (!qe_weight.empty()) {
    out.insert(out.end(), qe_weight.begin(), qe_weight.end());
    out.push_back(qe_bias);
  }
  return out;
}

ExampleGradient ExampleGradient::zeros_like(const EncoderCheckpoint& checkpoint) {
  const ParameterLayout layout = checkpoint.layout();
  ExampleGradient g;
  g.layers.assign(layout.depth * layout.layer_size, 0.0);
  if (checkpoint.ged_head) {
    g.ged_weight.assign(checkpoint.ged_head->weight.size(), 0.0);
    g.ged_bias.assign(checkpoint.ged_head->bias.size(), 0.0);
  }
  if (checkpoint.qe_head) g.qe_weight.assign(checkpoint.qe_head->weight.size(), 0.0);
  return g;
}

void backward(const EncoderCheckpoint& checkpoint, const ForwardPass& pass,
              std::span<const double> state_grad, ExampleGradient& grad) {
  const ParameterLayout layout = checkpoint.layout();
  const std::size_t dim = layout.dim;
  const std::size_t n = pass.count;
  if (state_grad.size() != n * dim) throw StructuralError("state gradient has the wrong shape");
  if (grad.layers.size() != layout.depth * layout.layer_size) {
    throw StructuralError("example gradient has the wrong shape");
  }
  const double* p = checkpoint.parameters.data();
  const auto radius = static_cast<std::ptrdiff_t>(kWindowRadius);

  std::vector<double> upstream(state_grad.begin(), state_grad.end());
  std::vector<double> dz(dim), dc(n * dim), below(n * dim);

  for (std::size_t l = layout.depth; l-- > 0;) {
    const double* ws = p + layout.self_weight(l);
    const double* wc = p + layout.context_weight(l);
    const double* a = p + layout.window(l);
    double* g = grad.layers.data() + l * layout.layer_size;
    double* g_ws = g;
    double* g_wc = g + dim * dim;
    double* g_b = g + 2 * dim * dim;
    double* g_a = g + 2 * dim * dim + dim;
    const std::vector<double>& h = pass.states[l];
    const std::vector<double>& out = pass.states[l + 1];
    const std::vector<double>& c = pass.contexts[l];

    std::fill(below.begin(), below.end(), 0.0);
    std::fill(dc.begin(), dc.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* hi = h.data() + i * dim;
      const double* ci = c.data() + i * dim;
      const double* oi = out.data() + i * dim;
      const double* ui = upstream.data() + i * dim;
      for (std::size_t r = 0; r < dim; ++r) dz[r] = ui[r] * (1.0 - oi[r] * oi[r]);
      double* bi = below.data() + i * dim;
      double* dci = dc.data() + i * dim;
      for (std::size_t r = 0; r < dim; ++r) {
        const double d = dz[r];
        g_b[r] += d;
        double* gwsr = g_ws + r * dim;
        double* gwcr = g_wc + r * dim;
        const double* wsr = ws + r * dim;
        const double* wcr = wc + r * dim;
        for (std::size_t k = 0; k < dim; ++k) {
          gwsr[k] += d * hi[k];
          gwcr[k] += d * ci[k];
          bi[k] += wsr[k] * d;
          dci[k] += wcr[k] * d;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t neighbours = 0;
      for (std::ptrdiff_t o = -radius; o <= radius; ++o) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + o;
        if (o != 0 && j >= 0 && j < static_cast<std::ptrdiff_t>(n)) ++neighbours;
      }
      if (neighbours == 0) continue;
      const double inv = 1.0 / static_cast<double>(neighbours);
      const double* dci = dc.data() + i * dim;
      for (std::ptrdiff_t o = -radius; o <= radius; ++o) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + o;
        if (o == 0 || j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
        const double* hj = h.data() + static_cast<std::size_t>(j) * dim;
        double* bj = below.data() + static_cast<std::size_t>(j) * dim;
        const double w = a[o + radius] * inv;
        double dot = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          dot += dci[d] * hj[d];
          bj[d] += w * dci[d];
        }
        g_a[o + radius] += inv * dot;
      }
    }
    std::swap(upstream, below);
  }

  grad.ids.insert(grad.ids.end(), pass.ids.begin(), pass.ids.end());
  grad.rows.insert(grad.rows.end(), upstream.begin(), upstream.end());
}

void accumulate(Gradient& total, const ExampleGradient& example, const ParameterLayout& layout) {
  const std::size_t dim = layout.dim;
  for (std::size_t t = 0; t < example.ids.size(); ++t) {
    double* dst = total.encoder.data() + static_cast<std::size_t>(example.ids[t]) * dim;
    const double* src = example.rows.data() + t * dim;
    for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
  }
  double* layers = total.encoder.data() + layout.embedding_size;
  for (std::size_t k = 0; k < example.layers.size(); ++k) layers[k] += example.layers[k];
  for (std::size_t k = 0; k < example.ged_weight.size(); ++k) total.ged_weight[k] += example.ged_weight[k];
  for (std::size_t k = 0; k < example.ged_bias.size(); ++k) total.ged_bias[k] += example.ged_bias[k];
  for (std::size_t k = 0; k < example.qe_weight.size(); ++k) total.qe_weight[k] += example.qe_weight[k];
  total.qe_bias += example.qe_bias;
}

std::vector<double> flatten_parameters(const EncoderCheckpoint& checkpoint) {
  std::vector<double> out(checkpoint.parameters);
  if (checkpoint.ged_head) {
    out.insert(out.end(), checkpoint.ged_head->weight.begin(), checkpoint.ged_head->weight.end());
    out.insert(out.end(), checkpoint.ged_head->bias.begin(), checkpoint.ged_head->bias.end());
  }
  if (checkpoint.qe_head) {
    out.insert(out.end(), checkpoint.qe_head->weight.begin(), checkpoint.qe_head->weight.end());
    out.push_back(checkpoint.qe_head->bias);
  }
  return out;
}

void assign_parameters(EncoderCheckpoint& checkpoint, std::span<const double> flat) {
  std::size_t expected = checkpoint.parameters.size();
  if (checkpoint.ged_head) expected += checkpoint.ged_head->weight.size() + checkpoint.ged_head->bias.size();
  if (checkpoint.qe_head) expected += checkpoint.qe_head->weight.size() + 1;
  if (flat.size() != expected) throw StructuralError("flat parameter vector has the wrong length");
  auto it = flat.begin();
  auto take = [&](std::vector<double>& dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  take(checkpoint.parameters);
  if (checkpoint.ged_head) {
    take(checkpoint.ged_head->weight);
    take(checkpoint.ged_head->bias);
  }
  if (checkpoint.qe_head) {
    take(checkpoint.qe_head->weight);
    checkpoint.qe_head->bias = *it;
  }
}

void apply_gradient_step(EncoderCheckpoint& checkpoint, const Gradient& gradient,
                         double learning_rate) {
  auto step = [learning_rate](std::vector<double>& params, const std::vector<double>& grad) {
    if (grad.empty()) return;
    if (grad.size() != params.size()) throw StructuralError("gradient shape does not match checkpoint");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grad[i];
  };
  step(checkpoint.parameters, gradient.encoder);
  if (checkpoint.ged_head) {
    step(checkpoint.ged_head->weight, gradient.ged_weight);
    step(checkpoint.ged_head->bias, gradient.ged_bias);
  }
  if (checkpoint.qe_head) {
    step(checkpoint.qe_head->weight, gradient.qe_weight);
    if (!gradient.qe_weight.empty()) checkpoint.qe_head->bias -= learning_rate * gradient.qe_bias;
  }
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace gecqe
