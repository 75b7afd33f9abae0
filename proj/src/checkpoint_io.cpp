#include <openssl/evp.h>

#include <array>
#include <json.hpp>

#include "gecqe/corpus.hpp"
#include "gecqe/encoder.hpp"
#include "gecqe/errors.hpp"

namespace gecqe {

namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "gecqe-checkpoint";
constexpr int kVersion = 1;

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("checkpoint is missing '") + key + "'");
  return *it;
}

std::vector<double> doubles(const json& value, const char* what) {
  if (!value.is_array()) throw SchemaError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_number()) throw SchemaError(std::string(what) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string serialize_checkpoint(const EncoderCheckpoint& checkpoint) {
  checkpoint.validate();
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["config"] = {{"dim", checkpoint.config.dim},
                   {"depth", checkpoint.config.depth},
                   {"seed", checkpoint.config.seed}};
  doc["vocab"] = checkpoint.vocab.tokens();
  doc["parameters"] = checkpoint.parameters;
  if (checkpoint.ged_head) {
    doc["ged_head"] = {{"taxonomy", taxonomy_name(checkpoint.ged_head->taxonomy)},
                       {"num_labels", checkpoint.ged_head->num_labels},
                       {"weight", checkpoint.ged_head->weight},
                       {"bias", checkpoint.ged_head->bias}};
  }
  if (checkpoint.qe_head) {
    doc["qe_head"] = {{"weight", checkpoint.qe_head->weight}, {"bias", checkpoint.qe_head->bias}};
  }
  if (checkpoint.parent_hash) doc["parent_hash"] = *checkpoint.parent_hash;
  return doc.dump() + "\n";
}

EncoderCheckpoint parse_checkpoint(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw SchemaError("checkpoint must be a JSON object");
  try {
    if (field(doc, "format") != kFormat) throw SchemaError("not a gecqe checkpoint");
    if (field(doc, "version") != kVersion) {
      throw SchemaError("unsupported checkpoint version " + field(doc, "version").dump());
    }
    EncoderCheckpoint ck;
    const json& cfg = field(doc, "config");
    ck.config.dim = field(cfg, "dim").get<std::size_t>();
    ck.config.depth = field(cfg, "depth").get<std::size_t>();
    ck.config.seed = field(cfg, "seed").get<std::uint64_t>();
    ck.vocab = Vocab(field(doc, "vocab").get<std::vector<std::string>>());
    ck.parameters = doubles(field(doc, "parameters"), "parameters");
    if (auto it = doc.find("ged_head"); it != doc.end()) {
      GedHead head;
      head.taxonomy = parse_taxonomy_name(field(*it, "taxonomy").get<std::string>());
      head.num_labels = field(*it, "num_labels").get<std::size_t>();
      head.weight = doubles(field(*it, "weight"), "ged_head.weight");
      head.bias = doubles(field(*it, "bias"), "ged_head.bias");
      ck.ged_head = std::move(head);
    }
    if (auto it = doc.find("qe_head"); it != doc.end()) {
      QeHead head;
      head.weight = doubles(field(*it, "weight"), "qe_head.weight");
      head.bias = field(*it, "bias").get<double>();
      ck.qe_head = std::move(head);
    }
    if (auto it = doc.find("parent_hash"); it != doc.end()) ck.parent_hash = it->get<std::string>();
    try {
      ck.validate();
    } catch (const StructuralError& e) {
      throw SchemaError(e.what());
    }
    return ck;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(e.what());
  }
}

void save_checkpoint(const EncoderCheckpoint& checkpoint, const std::filesystem::path& path) {
  write_file(path, serialize_checkpoint(checkpoint));
}

EncoderCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string content_hash(const EncoderCheckpoint& checkpoint) {
  return sha256_hex(serialize_checkpoint(checkpoint));
}

}  // namespace gecqe
