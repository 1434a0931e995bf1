#pragma once

// Single-file checkpoint:
//   "CDACCKPT" | uint32 LE version | uint64 LE manifest length | JSON manifest
//   | float32 LE tensor payloads in directory order.

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdac/error.hpp"
#include "cdac/model/cdac.hpp"

namespace cdac::model {

inline constexpr char kCheckpointMagic[8] = {'C', 'D', 'A', 'C', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public DataError {
 public:
  enum class Reason { corrupt, unsupported_version, truncated, shape_mismatch, checksum };

  CheckpointError(Reason r, const std::string& what) : DataError(what), reason_(r) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

namespace detail {

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <typename U>
U get_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return static_cast<U>(v);
}

inline void put_floats(std::string& out, const std::vector<float>& values) {
  for (float f : values) put_le(out, std::bit_cast<std::uint32_t>(f));
}

inline const std::string kItemTensor = "ssi.item_vectors";

}  // namespace detail

inline std::string serialize_checkpoint(const CdacModel& m) {
  using nlohmann::json;
  json manifest;
  manifest["format_version"] = kCheckpointVersion;
  manifest["config"] = m.config;
  manifest["tagset"] = {{"labels", m.tagset.labels()},
                        {"collapse_map", m.tagset.collapse_map()}};
  manifest["topics"] = m.topics.topics();
  manifest["vocabulary"] = {{"tokens", m.vocab.tokens()}, {"min_count", m.vocab.min_count()}};
  manifest["normalizer"] = {{"mean", m.normalizer.mean}, {"stddev", m.normalizer.stddev}};
  std::map<std::string, std::string> lexicon(m.lexicon_tagger.lexicon().begin(),
                                             m.lexicon_tagger.lexicon().end());
  manifest["tagger"] = {{"kind", m.tagger_kind}, {"lexicon", lexicon}};
  manifest["allowed_labels"] = m.allowed_labels;
  manifest["provenance"] = m.provenance;

  std::vector<std::string> item_tokens;
  for (const auto& [t, _] : m.item_vectors.vectors()) item_tokens.push_back(t);
  std::sort(item_tokens.begin(), item_tokens.end());
  manifest["item_vectors"] = {{"dim", m.item_vectors.dim()}, {"tokens", item_tokens}};

  std::string payload;
  json dir = json::array();
  auto add = [&](const std::string& name, const std::vector<std::size_t>& shape,
                 const std::vector<float>& values, bool trainable) {
    dir.push_back({{"name", name},
                   {"shape", shape},
                   {"offset", payload.size()},
                   {"trainable", trainable}});
    detail::put_floats(payload, values);
  };
  for (std::size_t i = 0; i < m.net.params.size(); ++i)
    add(m.net.params[i].name, m.net.params[i].shape, m.net.params[i].values,
        m.net.params.trainable[i]);
  std::vector<float> items;
  items.reserve(item_tokens.size() * m.item_vectors.dim());
  for (const auto& t : item_tokens) {
    auto v = m.item_vectors.find(t);
    items.insert(items.end(), v.begin(), v.end());
  }
  add(detail::kItemTensor, {item_tokens.size(), m.item_vectors.dim()}, items, false);
  manifest["tensors"] = std::move(dir);
  manifest["payload_bytes"] = payload.size();
  manifest["payload_crc32"] =
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size()));

  const std::string text = manifest.dump(1);
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::put_le(out, kCheckpointVersion);
  detail::put_le(out, static_cast<std::uint64_t>(text.size()));
  out += text;
  out += payload;
  return out;
}

inline void save_checkpoint(const CdacModel& m, const std::string& path) {
  const auto bytes = serialize_checkpoint(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
}

// Builds a complete model or throws; no partially loaded model escapes.
inline CdacModel deserialize_checkpoint(const std::string& bytes) {
  using nlohmann::json;
  using R = CheckpointError::Reason;
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  constexpr std::size_t header = 8 + 4 + 8;
  if (bytes.size() < header) throw CheckpointError(R::truncated, "checkpoint header is truncated");
  if (std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0)
    throw CheckpointError(R::corrupt, "not a checkpoint file (bad magic)");
  const auto version = detail::get_le<std::uint32_t>(p + 8);
  if (version != kCheckpointVersion)
    throw CheckpointError(R::unsupported_version,
                          "unsupported checkpoint version " + std::to_string(version) +
                              " (this build reads version " +
                              std::to_string(kCheckpointVersion) + ")");
  const auto mlen = detail::get_le<std::uint64_t>(p + 12);
  if (mlen > bytes.size() - header)
    throw CheckpointError(R::truncated, "checkpoint manifest is truncated");
  json manifest;
  try {
    manifest = json::parse(bytes.begin() + header, bytes.begin() + header + static_cast<std::ptrdiff_t>(mlen));
  } catch (const json::exception& e) {
    throw CheckpointError(R::corrupt, std::string("checkpoint manifest is corrupt: ") + e.what());
  }
  const std::size_t payload_off = header + mlen;
  const std::size_t payload_size = bytes.size() - payload_off;

  try {
    if (manifest.value("format_version", 0u) != kCheckpointVersion)
      throw CheckpointError(R::unsupported_version, "manifest declares an unsupported version");
    const auto expected_bytes = manifest.at("payload_bytes").get<std::size_t>();
    if (payload_size < expected_bytes)
      throw CheckpointError(R::truncated, "checkpoint payload is truncated: " +
                                              std::to_string(payload_size) + " of " +
                                              std::to_string(expected_bytes) + " bytes");
    if (payload_size > expected_bytes)
      throw CheckpointError(R::corrupt, "checkpoint has trailing bytes after the payload");
    const auto crc = crc32(0L, p + payload_off, static_cast<uInt>(payload_size));
    if (crc != manifest.at("payload_crc32").get<unsigned long>())
      throw CheckpointError(R::checksum, "checkpoint payload checksum mismatch");

    CdacModel m;
    m.config = manifest.at("config").get<ModelConfig>();
    m.tagset = corpus::TagSet(manifest.at("tagset").at("labels").get<std::vector<std::string>>(),
                              manifest.at("tagset").at("collapse_map")
                                  .get<std::map<std::string, std::string>>());
    m.topics = corpus::TopicVocab(manifest.at("topics").get<std::vector<std::string>>());
    m.vocab = features::Vocabulary(
        manifest.at("vocabulary").at("tokens").get<std::vector<std::string>>(),
        manifest.at("vocabulary").at("min_count").get<std::size_t>());
    m.normalizer.mean = manifest.at("normalizer").at("mean");
    m.normalizer.stddev = manifest.at("normalizer").at("stddev");
    m.tagger_kind = manifest.at("tagger").at("kind").get<TaggerKind>();
    m.lexicon_tagger = features::LexiconTagger(
        manifest.at("tagger").at("lexicon").get<std::unordered_map<std::string, std::string>>());
    m.allowed_labels = manifest.at("allowed_labels").get<std::vector<std::size_t>>();
    for (auto l : m.allowed_labels)
      if (l >= m.tagset.size()) throw CheckpointError(R::corrupt, "allowed label out of range");
    m.provenance = manifest.at("provenance");
    if (m.config.num_classes != m.tagset.size() || m.config.topic_vocab_size != m.topics.size())
      throw CheckpointError(R::shape_mismatch,
                            "configuration does not match the stored tag set/topic vocabulary");

    nn::ParameterSet<float> params;
    const auto item_dim = manifest.at("item_vectors").at("dim").get<std::size_t>();
    const auto item_tokens = manifest.at("item_vectors").at("tokens").get<std::vector<std::string>>();
    std::vector<float> item_values;
    std::size_t expected_offset = 0;
    for (const auto& t : manifest.at("tensors")) {
      const auto name = t.at("name").get<std::string>();
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      const auto offset = t.at("offset").get<std::size_t>();
      const std::size_t count = nn::Tensor<float>::element_count(shape);
      if (offset != expected_offset || offset + 4 * count > payload_size)
        throw CheckpointError(R::shape_mismatch,
                              "tensor '" + name + "' does not fit the payload directory");
      expected_offset = offset + 4 * count;
      std::vector<float> values(count);
      for (std::size_t i = 0; i < count; ++i)
        values[i] = std::bit_cast<float>(
            detail::get_le<std::uint32_t>(p + payload_off + offset + 4 * i));
      if (name == detail::kItemTensor) {
        if (shape.size() != 2 || shape[0] != item_tokens.size() || shape[1] != item_dim)
          throw CheckpointError(R::shape_mismatch, "item vector table shape mismatch");
        item_values = std::move(values);
        continue;
      }
      nn::Tensor<float> tensor(name, shape);
      tensor.values = std::move(values);
      params.add(std::move(tensor), t.value("trainable", true));
    }
    if (expected_offset != payload_size)
      throw CheckpointError(R::shape_mismatch, "tensor directory does not cover the payload");
    m.item_vectors = features::Embeddings(item_dim);
    for (std::size_t i = 0; i < item_tokens.size(); ++i)
      m.item_vectors.set(item_tokens[i],
                         std::vector<float>(item_values.begin() + static_cast<std::ptrdiff_t>(i * item_dim),
                                            item_values.begin() + static_cast<std::ptrdiff_t>((i + 1) * item_dim)));
    try {
      m.net = DacNetwork<float>::from_parameters(m.config, std::move(params));
    } catch (const CheckpointError&) {
      throw;
    } catch (const Error& e) {
      throw CheckpointError(R::shape_mismatch, std::string("checkpoint tensors: ") + e.what());
    }
    if (m.net.vocab_size() != m.vocab.size())
      throw CheckpointError(R::shape_mismatch,
                            "word.embedding rows do not match the vocabulary size");
    return m;
  } catch (const json::exception& e) {
    throw CheckpointError(R::corrupt, std::string("checkpoint manifest is invalid: ") + e.what());
  }
}

inline CdacModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace cdac::model
