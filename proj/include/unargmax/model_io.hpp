#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include <json.hpp>

#include "unargmax/error.hpp"
#include "unargmax/npy.hpp"
#include "unargmax/spec.hpp"

namespace unargmax {

struct Vocabulary {
  std::string name;
  std::vector<std::string> tokens;
};

inline Vocabulary load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("tokens") || !doc["tokens"].is_array()) {
    throw ParseError(path.string() + ": expected an object with a \"tokens\" array");
  }
  Vocabulary vocab;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError(path.string() + ": \"name\" must be a string");
    vocab.name = doc["name"].get<std::string>();
  }
  for (const auto& tok : doc["tokens"]) {
    if (!tok.is_string()) throw ParseError(path.string() + ": every token must be a string");
    vocab.tokens.push_back(tok.get<std::string>());
  }
  return vocab;
}

inline Matrix matrix_from_npy(const npy::Array& arr) {
  if (arr.rank() != 2) {
    throw ShapeError("weights must be a rank-2 array, got rank " + std::to_string(arr.rank()));
  }
  Matrix m(static_cast<Index>(arr.shape[0]), static_cast<Index>(arr.shape[1]));
  std::copy(arr.data.begin(), arr.data.end(), m.data());
  return m;
}

inline Vector vector_from_npy(const npy::Array& arr) {
  if (arr.rank() != 1) {
    throw ShapeError("bias must be a rank-1 array, got rank " + std::to_string(arr.rank()));
  }
  Vector v(static_cast<Index>(arr.shape[0]));
  std::copy(arr.data.begin(), arr.data.end(), v.data());
  return v;
}

inline SoftmaxSpec load_spec(const std::filesystem::path& weights_path,
                             const std::optional<std::filesystem::path>& bias_path = std::nullopt,
                             const std::optional<std::filesystem::path>& vocab_path = std::nullopt) {
  SoftmaxSpec spec;
  spec.weights = matrix_from_npy(npy::read(weights_path));
  if (bias_path) spec.bias = vector_from_npy(npy::read(*bias_path));
  spec.name = weights_path.stem().string();
  if (vocab_path) {
    Vocabulary vocab = load_vocab(*vocab_path);
    if (!vocab.name.empty()) spec.name = vocab.name;
    spec.tokens = std::move(vocab.tokens);
  }
  validate(spec);
  return spec;
}

inline void save_weights(const std::filesystem::path& path, const Matrix& weights) {
  const std::size_t shape[2] = {static_cast<std::size_t>(weights.rows()),
                                static_cast<std::size_t>(weights.cols())};
  npy::write(path, shape, std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())));
}

inline void save_bias(const std::filesystem::path& path, const Vector& bias) {
  const std::size_t shape[1] = {static_cast<std::size_t>(bias.size())};
  npy::write(path, shape, std::span<const double>(bias.data(), static_cast<std::size_t>(bias.size())));
}

// Token predicate used to restrict an audit to part of the vocabulary.
// Filtered-out classes still compete in every constraint system.
struct TokenFilter {
  std::set<std::string> allowed_scripts;  // Unicode script names, e.g. "Cyrillic"
  bool drop_digits_punct = false;
  bool keep_special = true;  // tokens shaped like <unk>, </s>

  bool is_identity() const { return allowed_scripts.empty() && !drop_digits_punct; }
};

namespace detail {

inline std::vector<UChar32> decode_utf8(const std::string& s) {
  std::vector<UChar32> out;
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  int32_t i = 0;
  const auto len = static_cast<int32_t>(s.size());
  while (i < len) {
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) c = 0xFFFD;
    out.push_back(c);
  }
  return out;
}

inline UScriptCode script_code(const std::string& name) {
  int32_t v = u_getPropertyValueEnum(UCHAR_SCRIPT, name.c_str());
  if (v == UCHAR_INVALID_CODE) throw ValueError("unknown Unicode script '" + name + "'");
  return static_cast<UScriptCode>(v);
}

inline bool is_special_token(const std::string& token) {
  static const std::regex pattern("^<[^<>\\s]+>$");
  return std::regex_match(token, pattern);
}

// Strips subword boundary markers that are part of the tokenizer's encoding
// rather than the surface string: SentencePiece's leading U+2581 and the
// trailing "@@" continuation marker of subword-nmt.
inline std::string strip_subword_markers(std::string token) {
  static const std::string kSpMarker = "\xE2\x96\x81";
  while (token.rfind(kSpMarker, 0) == 0) token.erase(0, kSpMarker.size());
  if (token.size() >= 2 && token.compare(token.size() - 2, 2, "@@") == 0) token.resize(token.size() - 2);
  return token;
}

}  // namespace detail

class CompiledFilter {
 public:
  explicit CompiledFilter(const TokenFilter& filter) : filter_(filter) {
    for (const auto& name : filter.allowed_scripts) scripts_.insert(detail::script_code(name));
  }

  bool operator()(const std::string& token) const {
    if (filter_.keep_special && detail::is_special_token(token)) return true;
    const auto chars = detail::decode_utf8(detail::strip_subword_markers(token));
    for (UChar32 c : chars) {
      if (filter_.drop_digits_punct && (u_isdigit(c) || u_ispunct(c))) return false;
      if (!scripts_.empty() && u_isalpha(c)) {
        UErrorCode err = U_ZERO_ERROR;
        UScriptCode sc = uscript_getScript(c, &err);
        if (U_FAILURE(err)) return false;
        if (sc == USCRIPT_COMMON || sc == USCRIPT_INHERITED) continue;
        if (!scripts_.count(sc)) return false;
      }
    }
    return true;
  }

 private:
  TokenFilter filter_;
  std::set<UScriptCode> scripts_;
};

inline std::vector<Index> all_classes(const SoftmaxSpec& spec) {
  std::vector<Index> out(static_cast<std::size_t>(spec.classes()));
  for (Index i = 0; i < spec.classes(); ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

// Indices of classes whose token passes the filter, in increasing order.
inline std::vector<Index> apply_filter(const SoftmaxSpec& spec, const TokenFilter& filter) {
  if (!spec.tokens) {
    if (filter.is_identity()) return all_classes(spec);
    throw MissingVocab("token filter requested but the model has no vocabulary");
  }
  CompiledFilter pass(filter);
  std::vector<Index> out;
  for (Index i = 0; i < spec.classes(); ++i) {
    if (pass((*spec.tokens)[static_cast<std::size_t>(i)])) out.push_back(i);
  }
  return out;
}

}  // namespace unargmax
