#include "mtaudit/tokenize.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>

#include "mtaudit/errors.hpp"
#include "mtaudit/unicode.hpp"

namespace mtaudit {

namespace {

TokenList tokenize_chars(std::string_view text) {
  TokenList out;
  const auto decoded = unicode::decode_utf8(text);
  if (!decoded) return out;
  for (char32_t c : *decoded) {
    if (!unicode::is_space(c)) out.push_back(unicode::encode_utf8(std::u32string_view(&c, 1)));
  }
  return out;
}

struct Registry {
  std::shared_mutex mutex;
  std::map<std::string, TokenizerFn, std::less<>> plugins{
      {"whitespace", tokenize_whitespace},
      {"chars", tokenize_chars},
  };
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

TokenList tokenize_whitespace(std::string_view text) {
  TokenList out;
  // ASCII fast path; falls back to full decoding when a multibyte scalar
  // appears, since U+00A0, U+3000 etc. are separators too.
  bool ascii = true;
  for (char ch : text) {
    if (static_cast<unsigned char>(ch) >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && unicode::is_space(static_cast<unsigned char>(text[i]))) ++i;
      const std::size_t start = i;
      while (i < text.size() && !unicode::is_space(static_cast<unsigned char>(text[i]))) ++i;
      if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
  }
  const auto decoded = unicode::decode_utf8(text);
  if (!decoded) {
    out.emplace_back(text);
    return out;
  }
  std::u32string current;
  for (char32_t c : *decoded) {
    if (unicode::is_space(c)) {
      if (!current.empty()) {
        out.push_back(unicode::encode_utf8(current));
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(unicode::encode_utf8(current));
  return out;
}

TokenList tokenize(std::string_view text, const TokenScheme& scheme) {
  if (scheme.is_whitespace()) return tokenize_whitespace(text);
  auto& reg = registry();
  TokenizerFn fn;
  {
    std::shared_lock lock(reg.mutex);
    const auto it = reg.plugins.find(scheme.plugin);
    if (it == reg.plugins.end()) throw UnknownPlugin(scheme.plugin);
    fn = it->second;
  }
  return fn(text);
}

void register_tokenizer(const std::string& name, TokenizerFn fn) {
  auto& reg = registry();
  std::unique_lock lock(reg.mutex);
  reg.plugins[name] = std::move(fn);
}

bool has_tokenizer(const std::string& name) {
  auto& reg = registry();
  std::shared_lock lock(reg.mutex);
  return reg.plugins.count(name) > 0;
}

}  // namespace mtaudit
