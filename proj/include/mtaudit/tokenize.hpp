#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mtaudit {

using TokenList = std::vector<std::string>;
using TokenizerFn = std::function<TokenList(std::string_view)>;

// Names the tokenizer to use. An empty plugin name selects whitespace
// splitting; anything else is looked up in the plugin registry.
struct TokenScheme {
  std::string plugin;

  static TokenScheme whitespace() { return {}; }
  static TokenScheme named(std::string name) { return {std::move(name)}; }
  bool is_whitespace() const { return plugin.empty() || plugin == "whitespace"; }
};

// Splits on runs of Unicode whitespace. Empty tokens are dropped.
TokenList tokenize_whitespace(std::string_view text);

// Throws UnknownPlugin when the scheme names an unregistered plugin.
TokenList tokenize(std::string_view text, const TokenScheme& scheme = {});

// Registers an external analyzer (e.g. a morphological segmenter) under
// `name`. Built in: "whitespace", "chars" (one token per scalar value,
// whitespace skipped). Thread-safe.
void register_tokenizer(const std::string& name, TokenizerFn fn);
bool has_tokenizer(const std::string& name);

}  // namespace mtaudit
