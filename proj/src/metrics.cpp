#include "mtaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "mtaudit/errors.hpp"
#include "mtaudit/unicode.hpp"

namespace mtaudit::metrics {

namespace {

// Unit separator cannot occur inside a whitespace token.
constexpr char kJoin = '\x1f';

using NgramCounts = std::unordered_map<std::string, std::size_t>;

std::string join_span(std::span<const std::string> toks, std::size_t start, std::size_t n) {
  std::string key = toks[start];
  for (std::size_t k = 1; k < n; ++k) {
    key += kJoin;
    key += toks[start + k];
  }
  return key;
}

NgramCounts count_ngrams(std::span<const std::string> toks, std::size_t n) {
  NgramCounts counts;
  if (toks.size() < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) ++counts[join_span(toks, i, n)];
  return counts;
}

std::unordered_map<std::u32string, std::size_t> count_char_ngrams(const std::u32string& s,
                                                                   std::size_t n) {
  std::unordered_map<std::u32string, std::size_t> counts;
  if (s.size() < n) return counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

template <typename Map>
NgramLevelStats level_stats(const Map& hyp, const Map& ref) {
  NgramLevelStats st;
  for (const auto& [k, v] : hyp) {
    st.hyp += v;
    const auto it = ref.find(k);
    if (it != ref.end()) st.matches += std::min(v, it->second);
  }
  for (const auto& [k, v] : ref) st.ref += v;
  return st;
}

std::u32string decode_or_throw(std::string_view text) {
  auto decoded = unicode::decode_utf8(text);
  if (!decoded) throw ValidationError("input is not valid UTF-8");
  return std::move(*decoded);
}

double combine_bleu(std::span<const double> precisions, int effective_order, std::size_t c,
                    std::size_t r, const std::vector<double>& weights) {
  if (c == 0 || effective_order <= 0) return 0.0;
  const double bp = c >= r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  double wsum = 0.0;
  for (int n = 0; n < effective_order; ++n) wsum += weights[n];
  double log_sum = 0.0;
  for (int n = 0; n < effective_order; ++n) {
    if (precisions[n] <= 0.0) return 0.0;
    log_sum += weights[n] / wsum * std::log(precisions[n]);
  }
  return bp * std::exp(log_sum);
}

}  // namespace

// ---- BLEU ------------------------------------------------------------------

void BleuConfig::validate() const {
  if (max_order < 1) throw ValidationError("BLEU max_order must be >= 1");
  if (!weights.empty()) {
    if (weights.size() != static_cast<std::size_t>(max_order)) {
      throw ValidationError("BLEU weights must have max_order entries");
    }
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw ValidationError("BLEU weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("BLEU weights must sum to 1");
  }
}

std::vector<double> BleuConfig::effective_weights() const {
  if (!weights.empty()) return weights;
  return std::vector<double>(static_cast<std::size_t>(max_order), 1.0 / max_order);
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (matches.size() < other.matches.size()) {
    matches.resize(other.matches.size());
    totals.resize(other.totals.size());
  }
  for (std::size_t n = 0; n < other.matches.size(); ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats bleu_stats(std::span<const std::string> hyp_tokens,
                     std::span<const TokenList> ref_tokens, int max_order) {
  BleuStats st;
  const auto order = static_cast<std::size_t>(max_order);
  st.matches.assign(order, 0);
  st.totals.assign(order, 0);
  st.hyp_len = hyp_tokens.size();

  // Closest reference length; ties go to the shorter reference.
  bool first = true;
  for (const auto& ref : ref_tokens) {
    const auto len = ref.size();
    if (first) {
      st.ref_len = len;
      first = false;
      continue;
    }
    const auto diff = [&](std::size_t l) {
      return l > st.hyp_len ? l - st.hyp_len : st.hyp_len - l;
    };
    if (diff(len) < diff(st.ref_len) || (diff(len) == diff(st.ref_len) && len < st.ref_len)) {
      st.ref_len = len;
    }
  }

  for (std::size_t n = 1; n <= order; ++n) {
    if (hyp_tokens.size() < n) break;
    st.totals[n - 1] = hyp_tokens.size() - n + 1;
    const auto hyp_counts = count_ngrams(hyp_tokens, n);
    NgramCounts max_ref;
    for (const auto& ref : ref_tokens) {
      for (const auto& [k, v] : count_ngrams(ref, n)) {
        auto& slot = max_ref[k];
        slot = std::max(slot, v);
      }
    }
    std::size_t m = 0;
    for (const auto& [k, v] : hyp_counts) {
      const auto it = max_ref.find(k);
      if (it != max_ref.end()) m += std::min(v, it->second);
    }
    st.matches[n - 1] = m;
  }
  return st;
}

BleuBreakdown bleu_from_stats(const BleuStats& stats, const BleuConfig& cfg) {
  cfg.validate();
  const auto order = static_cast<std::size_t>(cfg.max_order);
  BleuBreakdown b;
  b.hyp_len = stats.hyp_len;
  b.ref_len = stats.ref_len;
  b.matches = stats.matches;
  b.totals = stats.totals;
  b.matches.resize(order, 0);
  b.totals.resize(order, 0);
  b.precisions.assign(order, 0.0);

  // Exponential decay: every zero-match order doubles the penalty factor.
  double decay = 1.0;
  for (std::size_t n = 0; n < order; ++n) {
    if (b.totals[n] == 0) break;
    b.effective_order = static_cast<int>(n + 1);
    if (b.matches[n] == 0) {
      if (cfg.smoothing == Smoothing::ExponentialDecay) {
        decay *= 2.0;
        b.precisions[n] = 100.0 / (decay * static_cast<double>(b.totals[n]));
      }
    } else {
      b.precisions[n] =
          100.0 * static_cast<double>(b.matches[n]) / static_cast<double>(b.totals[n]);
    }
  }

  if (b.hyp_len == 0) {
    b.bp = 0.0;
    b.score = 0.0;
    return b;
  }
  b.bp = b.hyp_len >= b.ref_len
             ? 1.0
             : std::exp(1.0 - static_cast<double>(b.ref_len) / static_cast<double>(b.hyp_len));
  b.score = combine_bleu(b.precisions, b.effective_order, b.hyp_len, b.ref_len,
                         cfg.effective_weights());
  return b;
}

double bleu_score_from_fields(const BleuBreakdown& b, const BleuConfig& cfg) {
  return combine_bleu(b.precisions, b.effective_order, b.hyp_len, b.ref_len,
                      cfg.effective_weights());
}

BleuBreakdown bleu(std::string_view hypothesis, std::span<const std::string> references,
                   const BleuConfig& cfg) {
  cfg.validate();
  if (references.empty()) throw EmptyReference();
  std::vector<TokenList> refs;
  refs.reserve(references.size());
  bool any = false;
  for (const auto& r : references) {
    refs.push_back(tokenize(r, cfg.tokenizer));
    any = any || !refs.back().empty();
  }
  if (!any) throw EmptyReference();
  const auto hyp = tokenize(hypothesis, cfg.tokenizer);
  return bleu_from_stats(bleu_stats(hyp, refs, cfg.max_order), cfg);
}

void to_json(nlohmann::json& j, const BleuBreakdown& b) {
  j = nlohmann::json{{"score", b.score},
                     {"bp", b.bp},
                     {"hyp_len", b.hyp_len},
                     {"ref_len", b.ref_len},
                     {"precisions", b.precisions},
                     {"matches", b.matches},
                     {"totals", b.totals},
                     {"effective_order", b.effective_order}};
}

// ---- ChrF++ ----------------------------------------------------------------

void ChrfConfig::validate() const {
  if (!(beta > 0.0)) throw ValidationError("chrF beta must be > 0");
  if (word_order < 0) throw ValidationError("chrF word_order must be >= 0");
  if (char_order < 1) throw ValidationError("chrF char_order must be >= 1");
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  if (chars.size() < other.chars.size()) chars.resize(other.chars.size());
  if (words.size() < other.words.size()) words.resize(other.words.size());
  for (std::size_t n = 0; n < other.chars.size(); ++n) {
    chars[n].hyp += other.chars[n].hyp;
    chars[n].ref += other.chars[n].ref;
    chars[n].matches += other.chars[n].matches;
  }
  for (std::size_t n = 0; n < other.words.size(); ++n) {
    words[n].hyp += other.words[n].hyp;
    words[n].ref += other.words[n].ref;
    words[n].matches += other.words[n].matches;
  }
  return *this;
}

ChrfStats chrf_stats(std::string_view hypothesis, std::string_view reference,
                     const ChrfConfig& cfg) {
  cfg.validate();
  ChrfStats st;
  auto hyp_chars = decode_or_throw(hypothesis);
  auto ref_chars = decode_or_throw(reference);
  if (cfg.remove_whitespace_for_char_ngrams) {
    hyp_chars = unicode::strip_whitespace(hyp_chars);
    ref_chars = unicode::strip_whitespace(ref_chars);
  }
  st.chars.resize(static_cast<std::size_t>(cfg.char_order));
  for (std::size_t n = 1; n <= st.chars.size(); ++n) {
    st.chars[n - 1] = level_stats(count_char_ngrams(hyp_chars, n), count_char_ngrams(ref_chars, n));
  }
  const auto hyp_words = tokenize_whitespace(hypothesis);
  const auto ref_words = tokenize_whitespace(reference);
  st.words.resize(static_cast<std::size_t>(cfg.word_order));
  for (std::size_t n = 1; n <= st.words.size(); ++n) {
    st.words[n - 1] = level_stats(count_ngrams(hyp_words, n), count_ngrams(ref_words, n));
  }
  return st;
}

ChrfBreakdown chrf_from_stats(const ChrfStats& stats, const ChrfConfig& cfg) {
  cfg.validate();
  ChrfBreakdown b;
  double p_sum = 0.0;
  double r_sum = 0.0;
  const auto walk = [&](const std::vector<NgramLevelStats>& levels, std::size_t limit,
                        std::vector<double>& ps, std::vector<double>& rs) {
    int effective = 0;
    for (std::size_t n = 0; n < std::min(levels.size(), limit); ++n) {
      const auto& lv = levels[n];
      if (lv.hyp == 0 || lv.ref == 0) break;
      const double p = static_cast<double>(lv.matches) / static_cast<double>(lv.hyp);
      const double r = static_cast<double>(lv.matches) / static_cast<double>(lv.ref);
      ps.push_back(p);
      rs.push_back(r);
      p_sum += p;
      r_sum += r;
      ++effective;
    }
    return effective;
  };
  b.effective_char_order = walk(stats.chars, static_cast<std::size_t>(cfg.char_order),
                                b.char_precisions, b.char_recalls);
  b.effective_word_order = walk(stats.words, static_cast<std::size_t>(cfg.word_order),
                                b.word_precisions, b.word_recalls);
  const int levels = b.effective_char_order + b.effective_word_order;
  if (levels == 0) return b;
  b.precision = p_sum / levels;
  b.recall = r_sum / levels;
  const double beta2 = cfg.beta * cfg.beta;
  const double denom = beta2 * b.precision + b.recall;
  if (denom > 0.0) b.score = 100.0 * (1.0 + beta2) * b.precision * b.recall / denom;
  return b;
}

ChrfBreakdown chrfpp(std::string_view hypothesis, std::string_view reference,
                     const ChrfConfig& cfg) {
  return chrf_from_stats(chrf_stats(hypothesis, reference, cfg), cfg);
}

void to_json(nlohmann::json& j, const ChrfBreakdown& b) {
  j = nlohmann::json{{"score", b.score},
                     {"precision", b.precision},
                     {"recall", b.recall},
                     {"char_precisions", b.char_precisions},
                     {"char_recalls", b.char_recalls},
                     {"word_precisions", b.word_precisions},
                     {"word_recalls", b.word_recalls},
                     {"effective_char_order", b.effective_char_order},
                     {"effective_word_order", b.effective_word_order}};
}

// ---- edit rates ------------------------------------------------------------

void to_json(nlohmann::json& j, const EditBreakdown& b) {
  j = nlohmann::json{{"distance", b.distance},
                     {"ref_units", b.ref_units},
                     {"rate", b.rate},
                     {"unit", b.unit == EditUnit::Character ? "character" : "word"},
                     {"shifts", b.shifts}};
}

EditBreakdown cer(std::string_view hypothesis, std::string_view reference) {
  const auto ref = decode_or_throw(reference);
  if (ref.empty()) throw EmptyReference();
  const auto hyp = decode_or_throw(hypothesis);
  EditBreakdown b;
  b.unit = EditUnit::Character;
  b.distance = levenshtein<char32_t>(hyp, ref);
  b.ref_units = ref.size();
  b.rate = static_cast<double>(b.distance) / static_cast<double>(b.ref_units);
  return b;
}

namespace {

// For each reference index k, the hypothesis index it is aligned with in
// one minimal Levenshtein alignment (insertion point for unmatched ref
// tokens).
std::vector<std::size_t> align_ref_to_hyp(std::span<const std::string> hyp,
                                          std::span<const std::string> ref) {
  const std::size_t n = hyp.size();
  const std::size_t m = ref.size();
  std::vector<std::size_t> dp((n + 1) * (m + 1));
  const auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return dp[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::min({at(i - 1, j - 1) + (hyp[i - 1] == ref[j - 1] ? 0 : 1), at(i - 1, j) + 1,
                           at(i, j - 1) + 1});
    }
  }
  std::vector<std::size_t> pos(m, 0);
  std::size_t i = n;
  std::size_t j = m;
  while (j > 0) {
    if (i > 0 && at(i, j) == at(i - 1, j - 1) + (hyp[i - 1] == ref[j - 1] ? 0 : 1)) {
      pos[j - 1] = i - 1;
      --i;
      --j;
    } else if (at(i, j) == at(i, j - 1) + 1) {
      pos[j - 1] = i;
      --j;
    } else {
      --i;
    }
  }
  return pos;
}

}  // namespace

EditBreakdown ter_tokens(std::span<const std::string> hyp, std::span<const std::string> ref,
                         const TerConfig& cfg) {
  if (ref.empty()) throw EmptyReference();
  EditBreakdown b;
  b.unit = EditUnit::Word;
  b.ref_units = ref.size();
  std::size_t edits = levenshtein<std::string>(hyp, ref);

  if (cfg.shifts && cfg.max_shift_size > 0) {
    std::vector<std::string> cur(hyp.begin(), hyp.end());
    // Reference phrases up to max_shift_size, with their start positions.
    std::unordered_map<std::string, std::vector<std::size_t>> ref_phrases;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      for (std::size_t len = 1; len <= cfg.max_shift_size && k + len <= ref.size(); ++len) {
        ref_phrases[join_span(ref, k, len)].push_back(k);
      }
    }
    // Greedy: apply the shift with the largest edit reduction until none helps.
    while (edits > 0) {
      const auto ref_to_hyp = align_ref_to_hyp(cur, ref);
      std::size_t best_edits = edits;
      std::vector<std::string> best;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        for (std::size_t len = 1; len <= cfg.max_shift_size && i + len <= cur.size(); ++len) {
          const auto it = ref_phrases.find(join_span(cur, i, len));
          if (it == ref_phrases.end()) break;
          for (std::size_t k : it->second) {
            // Already sitting on its reference occurrence.
            if (ref_to_hyp[k] == i) continue;
            std::size_t dest = ref_to_hyp[k];
            if (dest > i && dest < i + len) continue;
            if (dest >= i + len) dest -= len;
            const std::size_t dist = dest > i ? dest - i : i - dest;
            if (dist == 0 || dist > cfg.max_shift_distance) continue;
            std::vector<std::string> cand;
            cand.reserve(cur.size());
            cand.insert(cand.end(), cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(i));
            cand.insert(cand.end(), cur.begin() + static_cast<std::ptrdiff_t>(i + len), cur.end());
            cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(dest),
                        cur.begin() + static_cast<std::ptrdiff_t>(i),
                        cur.begin() + static_cast<std::ptrdiff_t>(i + len));
            const auto e = levenshtein<std::string>(cand, ref);
            if (e < best_edits) {
              best_edits = e;
              best = std::move(cand);
            }
          }
        }
      }
      if (best_edits >= edits) break;
      cur = std::move(best);
      edits = best_edits;
      ++b.shifts;
    }
  }

  b.distance = edits + b.shifts;
  b.rate = static_cast<double>(b.distance) / static_cast<double>(b.ref_units);
  return b;
}

EditBreakdown ter(std::string_view hypothesis, std::string_view reference, const TerConfig& cfg) {
  const auto ref = tokenize(reference, cfg.tokenizer);
  const auto hyp = tokenize(hypothesis, cfg.tokenizer);
  return ter_tokens(hyp, ref, cfg);
}

}  // namespace mtaudit::metrics
