#include "mtaudit/kernels.hpp"

#include "mtaudit/errors.hpp"

namespace mtaudit::kernels {

namespace {

void check_aligned(std::size_t hyps, std::size_t refs) {
  if (hyps != refs) {
    throw AlignmentError("hypothesis count " + std::to_string(hyps) +
                         " != reference count " + std::to_string(refs));
  }
}

metrics::BleuStats one_bleu(const std::string& hyp, const std::string& ref,
                            const metrics::BleuConfig& cfg) {
  const TokenList refs[] = {tokenize(ref, cfg.tokenizer)};
  return metrics::bleu_stats(tokenize(hyp, cfg.tokenizer), refs, cfg.max_order);
}

template <typename Stats>
Stats reduce_in_order(std::vector<Stats>& parts) {
  Stats total{};
  for (const auto& p : parts) total += p;
  return total;
}

metrics::EditBreakdown sum_edits(const std::vector<metrics::EditBreakdown>& parts,
                                 metrics::EditUnit unit) {
  metrics::EditBreakdown total;
  total.unit = unit;
  for (const auto& p : parts) {
    total.distance += p.distance;
    total.ref_units += p.ref_units;
    total.shifts += p.shifts;
  }
  if (total.ref_units == 0) throw EmptyReference();
  total.rate = static_cast<double>(total.distance) / static_cast<double>(total.ref_units);
  return total;
}

}  // namespace

metrics::BleuStats corpus_bleu_stats(std::span<const std::string> hyps,
                                     std::span<const std::string> refs,
                                     const metrics::BleuConfig& cfg, Exec exec) {
  check_aligned(hyps.size(), refs.size());
  cfg.validate();
  std::vector<metrics::BleuStats> parts(hyps.size());
  for_each_index(hyps.size(), exec, [&](std::size_t i) { parts[i] = one_bleu(hyps[i], refs[i], cfg); });
  auto total = reduce_in_order(parts);
  total.matches.resize(static_cast<std::size_t>(cfg.max_order), 0);
  total.totals.resize(static_cast<std::size_t>(cfg.max_order), 0);
  return total;
}

metrics::BleuBreakdown corpus_bleu(std::span<const std::string> hyps,
                                   std::span<const std::string> refs,
                                   const metrics::BleuConfig& cfg, Exec exec) {
  return metrics::bleu_from_stats(corpus_bleu_stats(hyps, refs, cfg, exec), cfg);
}

metrics::ChrfStats corpus_chrf_stats(std::span<const std::string> hyps,
                                     std::span<const std::string> refs,
                                     const metrics::ChrfConfig& cfg, Exec exec) {
  check_aligned(hyps.size(), refs.size());
  cfg.validate();
  std::vector<metrics::ChrfStats> parts(hyps.size());
  for_each_index(hyps.size(), exec,
                 [&](std::size_t i) { parts[i] = metrics::chrf_stats(hyps[i], refs[i], cfg); });
  auto total = reduce_in_order(parts);
  total.chars.resize(static_cast<std::size_t>(cfg.char_order));
  total.words.resize(static_cast<std::size_t>(cfg.word_order));
  return total;
}

metrics::ChrfBreakdown corpus_chrf(std::span<const std::string> hyps,
                                   std::span<const std::string> refs,
                                   const metrics::ChrfConfig& cfg, Exec exec) {
  return metrics::chrf_from_stats(corpus_chrf_stats(hyps, refs, cfg, exec), cfg);
}

std::vector<metrics::BleuBreakdown> sentence_bleu(std::span<const std::string> hyps,
                                                  std::span<const std::string> refs,
                                                  const metrics::BleuConfig& cfg, Exec exec) {
  check_aligned(hyps.size(), refs.size());
  cfg.validate();
  std::vector<metrics::BleuBreakdown> out(hyps.size());
  for_each_index(hyps.size(), exec, [&](std::size_t i) {
    out[i] = metrics::bleu_from_stats(one_bleu(hyps[i], refs[i], cfg), cfg);
  });
  return out;
}

std::vector<metrics::ChrfBreakdown> sentence_chrf(std::span<const std::string> hyps,
                                                  std::span<const std::string> refs,
                                                  const metrics::ChrfConfig& cfg, Exec exec) {
  check_aligned(hyps.size(), refs.size());
  std::vector<metrics::ChrfBreakdown> out(hyps.size());
  for_each_index(hyps.size(), exec,
                 [&](std::size_t i) { out[i] = metrics::chrfpp(hyps[i], refs[i], cfg); });
  return out;
}

std::vector<metrics::EditBreakdown> sentence_cer(std::span<const std::string> hyps,
                                                 std::span<const std::string> refs, Exec exec) {
  check_aligned(hyps.size(), refs.size());
  std::vector<metrics::EditBreakdown> out(hyps.size());
  for_each_index(hyps.size(), exec, [&](std::size_t i) { out[i] = metrics::cer(hyps[i], refs[i]); });
  return out;
}

std::vector<metrics::EditBreakdown> sentence_ter(std::span<const std::string> hyps,
                                                 std::span<const std::string> refs,
                                                 const metrics::TerConfig& cfg, Exec exec) {
  check_aligned(hyps.size(), refs.size());
  std::vector<metrics::EditBreakdown> out(hyps.size());
  for_each_index(hyps.size(), exec,
                 [&](std::size_t i) { out[i] = metrics::ter(hyps[i], refs[i], cfg); });
  return out;
}

metrics::EditBreakdown corpus_cer(std::span<const std::string> hyps,
                                  std::span<const std::string> refs, Exec exec) {
  return sum_edits(sentence_cer(hyps, refs, exec), metrics::EditUnit::Character);
}

metrics::EditBreakdown corpus_ter(std::span<const std::string> hyps,
                                  std::span<const std::string> refs,
                                  const metrics::TerConfig& cfg, Exec exec) {
  return sum_edits(sentence_ter(hyps, refs, cfg, exec), metrics::EditUnit::Word);
}

}  // namespace mtaudit::kernels
