#pragma once

#include <span>
#include <string>
#include <vector>

#include "mtaudit/metrics.hpp"
#include "mtaudit/parallel.hpp"

// Batch scoring over aligned hypothesis/reference lists. Every function has
// a serial reference path (Exec::Serial) and an OpenMP path
// (Exec::Parallel); both produce identical results because per-sentence
// statistics are integer counts reduced in index order.
namespace mtaudit::kernels {

// Throws AlignmentError when the spans differ in length.
metrics::BleuStats corpus_bleu_stats(std::span<const std::string> hyps,
                                     std::span<const std::string> refs,
                                     const metrics::BleuConfig& cfg, Exec exec);

metrics::BleuBreakdown corpus_bleu(std::span<const std::string> hyps,
                                   std::span<const std::string> refs,
                                   const metrics::BleuConfig& cfg = {},
                                   Exec exec = Exec::Parallel);

metrics::ChrfStats corpus_chrf_stats(std::span<const std::string> hyps,
                                     std::span<const std::string> refs,
                                     const metrics::ChrfConfig& cfg, Exec exec);

// Corpus ChrF++ from summed statistics, not a mean of sentence scores.
metrics::ChrfBreakdown corpus_chrf(std::span<const std::string> hyps,
                                   std::span<const std::string> refs,
                                   const metrics::ChrfConfig& cfg = {},
                                   Exec exec = Exec::Parallel);

std::vector<metrics::BleuBreakdown> sentence_bleu(std::span<const std::string> hyps,
                                                  std::span<const std::string> refs,
                                                  const metrics::BleuConfig& cfg = {},
                                                  Exec exec = Exec::Parallel);

std::vector<metrics::ChrfBreakdown> sentence_chrf(std::span<const std::string> hyps,
                                                  std::span<const std::string> refs,
                                                  const metrics::ChrfConfig& cfg = {},
                                                  Exec exec = Exec::Parallel);

// Micro-averaged: total edits / total reference units.
metrics::EditBreakdown corpus_cer(std::span<const std::string> hyps,
                                  std::span<const std::string> refs, Exec exec = Exec::Parallel);

metrics::EditBreakdown corpus_ter(std::span<const std::string> hyps,
                                  std::span<const std::string> refs,
                                  const metrics::TerConfig& cfg = {}, Exec exec = Exec::Parallel);

std::vector<metrics::EditBreakdown> sentence_cer(std::span<const std::string> hyps,
                                                 std::span<const std::string> refs,
                                                 Exec exec = Exec::Parallel);

std::vector<metrics::EditBreakdown> sentence_ter(std::span<const std::string> hyps,
                                                 std::span<const std::string> refs,
                                                 const metrics::TerConfig& cfg = {},
                                                 Exec exec = Exec::Parallel);

}  // namespace mtaudit::kernels
