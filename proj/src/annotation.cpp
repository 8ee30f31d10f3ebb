#include "mtaudit/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "mtaudit/errors.hpp"
#include "mtaudit/io.hpp"
#include "mtaudit/kernels.hpp"

namespace mtaudit::annotation {

namespace {

struct CategoryName {
  ErrorCategory category;
  std::string_view display;
  std::string_view ident;
};

constexpr CategoryName kCategoryNames[] = {
    {ErrorCategory::Correct, "Correct", "Correct"},
    {ErrorCategory::WrongGrammar, "Wrong grammar", "WrongGrammar"},
    {ErrorCategory::WrongPunctuation, "Wrong punctuation", "WrongPunctuation"},
    {ErrorCategory::WrongSpelling, "Wrong spelling", "WrongSpelling"},
    {ErrorCategory::WrongCapitalization, "Wrong capitalization", "WrongCapitalization"},
    {ErrorCategory::InaccurateAddition, "Inaccurately added information", "InaccurateAddition"},
    {ErrorCategory::InaccurateOmission, "Inaccurately omitted information", "InaccurateOmission"},
    {ErrorCategory::Mistranslation, "Mistranslation", "Mistranslation"},
    {ErrorCategory::UnnaturalTranslation, "Unnatural translation", "UnnaturalTranslation"},
    {ErrorCategory::UntranslatedText, "Untranslated text", "UntranslatedText"},
    {ErrorCategory::WrongRegister, "Wrong register", "WrongRegister"},
    {ErrorCategory::Other, "Other", "Other"},
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

template <typename T>
std::optional<T> optional_field(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

std::string_view display_name(ErrorCategory c) {
  for (const auto& n : kCategoryNames) {
    if (n.category == c) return n.display;
  }
  return "Other";
}

std::optional<ErrorCategory> parse_category(std::string_view s) {
  for (const auto& n : kCategoryNames) {
    if (iequals(s, n.display) || iequals(s, n.ident)) return n.category;
  }
  return std::nullopt;
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Minor:
      return "Minor";
    case Severity::Major:
      return "Major";
    case Severity::Critical:
      return "Critical";
  }
  return "Minor";
}

std::optional<Severity> parse_severity(std::string_view s) {
  for (auto v : {Severity::Minor, Severity::Major, Severity::Critical}) {
    if (iequals(s, to_string(v))) return v;
  }
  return std::nullopt;
}

// ---- timestamps --------------------------------------------------------------

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Timestamp parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0;
  int h = 0, mi = 0, sec = 0;
  char z = 0;
  const std::string str(s);
  if (std::sscanf(str.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec, &z) != 7 ||
      z != 'Z' || str.size() != 20) {
    throw ValidationError("timestamp must be YYYY-MM-DDTHH:MM:SSZ, got '" + str + "'");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) {
    throw ValidationError("timestamp out of range: '" + str + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

Timestamp now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

// ---- JSON --------------------------------------------------------------------

void to_json(nlohmann::json& j, const AnnotationRecord& r) {
  nlohmann::json cats = nlohmann::json::array();
  for (auto c : r.categories) cats.push_back(std::string(display_name(c)));
  j = nlohmann::json{{"pair_id", r.pair_id},
                     {"categories", cats},
                     {"severity", r.severity ? nlohmann::json(std::string(to_string(*r.severity)))
                                             : nlohmann::json(nullptr)},
                     {"corrected_translation", r.corrected_translation
                                                   ? nlohmann::json(*r.corrected_translation)
                                                   : nlohmann::json(nullptr)},
                     {"comments", r.comments ? nlohmann::json(*r.comments) : nlohmann::json(nullptr)},
                     {"annotator_id", r.annotator_id},
                     {"timestamp", format_timestamp(r.timestamp)}};
  if (r.error_tally) {
    j["error_tally"] = {{"minor", r.error_tally->minor},
                        {"major", r.error_tally->major},
                        {"critical", r.error_tally->critical}};
  }
}

void from_json(const nlohmann::json& j, AnnotationRecord& r) {
  try {
    if (!j.is_object()) throw ValidationError("annotation record must be a JSON object");
    r = AnnotationRecord{};
    r.pair_id = j.at("pair_id").get<std::size_t>();
    for (const auto& c : j.at("categories")) {
      const auto name = c.get<std::string>();
      const auto cat = parse_category(name);
      if (!cat) throw ValidationError("unknown error category '" + name + "'");
      r.categories.insert(*cat);
    }
    if (const auto sev = optional_field<std::string>(j, "severity")) {
      const auto parsed = parse_severity(*sev);
      if (!parsed) throw ValidationError("unknown severity '" + *sev + "'");
      r.severity = *parsed;
    }
    r.corrected_translation = optional_field<std::string>(j, "corrected_translation");
    r.comments = optional_field<std::string>(j, "comments");
    r.annotator_id = j.at("annotator_id").get<std::string>();
    r.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
    if (const auto it = j.find("error_tally"); it != j.end() && !it->is_null()) {
      r.error_tally = ErrorTally{it->value("minor", std::size_t{0}), it->value("major", std::size_t{0}),
                                 it->value("critical", std::size_t{0})};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed annotation record: ") + e.what());
  }
}

// ---- validation --------------------------------------------------------------

std::string_view to_string(ViolationCode c) {
  switch (c) {
    case ViolationCode::EmptyCategories:
      return "empty_categories";
    case ViolationCode::CorrectNotExclusive:
      return "correct_not_exclusive";
    case ViolationCode::SeverityRequired:
      return "severity_required";
    case ViolationCode::SeverityOnCorrect:
      return "severity_on_correct";
  }
  return "unknown";
}

void to_json(nlohmann::json& j, const Violation& v) {
  j = nlohmann::json{{"code", std::string(to_string(v.code))}, {"message", v.message}};
}

std::vector<Violation> validate(const AnnotationRecord& record) {
  std::vector<Violation> out;
  if (record.categories.empty()) {
    out.push_back({ViolationCode::EmptyCategories, "at least one category must be selected"});
    return out;
  }
  if (record.is_correct()) {
    if (record.categories.size() > 1) {
      out.push_back({ViolationCode::CorrectNotExclusive,
                     "Correct must be exclusive: it cannot be combined with error categories"});
    }
    if (record.severity) {
      out.push_back({ViolationCode::SeverityOnCorrect,
                     "severity must be absent when the translation is Correct"});
    }
  } else if (!record.severity) {
    out.push_back({ViolationCode::SeverityRequired,
                   "severity is required when an error category is selected"});
  }
  return out;
}

// ---- scores ------------------------------------------------------------------

double tqs(const SeverityCounts& c) {
  if (c.total() == 0) throw ValidationError("TQS needs at least one judgment (EmptyCounts)");
  const double num = 3.0 * c.correct + 2.0 * c.minor + 1.0 * c.major + 0.0 * c.critical;
  return 100.0 * num / (3.0 * static_cast<double>(c.total()));
}

double tqs_mqm(const ErrorCounts& c) {
  if (c.words == 0) throw ValidationError("TQS_MQM needs a positive word count (ZeroWordCount)");
  const double penalty = static_cast<double>(c.minor) + 5.0 * static_cast<double>(c.major) +
                         10.0 * static_cast<double>(c.critical);
  return 100.0 * (1.0 - penalty / static_cast<double>(c.words));
}

void to_json(nlohmann::json& j, const AggregateStats& s) {
  nlohmann::json hist = nlohmann::json::object();
  for (auto c : kAllCategories) hist[std::string(display_name(c))] = s.category_histogram.at(c);
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j = nlohmann::json{
      {"records", s.records},
      {"category_histogram", hist},
      {"severity_counts",
       {{"correct", s.severity_counts.correct},
        {"minor", s.severity_counts.minor},
        {"major", s.severity_counts.major},
        {"critical", s.severity_counts.critical}}},
      {"error_counts",
       {{"minor", s.error_counts.minor},
        {"major", s.error_counts.major},
        {"critical", s.error_counts.critical},
        {"words", s.error_counts.words}}},
      {"tqs", opt(s.tqs)},
      {"tqs_mqm", opt(s.tqs_mqm)},
      {"corrected", s.corrected},
      {"cer", opt(s.cer)},
      {"ter", opt(s.ter)},
  };
}

AggregateStats aggregate(std::span<const AnnotationRecord> records,
                         std::span<const std::string> references, const AggregateOptions& opts) {
  AggregateStats st;
  for (auto c : kAllCategories) st.category_histogram[c] = 0;

  std::set<std::pair<std::size_t, std::string>> seen;
  std::vector<std::string> originals;
  std::vector<std::string> corrections;
  for (const auto& r : records) {
    if (r.pair_id >= references.size()) {
      throw UnknownPairId("annotation references unknown pair id " + std::to_string(r.pair_id));
    }
    if (!seen.emplace(r.pair_id, r.annotator_id).second) {
      throw DuplicateRecord("duplicate annotation for pair " + std::to_string(r.pair_id) +
                            " by annotator '" + r.annotator_id + "'");
    }
    ++st.records;
    for (auto c : r.categories) ++st.category_histogram[c];

    if (r.is_correct()) {
      ++st.severity_counts.correct;
    } else if (r.severity) {
      switch (*r.severity) {
        case Severity::Minor:
          ++st.severity_counts.minor;
          break;
        case Severity::Major:
          ++st.severity_counts.major;
          break;
        case Severity::Critical:
          ++st.severity_counts.critical;
          break;
      }
    } else {
      throw ValidationError("record for pair " + std::to_string(r.pair_id) +
                            " has error categories but no severity");
    }

    // One error per (record, category) at the record's severity unless an
    // explicit tally was supplied.
    if (r.error_tally) {
      st.error_counts.minor += r.error_tally->minor;
      st.error_counts.major += r.error_tally->major;
      st.error_counts.critical += r.error_tally->critical;
    } else if (!r.is_correct()) {
      const auto n = r.categories.size();
      switch (*r.severity) {
        case Severity::Minor:
          st.error_counts.minor += n;
          break;
        case Severity::Major:
          st.error_counts.major += n;
          break;
        case Severity::Critical:
          st.error_counts.critical += n;
          break;
      }
    }
    st.error_counts.words += tokenize(references[r.pair_id], opts.tokenizer).size();

    if (r.corrected_translation && !r.corrected_translation->empty()) {
      originals.push_back(references[r.pair_id]);
      corrections.push_back(*r.corrected_translation);
    }
  }

  if (st.severity_counts.total() > 0) st.tqs = tqs(st.severity_counts);
  if (st.error_counts.words > 0) st.tqs_mqm = tqs_mqm(st.error_counts);
  st.corrected = originals.size();
  if (!originals.empty()) {
    // Original benchmark reference measured against the annotator's fix.
    st.cer = 100.0 * kernels::corpus_cer(originals, corrections, Exec::Serial).rate;
    metrics::TerConfig ter_cfg;
    ter_cfg.tokenizer = opts.tokenizer;
    st.ter = 100.0 * kernels::corpus_ter(originals, corrections, ter_cfg, Exec::Serial).rate;
  }
  return st;
}

AggregateStats aggregate(std::span<const AnnotationRecord> records, const Corpus& corpus,
                         const AggregateOptions& opts) {
  return aggregate(records, corpus.references(), opts);
}

std::string export_csv(std::span<const AnnotationRecord> records, const Corpus& corpus) {
  std::string out = io::csv_row({"id", "source", "reference", "evaluation", "error_severity",
                                 "corrected_translation", "comments", "annotator_id", "timestamp"});
  for (const auto& r : records) {
    if (r.pair_id >= corpus.size()) {
      throw UnknownPairId("annotation references unknown pair id " + std::to_string(r.pair_id));
    }
    std::string eval;
    for (auto c : r.categories) {
      if (!eval.empty()) eval += "; ";
      eval += display_name(c);
    }
    const auto& pair = corpus.pairs[r.pair_id];
    out += io::csv_row({std::to_string(r.pair_id), pair.source_text, pair.reference_text, eval,
                        r.severity ? std::string(to_string(*r.severity)) : std::string(),
                        r.corrected_translation.value_or(""), r.comments.value_or(""),
                        r.annotator_id, format_timestamp(r.timestamp)});
  }
  return out;
}

}  // namespace mtaudit::annotation
