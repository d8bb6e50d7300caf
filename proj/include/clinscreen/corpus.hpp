#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace clinscreen {

// The four modeled eligibility criteria, in canonical order. Spellings are
// part of the on-disk and on-wire contracts.
inline constexpr std::size_t kNumCriteria = 4;
inline constexpr std::array<const char*, kNumCriteria> kCriterionNames = {
    "ABDOMINAL", "ADVANCED-CAD", "MAJOR-DIABETES", "CREATININE"};

inline constexpr const char* kMetString = "met";
inline constexpr const char* kNotMetString = "not met";

// Met/not-met flags for all four criteria. Labels are independent; any
// subset may be met.
struct CriterionLabels {
  std::array<bool, kNumCriteria> met = {false, false, false, false};

  bool operator==(const CriterionLabels&) const = default;
};

struct PatientRecord {
  std::string id;
  std::string text;
  std::optional<CriterionLabels> labels;  // absent for inference-only input
};

// Ordered record collection; order is preserved exactly as ingested.
struct Corpus {
  std::vector<PatientRecord> records;

  std::size_t size() const { return records.size(); }
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

// Configuration for the seeded synthetic-corpus generator that stands in for
// the access-restricted clinical data.
struct SyntheticSpec {
  std::size_t n_records = 288;
  std::array<double, kNumCriteria> positive_rate = {0.35, 0.35, 0.35, 0.35};
  // Per-criterion signal phrases; >= 3 each, planted when the criterion is met.
  std::array<std::vector<std::string>, kNumCriteria> phrase_bank;
  std::vector<std::string> filler_vocab;
  IntRange sentences_per_record{8, 14};
};

// Bank of clinical signal phrases and neutral filler used by gen-synthetic.
SyntheticSpec default_synthetic_spec();

// Canonical line-delimited format: one JSON object per line with fields
// "id", "text", and optional "labels". Throws MalformedRecord / DuplicateId.
Corpus load_corpus(const std::filesystem::path& path);

// Writes the canonical form (sorted keys, no extra whitespace, one record
// per line).
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::string record_to_json_line(const PatientRecord& record);
std::string corpus_to_string(const Corpus& corpus);

// Seeded uniform sampling without replacement; both halves keep the original
// record order. Throws HoldoutTooLarge when holdout_n >= corpus size.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, std::uint64_t seed,
                                       std::size_t holdout_n);

// Deterministic generator: labels drawn independently per positive rate; every
// met criterion gets >= 2 distinct phrases from its bank planted verbatim;
// not-met criteria contribute nothing from their banks.
Corpus generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// FNV-1a over the canonical serialization.
std::uint64_t corpus_fingerprint(const Corpus& corpus);

}  // namespace clinscreen
