#include "clinscreen/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "clinscreen/errors.hpp"
#include "clinscreen/rng.hpp"

namespace clinscreen {

using json = nlohmann::json;

namespace {

int criterion_index(const std::string& name) {
  for (std::size_t i = 0; i < kNumCriteria; ++i)
    if (name == kCriterionNames[i]) return static_cast<int>(i);
  return -1;
}

PatientRecord parse_record(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw MalformedRecord(line_no, e.what());
  }
  if (!j.is_object()) throw MalformedRecord(line_no, "record is not an object");
  if (!j.contains("id") || !j["id"].is_string()) throw MalformedRecord(line_no, "missing string field 'id'");
  if (!j.contains("text") || !j["text"].is_string())
    throw MalformedRecord(line_no, "missing string field 'text'");

  PatientRecord rec;
  rec.id = j["id"].get<std::string>();
  rec.text = j["text"].get<std::string>();
  if (rec.id.empty()) throw MalformedRecord(line_no, "empty id");

  if (j.contains("labels")) {
    if (!j["labels"].is_object()) throw MalformedRecord(line_no, "'labels' is not an object");
    CriterionLabels labels;
    std::array<bool, kNumCriteria> present = {false, false, false, false};
    for (const auto& [key, value] : j["labels"].items()) {
      int idx = criterion_index(key);
      if (idx < 0) throw MalformedRecord(line_no, "unknown label name: " + key);
      if (!value.is_string()) throw MalformedRecord(line_no, "label value for " + key + " is not a string");
      const std::string v = value.get<std::string>();
      if (v == kMetString) {
        labels.met[idx] = true;
      } else if (v == kNotMetString) {
        labels.met[idx] = false;
      } else {
        throw MalformedRecord(line_no, "label value for " + key + " must be \"met\" or \"not met\"");
      }
      present[idx] = true;
    }
    for (std::size_t i = 0; i < kNumCriteria; ++i)
      if (!present[i])
        throw MalformedRecord(line_no, std::string("missing label: ") + kCriterionNames[i]);
    if (rec.text.empty()) throw MalformedRecord(line_no, "labeled record with empty text");
    rec.labels = labels;
  }
  return rec;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path.string());
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    PatientRecord rec = parse_record(line, line_no);
    if (!seen.insert(rec.id).second) throw DuplicateId(rec.id);
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

std::string record_to_json_line(const PatientRecord& record) {
  json j;  // nlohmann's default object is key-sorted, which is our canonical form
  j["id"] = record.id;
  j["text"] = record.text;
  if (record.labels) {
    json labels;
    for (std::size_t i = 0; i < kNumCriteria; ++i)
      labels[kCriterionNames[i]] = record.labels->met[i] ? kMetString : kNotMetString;
    j["labels"] = labels;
  }
  return j.dump();
}

std::string corpus_to_string(const Corpus& corpus) {
  std::string out;
  for (const auto& rec : corpus.records) {
    out += record_to_json_line(rec);
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file: " + path.string());
  out << corpus_to_string(corpus);
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, std::uint64_t seed,
                                       std::size_t holdout_n) {
  if (holdout_n > 0 && holdout_n >= corpus.size()) throw HoldoutTooLarge(holdout_n, corpus.size());
  Rng rng(stable_hash(seed, 0x53117));
  std::vector<std::size_t> holdout_idx = rng.sample_without_replacement(corpus.size(), holdout_n);
  std::vector<bool> in_holdout(corpus.size(), false);
  for (std::size_t i : holdout_idx) in_holdout[i] = true;
  Corpus train, holdout;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    (in_holdout[i] ? holdout : train).records.push_back(corpus.records[i]);
  return {std::move(train), std::move(holdout)};
}

SyntheticSpec default_synthetic_spec() {
  SyntheticSpec spec;
  spec.phrase_bank[0] = {"intra abdominal surgery", "bowel obstruction", "intestine resection",
                         "laparotomy scar", "appendectomy", "hernia repair", "abdominal pain"};
  spec.phrase_bank[1] = {"myocardial infarction", "ischemia", "coronary artery disease",
                         "unstable angina", "nitroglycerin", "cardiac catheterization"};
  spec.phrase_bank[2] = {"uncontrolled diabetes", "insulin dependent", "diabetic neuropathy",
                         "elevated hba1c", "metformin", "retinopathy"};
  spec.phrase_bank[3] = {"elevated creatinine", "renal insufficiency", "kidney disease",
                         "reduced creatinine clearance", "serum creatinine high"};
  spec.filler_vocab = {"patient",  "denies",   "reports", "followup",   "examination",
                       "vitals",   "normal",   "review",  "clinic",     "noted",
                       "continues", "daily",   "tolerated", "plan",     "assessment",
                       "alert",    "oriented", "afebrile", "unremarkable", "stable"};
  return spec;
}

namespace {

void validate_spec(const SyntheticSpec& spec) {
  if (spec.n_records == 0) throw InvalidSpec("n_records must be positive");
  for (double r : spec.positive_rate)
    if (r < 0.0 || r > 1.0) throw InvalidSpec("positive rates must lie in [0, 1]");
  for (std::size_t i = 0; i < kNumCriteria; ++i) {
    if (spec.phrase_bank[i].size() < 3)
      throw InvalidSpec(std::string("phrase bank for ") + kCriterionNames[i] +
                        " needs at least 3 phrases");
    for (const auto& p : spec.phrase_bank[i])
      if (p.empty()) throw InvalidSpec("empty phrase in bank");
  }
  if (spec.filler_vocab.empty()) throw InvalidSpec("filler vocabulary is empty");
  for (const auto& t : spec.filler_vocab)
    if (t.empty()) throw InvalidSpec("empty filler token");
  if (spec.sentences_per_record.lo < 1 || spec.sentences_per_record.hi < spec.sentences_per_record.lo)
    throw InvalidSpec("bad sentences_per_record range");
}

}  // namespace

Corpus generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  Corpus corpus;
  corpus.records.reserve(spec.n_records);
  for (std::size_t i = 0; i < spec.n_records; ++i) {
    Rng rng(stable_hash(seed, i + 1));  // per-record stream
    PatientRecord rec;
    {
      std::ostringstream id;
      id << "synthetic-" << std::setw(4) << std::setfill('0') << (i + 1);
      rec.id = id.str();
    }
    CriterionLabels labels;
    for (std::size_t j = 0; j < kNumCriteria; ++j) labels.met[j] = rng.bernoulli(spec.positive_rate[j]);
    rec.labels = labels;

    // sentences as segment lists; a segment is one filler token or one whole
    // planted phrase, so later plants can never split an earlier phrase
    int n_sent = rng.uniform_int(spec.sentences_per_record.lo, spec.sentences_per_record.hi);
    std::vector<std::vector<std::string>> sentences(static_cast<std::size_t>(n_sent));
    for (auto& sent : sentences) {
      int len = rng.uniform_int(5, 9);
      for (int k = 0; k < len; ++k)
        sent.push_back(spec.filler_vocab[rng.below(spec.filler_vocab.size())]);
    }

    for (std::size_t j = 0; j < kNumCriteria; ++j) {
      if (!labels.met[j]) continue;
      const auto& bank = spec.phrase_bank[j];
      std::size_t count = 2 + (bank.size() > 2 && rng.bernoulli(0.5) ? 1 : 0);
      count = std::min(count, bank.size());
      std::vector<std::size_t> picks = rng.sample_without_replacement(bank.size(), count);
      for (std::size_t p : picks) {
        auto& sent = sentences[rng.below(sentences.size())];
        std::size_t pos = rng.below(sent.size() + 1);
        std::string phrase;  // bank entry with whitespace normalized
        {
          std::istringstream ss(bank[p]);
          std::string tok;
          while (ss >> tok) {
            if (!phrase.empty()) phrase += ' ';
            phrase += tok;
          }
        }
        sent.insert(sent.begin() + static_cast<std::ptrdiff_t>(pos), std::move(phrase));
      }
    }

    std::ostringstream text;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      for (std::size_t k = 0; k < sentences[s].size(); ++k) {
        if (k) text << ' ';
        text << sentences[s][k];
      }
      text << '.';
      if (s + 1 < sentences.size()) text << ' ';
    }
    rec.text = text.str();
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

std::uint64_t corpus_fingerprint(const Corpus& corpus) {
  return fnv1a64(corpus_to_string(corpus));
}

}  // namespace clinscreen
