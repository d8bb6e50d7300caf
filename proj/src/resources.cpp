#include "clinscreen/resources.hpp"

#include <fstream>
#include <sstream>

#include "clinscreen/errors.hpp"

namespace clinscreen {

namespace {

const char* const kStopwords[] = {
    "a",          "about",    "above",    "after",    "again",      "against",  "all",
    "also",       "although", "am",       "an",       "and",        "any",      "are",
    "as",         "at",       "be",       "because",  "been",       "before",   "being",
    "below",      "between",  "both",     "but",      "by",         "can",      "cannot",
    "could",      "did",      "do",       "does",     "doing",      "down",     "during",
    "each",       "either",   "etc",      "few",      "for",        "from",     "further",
    "had",        "has",      "have",     "having",   "he",         "her",      "here",
    "hers",       "herself",  "him",      "himself",  "his",        "how",      "however",
    "i",          "if",       "in",       "into",     "is",         "it",       "its",
    "itself",     "just",     "may",      "me",       "might",      "more",     "most",
    "must",       "my",       "myself",   "neither",  "no",         "nor",      "not",
    "now",        "of",       "off",      "on",       "once",       "only",     "onto",
    "or",         "other",    "our",      "ours",     "ourselves",  "out",      "over",
    "own",        "per",      "same",     "shall",    "she",        "should",   "so",
    "some",       "such",     "than",     "that",     "the",        "their",    "theirs",
    "them",       "themselves", "then",   "there",    "therefore",  "these",    "they",
    "this",       "those",    "through",  "thus",     "to",         "too",      "under",
    "until",      "up",       "upon",     "very",     "via",        "was",      "we",
    "were",       "what",     "whatever", "when",     "whenever",   "where",    "wherever",
    "whether",    "which",    "while",    "who",      "whom",       "whose",    "why",
    "will",       "with",     "within",   "without",  "would",      "you",      "your",
    "yours",      "yourself", "yourselves",
};

const char* const kAbbreviations[] = {"dr", "mg", "vs", "pt"};

// "inflected-form lemma" pairs; identity entries protect terms the suffix
// rules would mangle.
const char* const kLemmaOverrides[][2] = {
    {"men", "man"},           {"women", "woman"},       {"children", "child"},
    {"feet", "foot"},         {"teeth", "tooth"},       {"mice", "mouse"},
    {"diagnoses", "diagnosis"}, {"metastases", "metastasis"}, {"stenoses", "stenosis"},
    {"analyses", "analysis"}, {"indices", "index"},     {"appendices", "appendix"},
    {"using", "use"},         {"used", "use"},          {"done", "do"},
    {"seen", "see"},          {"taken", "take"},        {"given", "give"},
    {"gone", "go"},           {"underwent", "undergo"}, {"diabetes", "diabetes"},
    {"pancreas", "pancreas"}, {"feces", "feces"},       {"ascites", "ascites"},
};

}  // namespace

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> set(std::begin(kStopwords), std::end(kStopwords));
  return set;
}

const std::unordered_set<std::string>& default_abbreviations() {
  static const std::unordered_set<std::string> set(std::begin(kAbbreviations),
                                                   std::end(kAbbreviations));
  return set;
}

const std::unordered_map<std::string, std::string>& default_lemma_overrides() {
  static const std::unordered_map<std::string, std::string> map = [] {
    std::unordered_map<std::string, std::string> m;
    for (const auto& pair : kLemmaOverrides) m.emplace(pair[0], pair[1]);
    return m;
  }();
  return map;
}

const std::vector<std::pair<std::string, std::vector<std::string>>>& default_gazetteer_entries() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> entries = {
      {"Sign_Symptom",
       {"chest pain", "shortness of breath", "abdominal pain", "angina", "nausea", "vomiting",
        "fatigue", "dizziness", "palpitations", "edema", "dyspnea", "syncope"}},
      {"Disease_disorder",
       {"coronary artery disease", "myocardial infarction", "ischemia", "diabetes",
        "hypertension", "kidney disease", "renal insufficiency", "heart failure",
        "bowel obstruction", "diabetic neuropathy", "retinopathy", "hyperlipidemia",
        "atrial fibrillation", "nephropathy"}},
      {"Diagnostic_procedure",
       {"examination", "blood pressure", "ecg", "ekg", "echocardiogram",
        "cardiac catheterization", "angiography", "ct scan", "ultrasound", "stress test",
        "colonoscopy", "endoscopy"}},
      {"Lab_value",
       {"creatinine", "hba1c", "glucose", "cholesterol", "hemoglobin", "potassium",
        "triglycerides", "creatinine clearance", "ldl", "a1c"}},
      {"Medication",
       {"metformin", "insulin", "aspirin", "nitroglycerin", "statin", "atorvastatin",
        "lisinopril", "metoprolol", "atenolol", "clopidogrel", "plavix", "warfarin",
        "furosemide", "glipizide"}},
      {"Therapeutic_procedure",
       {"surgery", "bypass", "angioplasty", "stent", "dialysis", "resection", "laparotomy",
        "appendectomy", "cholecystectomy", "hernia repair", "cabg"}},
      {"Biological_structure",
       {"artery", "kidney", "heart", "intestine", "bowel", "abdomen", "pancreas", "liver",
        "ventricle", "colon"}},
      {"Clinical_event",
       {"admission", "discharge", "followup", "consult", "transfer", "presentation"}},
      {"History", {"past medical history", "surgical history", "history of"}},
      {"Severity", {"uncontrolled", "severe", "acute", "chronic", "end stage"}},
      {"Dosage", {"twice daily", "once daily", "units", "tablet", "dose"}},
      {"Duration", {"longstanding", "several weeks", "several months", "ongoing"}},
      {"Frequency", {"intermittent", "recurrent", "episodic", "exertional"}},
      {"Age", {"year old", "elderly"}},
      {"Sex", {"male", "female"}},
      {"Family_history", {"family history"}},
      {"Outcome", {"resolved", "improving", "stable condition", "well controlled"}},
      {"Nonbiological_location", {"clinic", "hospital", "emergency department", "ward", "icu"}},
  };
  return entries;
}

const std::string& default_question_template() {
  static const std::string tmpl =
      "You need to summarize the patient's clinical data {text} focusing on the key factors "
      "that make this patient a strong candidate for the clinical trial. You can use the "
      "following points:\n"
      "Chief Complaint:\n"
      "Patient Information:\n"
      "Medical History:\n"
      "Why the patient can be considered for the clinical trial.";
  return tmpl;
}

const std::string& default_refine_template() {
  static const std::string tmpl =
      "Here is an existing summary of the patient's clinical data:\n"
      "{summary}\n"
      "Your job is to produce a summary based on the Classification output explaining why "
      "the patient can be selected for: {criteria}.";
  return tmpl;
}

const std::vector<std::pair<std::string, std::string>>& default_label_definitions() {
  static const std::vector<std::pair<std::string, std::string>> defs = {
      {"ABDOMINAL",
       "History of intra-abdominal surgery, small or large intestine resection, or small "
       "bowel obstruction."},
      {"ADVANCED-CAD",
       "Taking two or more medications to treat coronary artery disease, or a history of "
       "myocardial infarction or ischemia, past or present."},
      {"MAJOR-DIABETES", "Suffering from uncontrolled major diabetes."},
      {"CREATININE", "Serum creatinine above the upper limit of normal."},
  };
  return defs;
}

std::unordered_set<std::string> load_term_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open resource file: " + path);
  std::unordered_set<std::string> set;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') set.insert(line);
  }
  return set;
}

std::unordered_map<std::string, std::string> load_term_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open resource file: " + path);
  std::unordered_map<std::string, std::string> map;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string from, to;
    if (ss >> from >> to) map.emplace(from, to);
  }
  return map;
}

}  // namespace clinscreen
