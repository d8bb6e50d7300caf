#include <doctest.h>

#include <cstddef>
#include <string>
#include <vector>

#include "clinscreen/errors.hpp"
#include "clinscreen/eval.hpp"
#include "clinscreen/rng.hpp"

using namespace clinscreen;

namespace {

LabelMatrix matrix_of(const std::vector<std::vector<int>>& rows,
                      std::vector<std::string> names) {
  LabelMatrix m = LabelMatrix::zeros(rows.size(), std::move(names));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m.set(i, j, rows[i][j] != 0);
  }
  return m;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("micro counts pool every cell of the label matrix") {
  const auto truth = matrix_of({{1, 0}, {1, 1}, {0, 0}}, {"A", "B"});
  const auto pred = matrix_of({{1, 1}, {1, 0}, {0, 0}}, {"A", "B"});
  const MicroCounts c = micro_counts(truth, pred);
  CHECK(c.tp == 2);
  CHECK(c.fp == 1);
  CHECK(c.fn == 1);
  CHECK(c.tn == 2);
}

TEST_CASE("the tp=3 fp=1 fn=0 hand case gives 0.75 / 1.0 / 6/7") {
  MicroCounts c;
  c.tp = 3;
  c.fp = 1;
  c.fn = 0;
  const PRF prf = prf_from_counts(c);
  CHECK(prf.precision == 0.75);
  CHECK(prf.recall == 1.0);
  // harmonic mean 2*0.75/1.75 = 6/7 = 0.857142857...
  CHECK(prf.f1 == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("zero denominators fall back to zero, not NaN") {
  const PRF empty = prf_from_counts(MicroCounts{});
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);

  MicroCounts no_pred;
  no_pred.fn = 4;
  const PRF p = prf_from_counts(no_pred);
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);
  CHECK(p.f1 == 0.0);
}

TEST_CASE("micro_prf equals a brute-force recount on random matrices") {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    LabelMatrix truth = LabelMatrix::zeros(n, {"A", "B", "C", "D"});
    LabelMatrix pred = LabelMatrix::zeros(n, {"A", "B", "C", "D"});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        truth.set(i, j, rng.bernoulli(0.4));
        pred.set(i, j, rng.bernoulli(0.4));
      }
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        if (truth.at(i, j) && pred.at(i, j)) ++tp;
        if (!truth.at(i, j) && pred.at(i, j)) ++fp;
        if (truth.at(i, j) && !pred.at(i, j)) ++fn;
      }
    }
    const double precision = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double recall = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    const PRF prf = micro_prf(truth, pred);
    CHECK(prf.precision == doctest::Approx(precision).epsilon(1e-12));
    CHECK(prf.recall == doctest::Approx(recall).epsilon(1e-12));
    CHECK(prf.f1 == doctest::Approx(f1).epsilon(1e-12));
  }
}

TEST_CASE("per-label report keeps label order and validates shapes") {
  const auto truth = matrix_of({{1, 0}, {0, 1}}, {"X", "Y"});
  const auto perfect = matrix_of({{1, 0}, {0, 1}}, {"X", "Y"});
  const auto report = per_label_prf(truth, perfect);
  REQUIRE(report.size() == 2);
  CHECK(report[0].first == "X");
  CHECK(report[1].first == "Y");
  CHECK(report[0].second.f1 == 1.0);
  CHECK(report[1].second.f1 == 1.0);

  const auto wrong_n = matrix_of({{1, 0}}, {"X", "Y"});
  CHECK_THROWS_AS(micro_prf(truth, wrong_n), ShapeMismatch);
  const auto wrong_l = matrix_of({{1}, {0}}, {"X"});
  CHECK_THROWS_AS(per_label_prf(truth, wrong_l), ShapeMismatch);
}

TEST_CASE("rouge tokenization lowercases alphanumeric runs") {
  CHECK(rouge_tokens("The cat... SAT!") == std::vector<std::string>{"the", "cat", "sat"});
  CHECK(rouge_tokens("") == std::vector<std::string>{});
}

TEST_CASE("identity gives 1.0 for every rouge variant") {
  const std::string text = "the patient denies chest pain and nausea today";
  for (const RougeScore& s :
       {rouge_n(text, text, 1), rouge_n(text, text, 2), rouge_l(text, text)}) {
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
  }
}

TEST_CASE("rouge-1 on the cat-sat pair matches the hand values") {
  const RougeScore s = rouge_n("the cat sat", "the cat sat on the mat", 1);
  CHECK(s.precision == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.recall == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("rouge-1 clips repeated candidate grams at the reference count") {
  // candidate has "the" three times, reference only once
  const RougeScore s = rouge_n("the the the", "the cat", 1);
  CHECK(s.precision == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(s.recall == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("rouge-2 counts bigram overlap") {
  const RougeScore s = rouge_n("a b c", "a b d", 2);
  // candidate bigrams {a b, b c}, reference {a b, b d}; overlap 1
  CHECK(s.precision == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.recall == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.f1 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(rouge_n("a", "a", 3), InvalidSpec);
  CHECK_THROWS_AS(rouge_n("a", "a", 0), InvalidSpec);
}

TEST_CASE("rouge-l uses the longest common subsequence") {
  const RougeScore s = rouge_l("a b c d", "a c b d");
  // LCS("abcd","acbd") = 3 (e.g. a b d), both lengths 4
  CHECK(s.precision == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(s.recall == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(s.f1 == doctest::Approx(0.75).epsilon(1e-9));

  const RougeScore sub = rouge_l("b d", "a b c d");
  CHECK(sub.precision == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sub.recall == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("empty sides score zero under the stated convention") {
  for (const RougeScore& s : {rouge_n("", "the cat", 1), rouge_n("the cat", "", 1),
                              rouge_l("", ""), rouge_n("a b", "c d", 2)}) {
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);
  }
}

}  // TEST_SUITE
