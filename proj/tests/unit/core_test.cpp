// Copyright 2026 The Sizeprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sizeprobe/core.hpp"

#include <set>

#include "doctest.h"
#include "sizeprobe/rng.hpp"

using namespace sizeprobe;

TEST_SUITE_BEGIN("core");

TEST_CASE("threshold comparison is strict at the boundary") {
  Fraction five_percent = Fraction::fromDecimal(0.05);
  CHECK(thresholdExceeded(106, 100, five_percent));
  CHECK_FALSE(thresholdExceeded(105, 100, five_percent));  // 105 == 100 * 1.05 exactly
  CHECK(thresholdExceeded(136, 100, Fraction::fromDecimal(0.10)));
}

TEST_CASE("threshold at zero triggers on any strict growth") {
  Fraction zero{0, 1};
  CHECK(thresholdExceeded(4, 3, zero));
  CHECK_FALSE(thresholdExceeded(3, 3, zero));
  CHECK_FALSE(thresholdExceeded(2, 3, zero));
}

TEST_CASE("degenerate baseline is an error") {
  CHECK_THROWS_AS(thresholdExceeded(10, 0, Fraction{1, 20}), Error);
  try {
    thresholdExceeded(10, 0, Fraction{1, 20});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateBaseline);
  }
}

TEST_CASE("threshold is monotone in the offender and antitone in the baseline") {
  Rng rng(7);
  Fraction t = Fraction::fromDecimal(0.05);
  for (int trial = 0; trial < 500; ++trial) {
    long long baseline = 1 + static_cast<long long>(rng.bounded(10000));
    long long offender = static_cast<long long>(rng.bounded(20000));
    if (thresholdExceeded(offender, baseline, t)) {
      CHECK(thresholdExceeded(offender + 1, baseline, t));
      if (baseline > 1) CHECK(thresholdExceeded(offender, baseline - 1, t));
    } else {
      if (offender > 0) CHECK_FALSE(thresholdExceeded(offender - 1, baseline, t));
      CHECK_FALSE(thresholdExceeded(offender, baseline + 1, t));
    }
  }
}

TEST_CASE("identical sizes never exceed any threshold") {
  for (long long x : {1LL, 2LL, 7LL, 100LL, 99999LL}) {
    for (double t : {0.0, 0.05, 0.10, 0.5, 1.0}) {
      CHECK_FALSE(thresholdExceeded(x, x, Fraction::fromDecimal(t)));
    }
  }
}

TEST_CASE("fromDecimal produces the exact rational") {
  CHECK(Fraction::fromDecimal(0.05) == Fraction{1, 20});
  CHECK(Fraction::fromDecimal(0.10) == Fraction{1, 10});
  CHECK(Fraction::fromDecimal(0.0) == Fraction{0, 1});
}

TEST_CASE("ratio renders growth percentage") {
  CHECK(Ratio{34, 25}.percentDelta() == "+36.0%");
  CHECK(Ratio{9, 3}.percentDelta() == "+200.0%");
  CHECK(Ratio{111, 100}.percentDelta() == "+11.0%");
}

TEST_CASE("content digest is stable and input-sensitive") {
  CHECK(contentDigest("int f(int a) { return 0; }") ==
        contentDigest("int f(int a) { return 0; }"));
  CHECK(contentDigest("a") != contentDigest("b"));
  CHECK(contentDigest("").size() == 16);
}

TEST_CASE("exhibits equality is an equivalence relation") {
  // Random vectors, then reflexivity/symmetry/transitivity by enumeration.
  Rng rng(42);
  std::vector<ViolationSignature> sigs;
  std::vector<std::string> ids = {"12", "13", "14", "trunk"};
  for (int i = 0; i < 200; ++i) {
    ViolationSignature sig;
    sig.version_ids = ids;
    for (int k = 0; k < 4; ++k) sig.exhibits.push_back(rng.bounded(2) != 0 ? 1 : 0);
    sigs.push_back(sig);
  }
  for (const auto& a : sigs) CHECK(a.sameExhibits(a));
  for (int trial = 0; trial < 2000; ++trial) {
    const auto& a = sigs[rng.bounded(sigs.size())];
    const auto& b = sigs[rng.bounded(sigs.size())];
    const auto& c = sigs[rng.bounded(sigs.size())];
    CHECK(a.sameExhibits(b) == b.sameExhibits(a));
    if (a.sameExhibits(b) && b.sameExhibits(c)) CHECK(a.sameExhibits(c));
  }
}

TEST_CASE("session stats invariants hold for plausible aggregates") {
  SessionStats stats;
  stats.total_programs = 100;
  stats.compilable = 96;
  stats.violations = 30;
  stats.steps_min = 1;
  stats.steps_mean = 2.5;
  stats.steps_max = 10;
  CHECK(stats.violations <= stats.compilable);
  CHECK(stats.compilable <= stats.total_programs);
  CHECK(stats.steps_min <= stats.steps_mean);
  CHECK(stats.steps_mean <= stats.steps_max);
  CHECK(stats.compilableFraction() == doctest::Approx(0.96));
  CHECK(stats.violationFraction() == doctest::Approx(0.30));
}

TEST_SUITE_END();
