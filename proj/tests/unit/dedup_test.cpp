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

#include "sizeprobe/dedup.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sizeprobe/rng.hpp"

using namespace sizeprobe;

namespace {

CompilerSpec release(const std::string& label) {
  CompilerSpec spec;
  spec.id = "gcc-" + label;
  spec.version_label = label;
  spec.invocation = "true {flags} {input} {output}";
  return spec;
}

// Linear-scan oracle: first index whose probe is true among available ones.
std::optional<std::size_t> linearFirstTrue(std::size_t n, const RevisionProbe& probe) {
  for (std::size_t i = 0; i < n; ++i) {
    auto value = probe(i);
    if (value.has_value() && *value) return i;
  }
  return std::nullopt;
}

}  // namespace

TEST_SUITE_BEGIN("dedup");

TEST_CASE("release screening builds the exhibition vector") {
  std::vector<CompilerSpec> matrix = {release("12"), release("13"), release("14"),
                                      release("trunk")};
  // Scripted: the regression appears from version 14 on.
  ViolationSignature signature = releaseScreen(matrix, [](const CompilerSpec& spec) {
    ExhibitResult result;
    result.compiled = true;
    result.triggered = spec.version_label == "14" || spec.version_label == "trunk";
    return result;
  });
  CHECK(signature.version_ids == std::vector<std::string>{"12", "13", "14", "trunk"});
  CHECK(signature.exhibits == std::vector<std::uint8_t>{0, 0, 1, 1});
}

TEST_CASE("release screening records compile failures as non-exhibiting") {
  std::vector<CompilerSpec> matrix = {release("12"), release("13")};
  ViolationSignature signature = releaseScreen(matrix, [](const CompilerSpec& spec) {
    ExhibitResult result;
    if (spec.version_label == "12") {
      result.compiled = false;
      result.note = "unsupported builtin";
    } else {
      result.triggered = true;
    }
    return result;
  });
  CHECK(signature.exhibits == std::vector<std::uint8_t>{0, 1});
  REQUIRE(signature.annotations.size() == 2);
  CHECK(signature.annotations[0].find("compile failure") != std::string::npos);
}

TEST_CASE("a violation reproducing on no release is the all-false vector") {
  std::vector<CompilerSpec> matrix = {release("12"), release("13"), release("14")};
  ViolationSignature signature = releaseScreen(matrix, [](const CompilerSpec&) {
    return ExhibitResult{false, true, ""};
  });
  CHECK(std::count(signature.exhibits.begin(), signature.exhibits.end(), 1) == 0);
}

TEST_CASE("bisection finds a scripted flip in few probes") {
  // 16 revisions, first bad one at index 9.
  int probes = 0;
  RevisionProbe probe = [&](std::size_t index) -> std::optional<bool> {
    ++probes;
    return index >= 9;
  };
  BisectResult result = bisectFirstTrue(16, probe);
  REQUIRE((result.status == BisectResult::Status::Found));
  CHECK(result.first_bad_index == 9);
  // Two endpoint verifications plus the binary search.
  CHECK(result.probes - 2 <= 5);
  CHECK(result.probes <= static_cast<int>(std::ceil(std::log2(16))) + 2);
}

TEST_CASE("bisection boundary: flip right after the range start") {
  BisectResult result =
      bisectFirstTrue(8, [](std::size_t index) -> std::optional<bool> { return index >= 1; });
  REQUIRE((result.status == BisectResult::Status::Found));
  CHECK(result.first_bad_index == 1);
}

TEST_CASE("monotone ranges are not bisectable") {
  BisectResult all_false =
      bisectFirstTrue(8, [](std::size_t) -> std::optional<bool> { return false; });
  CHECK((all_false.status == BisectResult::Status::NotBisectable));

  BisectResult all_true =
      bisectFirstTrue(8, [](std::size_t) -> std::optional<bool> { return true; });
  CHECK((all_true.status == BisectResult::Status::NotBisectable));
}

TEST_CASE("unavailable revisions are skipped and the search continues") {
  // True from 9 on, but 8 and 9 cannot be provisioned: the first observable
  // bad revision is 10.
  RevisionProbe probe = [](std::size_t index) -> std::optional<bool> {
    if (index == 8 || index == 9) return std::nullopt;
    return index >= 9;
  };
  BisectResult result = bisectFirstTrue(16, probe);
  REQUIRE((result.status == BisectResult::Status::Found));
  CHECK(result.first_bad_index == 10);
}

TEST_CASE("bisection equals the linear-scan oracle on random flips") {
  Rng rng(20260808);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng.bounded(255);
    std::size_t flip = 1 + rng.bounded(n - 1);  // first true index, interior
    int probes = 0;
    RevisionProbe probe = [&](std::size_t index) -> std::optional<bool> {
      ++probes;
      return index >= flip;
    };
    BisectResult result = bisectFirstTrue(n, probe);
    REQUIRE((result.status == BisectResult::Status::Found));
    auto oracle = linearFirstTrue(n, [&](std::size_t i) -> std::optional<bool> {
      return i >= flip;
    });
    REQUIRE(oracle.has_value());
    CHECK(result.first_bad_index == *oracle);
    CHECK(result.probes <= static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 2);
  }
}

TEST_CASE("grouping merges equal exhibits vectors") {
  ViolationSignature a;
  a.version_ids = {"12", "13", "14"};
  a.exhibits = {0, 1, 1};
  ViolationSignature b = a;
  ViolationSignature c;
  c.version_ids = {"12", "13", "14"};
  c.exhibits = {0, 0, 1};

  std::vector<int> groups = groupSignatures({a, b, c});
  CHECK(groups[0] == groups[1]);
  CHECK(groups[0] != groups[2]);
}

TEST_CASE("grouping merges equal culprit revisions across different vectors") {
  ViolationSignature a;
  a.version_ids = {"12", "13"};
  a.exhibits = {0, 1};
  a.culprit_revision = "r12345";
  ViolationSignature b;
  b.version_ids = {"12", "13"};
  b.exhibits = {1, 1};
  b.culprit_revision = "r12345";
  ViolationSignature c;
  c.version_ids = {"12", "13"};
  c.exhibits = {1, 1};
  c.culprit_revision = "r99999";

  std::vector<int> groups = groupSignatures({a, b, c});
  CHECK(groups[0] == groups[1]);  // same culprit
  CHECK(groups[1] == groups[2]);  // same exhibits as b
  // Closure: all three collapse into one group.
  CHECK(groups[0] == groups[2]);
}

TEST_CASE("grouping induces the same partition regardless of input order") {
  Rng rng(7);
  std::vector<ViolationSignature> signatures;
  for (int i = 0; i < 40; ++i) {
    ViolationSignature sig;
    sig.version_ids = {"a", "b", "c"};
    for (int k = 0; k < 3; ++k) sig.exhibits.push_back(rng.bounded(2) != 0 ? 1 : 0);
    signatures.push_back(sig);
  }
  std::vector<int> forward = groupSignatures(signatures);
  std::vector<ViolationSignature> reversed(signatures.rbegin(), signatures.rend());
  std::vector<int> backward = groupSignatures(reversed);

  for (std::size_t i = 0; i < signatures.size(); ++i) {
    for (std::size_t j = 0; j < signatures.size(); ++j) {
      bool same_forward = forward[i] == forward[j];
      bool same_backward =
          backward[signatures.size() - 1 - i] == backward[signatures.size() - 1 - j];
      CHECK(same_forward == same_backward);
    }
  }
}

TEST_CASE("overlapping but unequal version sets are possibly related, not merged") {
  ViolationSignature a;
  a.version_ids = {"12", "13", "14"};
  a.exhibits = {0, 1, 1};
  ViolationSignature b;
  b.version_ids = {"12", "13", "14"};
  b.exhibits = {1, 1, 0};  // overlaps on 13
  ViolationSignature c;
  c.version_ids = {"12", "13", "14"};
  c.exhibits = {1, 0, 0};  // disjoint from a

  auto pairs = possiblyRelatedPairs({a, b, c});
  REQUIRE(pairs.size() == 2);  // (a,b) and (b,c); (a,c) are disjoint
  CHECK(std::find(pairs.begin(), pairs.end(), std::make_pair(0, 1)) != pairs.end());
  CHECK(std::find(pairs.begin(), pairs.end(), std::make_pair(1, 2)) != pairs.end());
}

TEST_SUITE_END();
