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

#include <map>
#include <numeric>
#include <set>

namespace sizeprobe {

ViolationSignature releaseScreen(const std::vector<CompilerSpec>& release_matrix,
                                 const ExhibitCheck& check) {
  ViolationSignature signature;
  for (const auto& spec : release_matrix) {
    ExhibitResult result = check(spec);
    signature.version_ids.push_back(spec.version_label.empty() ? spec.id
                                                               : spec.version_label);
    if (!result.compiled) {
      signature.exhibits.push_back(0);
      signature.annotations.push_back(spec.id + ": compile failure" +
                                      (result.note.empty() ? "" : " (" + result.note + ")"));
    } else {
      signature.exhibits.push_back(result.triggered ? 1 : 0);
      signature.annotations.push_back(result.note);
    }
  }
  return signature;
}

BisectResult bisectFirstTrue(std::size_t revision_count, const RevisionProbe& probe) {
  BisectResult result;
  if (revision_count < 2) {
    result.detail = "need at least two revisions";
    return result;
  }

  auto probeAt = [&](std::size_t index) {
    ++result.probes;
    return probe(index);
  };

  // Verify the endpoints, skipping unavailable revisions inward.
  std::size_t lo = 0;
  std::optional<bool> lo_value;
  while (lo < revision_count && !(lo_value = probeAt(lo)).has_value()) ++lo;
  std::size_t hi = revision_count;
  std::optional<bool> hi_value;
  while (hi > lo && !(hi_value = probeAt(hi - 1)).has_value()) --hi;
  if (lo >= hi || !lo_value.has_value() || !hi_value.has_value() || hi - lo < 2) {
    result.detail = "too few provisionable revisions";
    return result;
  }
  if (*lo_value) {
    result.detail = "check already triggers at the start of the range";
    return result;
  }
  if (!*hi_value) {
    result.detail = "check does not trigger at the end of the range";
    return result;
  }
  std::size_t known_true = hi - 1;

  // Invariant: lo is false, known_true is true.
  while (known_true - lo > 1) {
    std::size_t mid = lo + (known_true - lo) / 2;
    std::optional<bool> value;
    std::size_t at = mid;
    while (at < known_true && !(value = probeAt(at)).has_value()) ++at;
    if (!value.has_value()) {
      // Everything between mid and the known-true revision is unavailable;
      // retry below mid.
      std::size_t down = mid;
      while (down > lo + 1 && !value.has_value()) value = probeAt(--down);
      if (!value.has_value()) break;  // nothing left to narrow
      at = down;
    }
    if (*value) {
      known_true = at;
    } else {
      lo = at;
    }
  }

  result.status = BisectResult::Status::Found;
  result.first_bad_index = known_true;
  return result;
}

std::vector<int> groupSignatures(const std::vector<ViolationSignature>& signatures) {
  std::vector<int> parent(signatures.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  // Equal exhibits vectors are duplicates; so are equal culprit revisions.
  std::map<std::pair<std::vector<std::string>, std::vector<std::uint8_t>>, int> by_exhibits;
  std::map<std::string, int> by_culprit;
  for (std::size_t i = 0; i < signatures.size(); ++i) {
    const auto& sig = signatures[i];
    auto key = std::make_pair(sig.version_ids, sig.exhibits);
    auto [it, inserted] = by_exhibits.try_emplace(key, static_cast<int>(i));
    if (!inserted) unite(it->second, static_cast<int>(i));
    if (sig.culprit_revision.has_value()) {
      auto [cit, cinserted] = by_culprit.try_emplace(*sig.culprit_revision,
                                                     static_cast<int>(i));
      if (!cinserted) unite(cit->second, static_cast<int>(i));
    }
  }

  std::vector<int> groups(signatures.size());
  std::map<int, int> root_to_group;
  int next_group = 0;
  for (std::size_t i = 0; i < signatures.size(); ++i) {
    int root = find(static_cast<int>(i));
    auto [it, inserted] = root_to_group.try_emplace(root, next_group);
    if (inserted) ++next_group;
    groups[i] = it->second;
  }
  return groups;
}

std::vector<std::pair<int, int>> possiblyRelatedPairs(
    const std::vector<ViolationSignature>& signatures) {
  std::vector<int> groups = groupSignatures(signatures);
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < signatures.size(); ++i) {
    for (std::size_t j = i + 1; j < signatures.size(); ++j) {
      if (groups[i] == groups[j]) continue;
      const auto& a = signatures[i];
      const auto& b = signatures[j];
      if (a.version_ids != b.version_ids) continue;
      bool overlap = false;
      for (std::size_t k = 0; k < a.exhibits.size() && k < b.exhibits.size(); ++k) {
        if (a.exhibits[k] != 0 && b.exhibits[k] != 0) {
          overlap = true;
          break;
        }
      }
      if (overlap) pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return pairs;
}

}  // namespace sizeprobe
