//
// Copyright 2026 The dphist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPHIST_TYPES_H_
#define DPHIST_TYPES_H_

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace dphist {

// UTF-8 encoding of U+22A5 (up tack). Every sentinel label starts with it and
// user labels may not.
inline constexpr absl::string_view kReservedLabelPrefix = "\xE2\x8A\xA5";

// An opaque, non-empty item label. Ordering is lexicographic by bytes.
class Label {
 public:
  // Validates a user-supplied label: non-empty and not starting with the
  // reserved sentinel prefix.
  static absl::StatusOr<Label> Create(std::string value);

  // The sentinel family used for padding. Index 0 is the bare sentinel that
  // terminates a short ranked list; index j >= 1 is the j-th padding item.
  static Label Sentinel(int index = 0);

  const std::string& value() const { return value_; }
  bool is_sentinel() const;

  friend auto operator<=>(const Label&, const Label&) = default;
  friend bool operator==(const Label&, const Label&) = default;

 private:
  explicit Label(std::string value) : value_(std::move(value)) {}

  std::string value_;
};

// A finite map from labels to non-negative counts, iterated in label order.
class Histogram {
 public:
  using Map = std::map<Label, int64_t>;
  using const_iterator = Map::const_iterator;

  Histogram() = default;

  // Builds a histogram from raw pairs, validating every label and count.
  static absl::StatusOr<Histogram> FromPairs(
      const std::vector<std::pair<std::string, int64_t>>& pairs);
  static absl::StatusOr<Histogram> FromPairs(
      std::initializer_list<std::pair<std::string, int64_t>> pairs);

  // Fails on a negative count or a label that is already present.
  absl::Status Insert(Label label, int64_t count);

  std::optional<int64_t> Count(const Label& label) const;
  bool contains(const Label& label) const { return entries_.contains(label); }

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }
  const Map& entries() const { return entries_; }

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  Map entries_;
};

// (l0, linf)-sensitivity of an input histogram: one user changes at most l0
// distinct labels, each by at most linf.
class SensitivityBound {
 public:
  static absl::StatusOr<SensitivityBound> Create(int64_t l0, double linf);
  // Only the Gumbel top-k mechanism accepts an unbounded l0.
  static absl::StatusOr<SensitivityBound> UnboundedL0(double linf);

  bool l0_bounded() const { return l0_.has_value(); }
  // Requires l0_bounded().
  int64_t l0() const { return *l0_; }
  double linf() const { return linf_; }

 private:
  SensitivityBound(std::optional<int64_t> l0, double linf)
      : l0_(l0), linf_(linf) {}

  std::optional<int64_t> l0_;
  double linf_;
};

enum class NoiseKind { kLaplace, kGaussian, kGumbel };

absl::string_view NoiseKindName(NoiseKind kind);
absl::StatusOr<NoiseKind> ParseNoiseKind(absl::string_view name);

// A noise law and its scale: b for Laplace, sigma for Gaussian, beta for
// Gumbel.
struct NoiseSpec {
  static absl::StatusOr<NoiseSpec> Create(NoiseKind kind, double scale);

  NoiseKind kind;
  double scale;
};

struct NoisyCount {
  Label label;
  double noisy_count;

  friend bool operator==(const NoisyCount&, const NoisyCount&) = default;
};

}  // namespace dphist

#endif  // DPHIST_TYPES_H_
