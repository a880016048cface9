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

#ifndef DPHIST_TESTS_TEST_UTIL_H_
#define DPHIST_TESTS_TEST_UTIL_H_

#include <string>
#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gmock/gmock.h"

namespace dphist::testing {

inline const absl::Status& GetStatus(const absl::Status& status) {
  return status;
}
template <typename T>
const absl::Status& GetStatus(const absl::StatusOr<T>& status_or) {
  return status_or.status();
}

MATCHER(IsOk, "is OK") {
  const absl::Status& status = GetStatus(arg);
  if (!status.ok()) *result_listener << "status is " << status.ToString();
  return status.ok();
}

MATCHER_P(StatusIs, code, "has status code " + ::testing::PrintToString(code)) {
  const absl::Status& status = GetStatus(arg);
  *result_listener << "status is " << status.ToString();
  return status.code() == code;
}

MATCHER_P2(StatusIs, code, message_matcher, "") {
  const absl::Status& status = GetStatus(arg);
  *result_listener << "status is " << status.ToString();
  return status.code() == code &&
         ::testing::ExplainMatchResult(message_matcher,
                                       std::string(status.message()),
                                       result_listener);
}

}  // namespace dphist::testing

#define DPHIST_TEST_CONCAT_INNER(a, b) a##b
#define DPHIST_TEST_CONCAT(a, b) DPHIST_TEST_CONCAT_INNER(a, b)

#define ASSERT_OK(expr) ASSERT_THAT(expr, ::dphist::testing::IsOk())
#define EXPECT_OK(expr) EXPECT_THAT(expr, ::dphist::testing::IsOk())

#define ASSERT_OK_AND_ASSIGN(lhs, rexpr)                                  \
  auto DPHIST_TEST_CONCAT(_status_or_, __LINE__) = (rexpr);               \
  ASSERT_OK(DPHIST_TEST_CONCAT(_status_or_, __LINE__).status());          \
  lhs = std::move(DPHIST_TEST_CONCAT(_status_or_, __LINE__)).value()

#endif  // DPHIST_TESTS_TEST_UTIL_H_
