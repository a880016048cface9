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

#ifndef DPHIST_INTERNAL_STATUS_MACROS_H_
#define DPHIST_INTERNAL_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DPHIST_STATUS_CONCAT_INNER_(x, y) x##y
#define DPHIST_STATUS_CONCAT_(x, y) DPHIST_STATUS_CONCAT_INNER_(x, y)

#define DPHIST_RETURN_IF_ERROR(expr)                   \
  do {                                                 \
    ::absl::Status dphist_status_ = (expr);            \
    if (!dphist_status_.ok()) return dphist_status_;   \
  } while (0)

#define DPHIST_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                  \
  if (!statusor.ok()) return statusor.status();             \
  lhs = *std::move(statusor)

#define DPHIST_ASSIGN_OR_RETURN(lhs, rexpr) \
  DPHIST_ASSIGN_OR_RETURN_IMPL_(            \
      DPHIST_STATUS_CONCAT_(dphist_statusor_, __LINE__), lhs, rexpr)

#endif  // DPHIST_INTERNAL_STATUS_MACROS_H_
