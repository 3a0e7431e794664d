/*
 * Copyright 2026 The ksclib Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <variant>

#include "ksc/model.hpp"
#include "ksc/sparse.hpp"

namespace ksc {

// Self-describing model archive:
//   bytes 0..7   magic "KSCMODEL"
//   bytes 8..11  format version, u32 little-endian (currently 1)
//   bytes 12..19 header length H, u64 little-endian
//   H bytes      UTF-8 JSON header: model type, kernel spec, k, training
//                labels, source tag and kept row indices for reduced models,
//                and the ordered block table {name, rows, cols}
//   then         the blocks back to back, row-major IEEE f64 little-endian
// A precomputed kernel stores only its kind; the caller reattaches the
// matrix after loading.
void save_model(const KscModel& model, const std::string& path);
void save_model(const ReducedModel& model, const std::string& path);

using AnyModel = std::variant<KscModel, ReducedModel>;

AnyModel load_any_model(const std::string& path);

// Typed loads; throw when the archive holds the other model type.
KscModel load_model(const std::string& path);
ReducedModel load_reduced_model(const std::string& path);

}  // namespace ksc
