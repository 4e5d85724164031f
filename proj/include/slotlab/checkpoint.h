// Copyright 2026 The Slotlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SLOTLAB_CHECKPOINT_H_
#define SLOTLAB_CHECKPOINT_H_

#include <filesystem>
#include <memory>

#include "slotlab/model.h"

namespace slotlab {

inline constexpr int kCheckpointFormatVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kBlobFile = "params.bin";

// Writes <dir>/manifest.json and <dir>/params.bin (little-endian, parameters
// concatenated in store order).
template <typename Real>
void save_checkpoint(const std::filesystem::path& dir, const SlotTagger<Real>& model);

// Loads into the requested precision; values stored in the other precision
// are converted.
template <typename Real>
std::unique_ptr<SlotTagger<Real>> load_checkpoint(const std::filesystem::path& dir);

// Reads only the manifest.
nlohmann::json read_manifest(const std::filesystem::path& dir);
DType checkpoint_dtype(const std::filesystem::path& dir);

}  // namespace slotlab

#endif  // SLOTLAB_CHECKPOINT_H_
