// Copyright 2026 The gpdistill Authors.
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

#ifndef GPDISTILL_SERIALIZATION_HPP_
#define GPDISTILL_SERIALIZATION_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>

#include "gpdistill/distillation.hpp"
#include "gpdistill/exact_gp.hpp"
#include "gpdistill/fast_inference.hpp"

namespace gpdistill {

// Inference bundle ("GPDISTIL1"): d, m, b, kernel spec, test-weight system,
// U, K_UU, alpha~, V and the standardization used at training time. All
// integers are u64, all reals f64, little-endian. The training weights W
// are deliberately not part of the bundle, so its size depends on m and d
// only.
void write_distilled(std::ostream& out, const DistilledModel& model);
DistilledModel read_distilled(std::istream& in);
void save_distilled(const std::string& path, const DistilledModel& model);
DistilledModel load_distilled(const std::string& path);

// Byte count write_distilled() produces for this model.
std::size_t inference_bundle_bytes(const DistilledModel& model);

// Teacher file ("GPEXACT1"): X, y, spec, packed lower Cholesky factor of
// K + s^2 I and standardization.
void write_exact(std::ostream& out, const ExactGPModel& model);
ExactGPModel read_exact(std::istream& in);
void save_exact(const std::string& path, const ExactGPModel& model);
ExactGPModel load_exact(const std::string& path);

// Peeks at the magic header; returns "GPDISTIL1", "GPEXACT1" or "".
std::string detect_model_format(const std::string& path);

}  // namespace gpdistill

#endif  // GPDISTILL_SERIALIZATION_HPP_
