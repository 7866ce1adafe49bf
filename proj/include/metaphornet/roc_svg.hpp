// Copyright 2026 The MetaphorNet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>

#include "metaphornet/evaluation.hpp"

namespace metaphornet {

// Standalone SVG line plot of an ROC curve on [0,1] x [0,1] axes with the
// AUC in the title. Output depends only on the inputs.
std::string render_roc_svg(std::span<const RocPoint> points, double auc);

}  // namespace metaphornet
