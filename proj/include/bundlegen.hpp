// Copyright 2026 The Authors.
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

#include "bundlegen/core/parallel.hpp"
#include "bundlegen/core/types.hpp"
#include "bundlegen/data/corpus.hpp"
#include "bundlegen/data/events.hpp"
#include "bundlegen/data/synthetic.hpp"
#include "bundlegen/error.hpp"
#include "bundlegen/eval/evaluate.hpp"
#include "bundlegen/eval/freq.hpp"
#include "bundlegen/eval/latency.hpp"
#include "bundlegen/eval/metrics.hpp"
#include "bundlegen/eval/oracle.hpp"
#include "bundlegen/generate/beam_search.hpp"
#include "bundlegen/generate/config.hpp"
#include "bundlegen/generate/dpp.hpp"
#include "bundlegen/generate/generate.hpp"
#include "bundlegen/model/checkpoint.hpp"
#include "bundlegen/model/config.hpp"
#include "bundlegen/model/losses.hpp"
#include "bundlegen/model/quality_model.hpp"
#include "bundlegen/model/train.hpp"
#include "bundlegen/numerics/adam.hpp"
#include "bundlegen/numerics/cholesky.hpp"
#include "bundlegen/numerics/grad_check.hpp"
#include "bundlegen/numerics/softmax.hpp"
#include "bundlegen/numerics/tape.hpp"
#include "bundlegen/numerics/tensor.hpp"
