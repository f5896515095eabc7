// Copyright 2026 The PMPC Authors
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

#ifndef PMPC__PMPC_HPP_
#define PMPC__PMPC_HPP_

#include "pmpc/controller.hpp"
#include "pmpc/densities.hpp"
#include "pmpc/errors.hpp"
#include "pmpc/models.hpp"
#include "pmpc/parallel.hpp"
#include "pmpc/particle_filter.hpp"
#include "pmpc/rng.hpp"
#include "pmpc/scenario.hpp"

#endif  // PMPC__PMPC_HPP_
