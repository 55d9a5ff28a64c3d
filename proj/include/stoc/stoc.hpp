/*
 Copyright 2026 The stoc authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include "stoc/derivative_check.hpp"
#include "stoc/grid.hpp"
#include "stoc/io.hpp"
#include "stoc/iterate.hpp"
#include "stoc/kkt_oracle.hpp"
#include "stoc/model.hpp"
#include "stoc/problems.hpp"
#include "stoc/riccati.hpp"
#include "stoc/solver.hpp"
#include "stoc/transcription.hpp"
#include "stoc/types.hpp"
