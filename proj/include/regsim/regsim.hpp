/*
 * Copyright 2026-present the regsim authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "regsim/csv.hpp"
#include "regsim/ess.hpp"
#include "regsim/filters.hpp"
#include "regsim/io.hpp"
#include "regsim/market_data.hpp"
#include "regsim/policies.hpp"
#include "regsim/run.hpp"
#include "regsim/scenario.hpp"
#include "regsim/settlement.hpp"
#include "regsim/signal.hpp"
#include "regsim/version.hpp"
