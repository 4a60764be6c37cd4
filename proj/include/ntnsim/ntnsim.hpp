// SPDX-License-Identifier: Apache-2.0
//
// ntnsim: system-level simulator for integrated terrestrial and non-terrestrial networks
// Copyright (C) 2026 The ntnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "antenna.hpp"
#include "channel.hpp"
#include "geometry.hpp"
#include "kpi.hpp"
#include "ntn_phy.hpp"
#include "precoding.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "simulation.hpp"
#include "tn_phy.hpp"
#include "units.hpp"
