// Copyright 2026 The csshash Authors
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

#pragma once

#include "csshash/channels.hpp"
#include "csshash/errors.hpp"
#include "csshash/gf2.hpp"
#include "csshash/io.hpp"
#include "csshash/mixture.hpp"
#include "csshash/perm_clifford.hpp"
#include "csshash/rng.hpp"
#include "csshash/simulator.hpp"
#include "csshash/stabilizer.hpp"
#include "csshash/typical_set.hpp"
#include "csshash/yield.hpp"
