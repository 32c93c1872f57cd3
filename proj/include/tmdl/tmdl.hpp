// Copyright 2026 The tmdl Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "tmdl/common.hpp"
#include "tmdl/params.hpp"
#include "tmdl/hilbert.hpp"
#include "tmdl/operators.hpp"
#include "tmdl/hamiltonian.hpp"
#include "tmdl/eigensolvers.hpp"
#include "tmdl/sectors.hpp"
#include "tmdl/blocks.hpp"
#include "tmdl/parallel.hpp"
#include "tmdl/spectra.hpp"
#include "tmdl/perturbation.hpp"
#include "tmdl/meanfield.hpp"
#include "tmdl/phasescan.hpp"
#include "tmdl/spinmap.hpp"
#include "tmdl/circuitmap.hpp"
#include "tmdl/io.hpp"
#include "tmdl/config.hpp"
