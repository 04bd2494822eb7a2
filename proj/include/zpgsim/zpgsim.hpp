// Copyright 2026 The zpgsim authors
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

#ifndef ZPGSIM_ZPGSIM_HPP
#define ZPGSIM_ZPGSIM_HPP

#include "zpgsim/batch.hpp"
#include "zpgsim/decompose.hpp"
#include "zpgsim/distributions.hpp"
#include "zpgsim/experiment.hpp"
#include "zpgsim/figures.hpp"
#include "zpgsim/generator.hpp"
#include "zpgsim/hilbert.hpp"
#include "zpgsim/integrate.hpp"
#include "zpgsim/network.hpp"
#include "zpgsim/oracle.hpp"
#include "zpgsim/pulse.hpp"
#include "zpgsim/source.hpp"
#include "zpgsim/superoperator.hpp"
#include "zpgsim/types.hpp"
#include "zpgsim/virtual_grid.hpp"
#include "zpgsim/zpg.hpp"

#endif  // ZPGSIM_ZPGSIM_HPP
