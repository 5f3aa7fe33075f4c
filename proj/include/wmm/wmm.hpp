/*
*   Copyright (c) 2026 wmm contributors
*
*   Licensed under the Apache License, Version 2.0 (the "License");
*   you may not use this file except in compliance with the License.
*   You may obtain a copy of the License at
*
*       http://www.apache.org/licenses/LICENSE-2.0
*
*   Unless required by applicable law or agreed to in writing, software
*   distributed under the License is distributed on an "AS IS" BASIS,
*   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
*   See the License for the specific language governing permissions and
*   limitations under the License.
*/
#ifndef WMM_WMM_HPP
#define WMM_WMM_HPP

#include "wmm/errors.hpp"
#include "wmm/estimator.hpp"
#include "wmm/json_io.hpp"
#include "wmm/linalg.hpp"
#include "wmm/posterior.hpp"
#include "wmm/rng.hpp"
#include "wmm/sampling.hpp"
#include "wmm/simulate.hpp"
#include "wmm/special.hpp"
#include "wmm/tree.hpp"

#endif  // WMM_WMM_HPP
