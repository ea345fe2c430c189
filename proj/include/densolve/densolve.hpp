// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "densolve/backend.hpp"
#include "densolve/backends.hpp"
#include "densolve/blocked_backend.hpp"
#include "densolve/core.hpp"
#include "densolve/direct.hpp"
#include "densolve/errors.hpp"
#include "densolve/krylov.hpp"
#include "densolve/matrix.hpp"
#include "densolve/stationary.hpp"
#include "densolve/harness/bench.hpp"
#include "densolve/harness/generate.hpp"
#include "densolve/harness/matrix_market.hpp"
#include "densolve/harness/methods.hpp"
#include "densolve/harness/report.hpp"
