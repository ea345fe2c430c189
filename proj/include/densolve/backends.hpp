// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "densolve/backend.hpp"
#include "densolve/blocked_backend.hpp"

namespace densolve {

/// Creates a backend by name: "reference" or "blocked".
template <Real T>
std::unique_ptr<Backend<T>> make_backend(std::string_view name, BlockedOptions opts = {}) {
  if (name == "reference") return std::make_unique<ReferenceBackend<T>>();
  if (name == "blocked") return std::make_unique<BlockedBackend<T>>(opts);
  throw std::invalid_argument("unknown backend '" + std::string(name) + "'");
}

}  // namespace densolve
