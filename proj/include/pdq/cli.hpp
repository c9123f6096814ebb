// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pdq/fcidump.hpp"

namespace pdq::cli {

/// Exit codes: 0 success (non-convergence included), 1 usage or config
/// error, 2 runtime error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "0,1;2,3" or "0-1;2-3" -> {{0,1},{2,3}}.
std::vector<OrbitalSet> parse_fragments(const std::string& text);

}  // namespace pdq::cli
