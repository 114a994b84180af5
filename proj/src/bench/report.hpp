/*
 * Copyright 2026 The wflock Authors
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

#include <string>
#include <vector>

#include "bench/bench.hpp"

namespace wfl::bench {

inline constexpr const char* kReportSchema = "wflock-report/1";

/// Keys are sorted and no wall-clock data is included, so equal runs give
/// byte-equal reports.
std::string report_json(const StatsReport& r);
std::string report_text(const StatsReport& r);

/// The "config" object of a report, enough to rerun it.
std::string config_json(const BenchConfig& c);
/// Accepts a whole report or just its config object. Throws ConfigError.
BenchConfig config_from_json(const std::string& text);

std::string verdicts_json(const std::vector<Verdict>& vs);
std::string verdicts_text(const std::vector<Verdict>& vs);

std::string calibration_json(const CalibrationReport& r);
std::string calibration_text(const CalibrationReport& r);

}  // namespace wfl::bench
