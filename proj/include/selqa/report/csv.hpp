/*
 * Copyright 2026 The selqa Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SELQA_REPORT_CSV_HPP_
#define SELQA_REPORT_CSV_HPP_

#include <optional>
#include <string>
#include <vector>

namespace selqa::report {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

// Shortest decimal text that parses back to the same double.
std::string FormatNumber(double v);
// Empty for nullopt.
std::string FormatOptional(const std::optional<double>& v);
// Throws ValidationError on text that is not a complete number.
double ParseNumber(const std::string& s);
std::optional<double> ParseOptional(const std::string& s);

// RFC 4180 quoting where needed; "\n" line endings.
std::string WriteCsv(const CsvTable& table);
// Throws ValidationError on ragged rows or unterminated quotes.
CsvTable ReadCsv(const std::string& text);

}  // namespace selqa::report

#endif  // SELQA_REPORT_CSV_HPP_
