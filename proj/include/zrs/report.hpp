// zrs/report.hpp

// Copyright 2026  zrscore authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ZRS_REPORT_HPP
#define ZRS_REPORT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "zrs/common.hpp"

namespace zrs {

/// A flat, sorted key/value tree. Serialization is a pure function of the
/// stored values: keys are emitted in lexicographic order and numbers with 9
/// significant digits, so equal inputs yield byte-identical reports.
class ScoreReport {
 public:
  void set(std::string_view key, double value) { values_[std::string(key)] = format_number(value); }
  void set(std::string_view key, std::uint64_t value) { values_[std::string(key)] = std::to_string(value); }
  void set(std::string_view key, int value) { values_[std::string(key)] = std::to_string(value); }
  void set(std::string_view key, std::string_view value) { values_[std::string(key)] = std::string(value); }

  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error("report has no key: " + key);
    return it->second;
  }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string to_text() const {
    std::string out;
    for (const auto& [k, v] : values_) {
      out += k;
      out += " = ";
      out += v;
      out += '\n';
    }
    return out;
  }

  /// Flat CSV companion: key,value per row.
  std::string to_csv() const {
    std::string out = "metric,value\n";
    for (const auto& [k, v] : values_) {
      out += k;
      out += ',';
      bool quote = v.find(',') != std::string::npos || v.find('"') != std::string::npos;
      if (quote) {
        out += '"';
        for (char c : v) {
          if (c == '"') out += '"';
          out += c;
        }
        out += '"';
      } else {
        out += v;
      }
      out += '\n';
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace zrs

#endif  // ZRS_REPORT_HPP
