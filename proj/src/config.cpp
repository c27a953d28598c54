/*
 * Copyright 2026 The NNC Authors.
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

#include "nnc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>
#include <vector>

#include "nnc/error.hpp"

namespace nnc {

std::string to_string(AppearanceSource source) {
  switch (source) {
    case AppearanceSource::kNone: return "none";
    case AppearanceSource::kHandcrafted: return "handcrafted";
    case AppearanceSource::kFile: return "file";
  }
  return "none";
}

AppearanceSource parse_appearance_source(const std::string& name) {
  if (name == "none") return AppearanceSource::kNone;
  if (name == "handcrafted") return AppearanceSource::kHandcrafted;
  if (name == "file") return AppearanceSource::kFile;
  throw InputError("unknown appearance source '" + name + "' (expected none, handcrafted or file)");
}

std::string to_string(MissingAppearance policy) {
  return policy == MissingAppearance::kFail ? "fail" : "zeros";
}

MissingAppearance parse_missing_appearance(const std::string& name) {
  if (name == "fail") return MissingAppearance::kFail;
  if (name == "zeros") return MissingAppearance::kZeros;
  throw InputError("unknown missing-appearance policy '" + name + "' (expected fail or zeros)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw InputError("invalid number '" + text + "'");
  return value;
}

template <>
double parse_number<double>(const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw InputError("invalid number '" + text + "'");
    return v;
  } catch (const std::logic_error&) {
    throw InputError("invalid number '" + text + "'");
  }
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InputError("invalid boolean '" + text + "'");
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

// section -> key -> accessor, in output order.
const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>>& schema() {
  using Entries = std::vector<std::pair<std::string, Field>>;
  auto num = [](auto member) {
    return Field{[member](const RunConfig& c) {
                   using T = std::decay_t<decltype(c.*member)>;
                   if constexpr (std::is_floating_point_v<T>) {
                     return format_double(c.*member);
                   } else {
                     return std::to_string(c.*member);
                   }
                 },
                 [member](RunConfig& c, const std::string& v) {
                   using T = std::decay_t<decltype(c.*member)>;
                   c.*member = parse_number<T>(v);
                 }};
  };
  auto flag = [](bool RunConfig::*member) {
    return Field{[member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); },
                 [member](RunConfig& c, const std::string& v) { c.*member = parse_bool(v); }};
  };
  static const std::vector<std::pair<std::string, Entries>> s = {
      {"features",
       Entries{{"tau_static", num(&RunConfig::tau_static)},
               {"train_stride", num(&RunConfig::train_stride)},
               {"test_stride", num(&RunConfig::test_stride)},
               {"normalize_direction", flag(&RunConfig::normalize_direction)},
               {"normalize_appearance", flag(&RunConfig::normalize_appearance)},
               {"appearance", Field{[](const RunConfig& c) { return to_string(c.appearance); },
                                    [](RunConfig& c, const std::string& v) {
                                      c.appearance = parse_appearance_source(v);
                                    }}},
               {"missing_appearance",
                Field{[](const RunConfig& c) { return to_string(c.missing_appearance); },
                      [](RunConfig& c, const std::string& v) {
                        c.missing_appearance = parse_missing_appearance(v);
                      }}}}},
      {"cluster",
       Entries{{"samples_per_cluster", num(&RunConfig::samples_per_cluster)},
               {"k", num(&RunConfig::k)},
               {"min_cluster_size", num(&RunConfig::min_cluster_size)},
               {"restarts", num(&RunConfig::restarts)},
               {"max_iter", num(&RunConfig::kmeans_max_iter)},
               {"tol", num(&RunConfig::kmeans_tol)}}},
      {"svm",
       Entries{{"nu", num(&RunConfig::nu)},
               {"tol", num(&RunConfig::svm_tol)},
               {"max_iter", num(&RunConfig::svm_max_iter)}}},
      {"scoring", Entries{{"sigma_t", num(&RunConfig::sigma_t)}}},
      {"eval",
       Entries{{"sigma_s", num(&RunConfig::sigma_s)},
               {"max_thresholds", num(&RunConfig::max_thresholds)}}},
      {"run", Entries{{"seed", num(&RunConfig::seed)}, {"threads", num(&RunConfig::threads)}}},
  };
  return s;
}

}  // namespace

std::string RunConfig::to_ini() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [section, entries] : schema()) {
    if (!first) os << "\n";
    first = false;
    os << "[" << section << "]\n";
    for (const auto& [key, field] : entries) os << key << " = " << field.get(*this) << "\n";
  }
  return os.str();
}

RunConfig RunConfig::from_ini(const std::string& text) { return from_ini(text, RunConfig{}); }

RunConfig RunConfig::load(const std::string& path) { return load(path, RunConfig{}); }

RunConfig RunConfig::from_ini(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& [name, entries] : schema()) {
      if (name != section) continue;
      for (const auto& [k, f] : entries) {
        if (k == key) field = &f;
      }
    }
    if (!field) throw InputError(where + "unknown key '" + key + "' in section [" + section + "]");
    try {
      field->set(base, value);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
  }
  return base;
}

RunConfig RunConfig::load(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_ini(buf.str(), std::move(base));
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InputError("invalid configuration: " + what);
  };
  require(tau_static >= 0, "tau_static must be >= 0");
  require(train_stride >= 1 && test_stride >= 1, "strides must be >= 1");
  require(samples_per_cluster >= 1, "samples_per_cluster must be >= 1");
  require(k >= 0, "k must be >= 0");
  require(min_cluster_size >= 0, "min_cluster_size must be >= 0");
  require(restarts >= 1, "restarts must be >= 1");
  require(kmeans_max_iter >= 1 && kmeans_tol >= 0, "k-means iteration settings out of range");
  require(nu > 0 && nu <= 1, "nu must lie in (0, 1]");
  require(svm_tol > 0 && svm_max_iter >= 1, "SVM solver settings out of range");
  require(sigma_t >= 0 && sigma_s >= 0, "smoothing sigmas must be >= 0");
  require(max_thresholds >= 0, "max_thresholds must be >= 0");
  require(threads >= 0, "threads must be >= 0");
}

}  // namespace nnc
