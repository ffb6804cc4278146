#pragma once

// Flat `key = value` configuration files.  Lines starting with '#' are
// comments; surrounding whitespace is ignored.

#include <map>
#include <set>
#include <string>
#include <vector>

namespace npdisks::config {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse(const std::string& text);
KeyValues load(const std::string& path);

/// Throws ConfigError naming the first key not in `allowed`.
void reject_unknown(const KeyValues& kv, const std::set<std::string>& allowed);

double get_double(const KeyValues& kv, const std::string& key, double fallback);
long get_int(const KeyValues& kv, const std::string& key, long fallback);
std::string get_string(const KeyValues& kv, const std::string& key, const std::string& fallback);
/// Comma separated list of doubles.
std::vector<double> get_double_list(const KeyValues& kv, const std::string& key,
                                    const std::vector<double>& fallback);

/// 17 significant digits, locale independent.
std::string format_double(double v);

}  // namespace npdisks::config
