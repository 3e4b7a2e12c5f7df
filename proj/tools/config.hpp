#pragma once

#include <map>
#include <set>
#include <string>

namespace multcorr::cli {

// Flat key=value run configuration: one pair per line, `#` starts a comment,
// blank lines ignored.  Duplicate or unrecognized keys are errors naming the
// offending line.  Values stay as strings; the consumer parses them.
std::map<std::string, std::string> load_config(
    const std::string& path, const std::set<std::string>& known_keys);

}  // namespace multcorr::cli
