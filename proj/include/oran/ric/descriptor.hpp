#pragma once

#include <map>
#include <string>
#include <vector>

#include "oran/e2sm/rc.hpp"

namespace oran::ric {

struct XappDescriptor {
  std::string name;
  std::string version;
  int priority = 0;  // higher wins conflicts
  std::vector<std::string> consumed_data;
  std::vector<std::string> produced_data;
  std::vector<e2sm::RcDomain> control_capabilities;
  TimeMs loop_period_ms = 0;  // 0: no periodic tick
  std::string model_path;
  std::map<std::string, std::string> params;  // everything else

  bool can_control(e2sm::RcDomain domain) const;
};

/// Parses the key = value descriptor format. Lists are comma separated;
/// '#' starts a comment. Throws parse_error naming the offending line.
XappDescriptor parse_descriptor(std::string_view text);
std::string to_text(const XappDescriptor& d);

/// Conflict order: priority, then name (lexicographically smaller wins).
bool outranks(const XappDescriptor& a, const XappDescriptor& b);

}  // namespace oran::ric
