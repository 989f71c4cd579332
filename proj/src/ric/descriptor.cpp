#include "oran/ric/descriptor.hpp"

#include <algorithm>
#include <charconv>

#include "oran/common/error.hpp"

namespace oran::ric {

namespace {

std::vector<std::string> list_of(std::string_view value) {
  std::vector<std::string> out;
  for (const auto& item : split(value, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

template <class T>
T number(std::string_view value, int line, const char* key) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    fail(Errc::parse_error, "line " + std::to_string(line) + ": " + key + " must be an integer");
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& i : items) out += (out.empty() ? "" : ", ") + i;
  return out;
}

}  // namespace

bool XappDescriptor::can_control(e2sm::RcDomain domain) const {
  return std::find(control_capabilities.begin(), control_capabilities.end(), domain) != control_capabilities.end();
}

XappDescriptor parse_descriptor(std::string_view text) {
  XappDescriptor d;
  int line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) fail(Errc::parse_error, "line " + std::to_string(line_no) + ": empty key");
    if (key == "name") {
      d.name = value;
    } else if (key == "version") {
      d.version = value;
    } else if (key == "priority") {
      d.priority = number<int>(value, line_no, "priority");
    } else if (key == "consumed_data") {
      d.consumed_data = list_of(value);
    } else if (key == "produced_data") {
      d.produced_data = list_of(value);
    } else if (key == "control_capabilities") {
      for (const auto& item : list_of(value)) {
        e2sm::RcDomain dom;
        if (!e2sm::parse_domain(item, dom)) {
          fail(Errc::parse_error, "line " + std::to_string(line_no) + ": unknown RC domain '" + item + "'");
        }
        d.control_capabilities.push_back(dom);
      }
    } else if (key == "loop_period_ms") {
      d.loop_period_ms = number<TimeMs>(value, line_no, "loop_period_ms");
    } else if (key == "model_path") {
      d.model_path = value;
    } else {
      d.params[key] = value;
    }
  }
  if (d.name.empty() || d.version.empty()) fail(Errc::parse_error, "descriptor needs name and version");
  return d;
}

std::string to_text(const XappDescriptor& d) {
  std::string out = "name = " + d.name + "\nversion = " + d.version + "\npriority = " + std::to_string(d.priority) +
                    "\n";
  if (!d.consumed_data.empty()) out += "consumed_data = " + join(d.consumed_data) + "\n";
  if (!d.produced_data.empty()) out += "produced_data = " + join(d.produced_data) + "\n";
  if (!d.control_capabilities.empty()) {
    std::vector<std::string> names;
    for (auto c : d.control_capabilities) names.emplace_back(e2sm::to_string(c));
    out += "control_capabilities = " + join(names) + "\n";
  }
  if (d.loop_period_ms) out += "loop_period_ms = " + std::to_string(d.loop_period_ms) + "\n";
  if (!d.model_path.empty()) out += "model_path = " + d.model_path + "\n";
  for (const auto& [k, v] : d.params) out += k + " = " + v + "\n";
  return out;
}

bool outranks(const XappDescriptor& a, const XappDescriptor& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  return a.name < b.name;
}

}  // namespace oran::ric
