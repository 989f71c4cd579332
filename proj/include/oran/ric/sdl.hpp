#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace oran::ric {

/// Who performs an SDL write. Platform components may write everywhere;
/// an xApp only into its own namespace.
struct Principal {
  std::string name;
  bool platform = false;

  static Principal component(std::string name) { return {std::move(name), true}; }
  static Principal xapp(std::string name) { return {std::move(name), false}; }
};

namespace ns {
inline constexpr const char* rnib = "rnib";
inline constexpr const char* uenib = "uenib";
inline std::string xapp(const std::string& name) { return "xapp:" + name; }
inline std::string topic(const std::string& name) { return "topic:" + name; }
}  // namespace ns

struct SdlChange {
  std::string ns;
  std::string key;
  std::optional<std::string> value;  // empty on delete
  std::uint64_t version = 0;         // global commit sequence
};

using WatchId = std::uint64_t;
using WatchFn = std::function<void(const SdlChange&)>;

/// Shared data layer: namespaced key-value store with ordered change
/// notification. Writes are linearizable per key; every watcher sees every
/// committed change exactly once, in commit order, never concurrently.
class Sdl {
 public:
  Sdl();

  void create_namespace(const std::string& name);
  void drop_namespace(const std::string& name);
  bool has_namespace(const std::string& name) const;

  std::optional<std::string> find(const std::string& ns, const std::string& key) const;
  /// Throws not_found.
  std::string get(const std::string& ns, const std::string& key) const;
  std::vector<std::string> keys(const std::string& ns) const;

  /// Throws forbidden or not_found (namespace). Returns the commit version.
  std::uint64_t put(const Principal& who, const std::string& ns, const std::string& key, std::string value);
  /// Throws forbidden or not_found (namespace or key).
  void erase(const Principal& who, const std::string& ns, const std::string& key);

  /// Watches every key of `ns` starting with `prefix`.
  WatchId watch(const std::string& ns, std::string prefix, WatchFn fn);
  void unwatch(WatchId id);

  std::uint64_t version() const;

 private:
  struct Watch {
    std::string ns;
    std::string prefix;
    WatchFn fn;
  };
  void check_write(const Principal& who, const std::string& ns) const;
  void commit_locked(SdlChange change, std::unique_lock<std::mutex>& lock);
  void drain(std::unique_lock<std::mutex>& lock);

  mutable std::mutex mu_;
  std::map<std::string, std::map<std::string, std::string>> data_;
  std::map<WatchId, Watch> watches_;
  WatchId next_watch_ = 1;
  std::uint64_t version_ = 0;
  std::deque<SdlChange> pending_;
  bool dispatching_ = false;
};

}  // namespace oran::ric
