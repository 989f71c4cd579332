#include "oran/ric/sdl.hpp"

#include "oran/common/error.hpp"

namespace oran::ric {

Sdl::Sdl() {
  data_[ns::rnib];
  data_[ns::uenib];
}

void Sdl::create_namespace(const std::string& name) {
  std::lock_guard lock(mu_);
  data_[name];
}

void Sdl::drop_namespace(const std::string& name) {
  std::lock_guard lock(mu_);
  data_.erase(name);
}

bool Sdl::has_namespace(const std::string& name) const {
  std::lock_guard lock(mu_);
  return data_.count(name) > 0;
}

std::optional<std::string> Sdl::find(const std::string& ns, const std::string& key) const {
  std::lock_guard lock(mu_);
  auto n = data_.find(ns);
  if (n == data_.end()) return std::nullopt;
  auto it = n->second.find(key);
  if (it == n->second.end()) return std::nullopt;
  return it->second;
}

std::string Sdl::get(const std::string& ns, const std::string& key) const {
  auto v = find(ns, key);
  if (!v) fail(Errc::not_found, ns + "/" + key);
  return *v;
}

std::vector<std::string> Sdl::keys(const std::string& ns) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  auto n = data_.find(ns);
  if (n == data_.end()) return out;
  for (const auto& [k, v] : n->second) out.push_back(k);
  return out;
}

void Sdl::check_write(const Principal& who, const std::string& ns) const {
  if (who.platform) return;
  if (ns == ns::xapp(who.name)) return;
  fail(Errc::forbidden, who.name + " may not write namespace " + ns);
}

std::uint64_t Sdl::put(const Principal& who, const std::string& ns, const std::string& key, std::string value) {
  check_write(who, ns);
  std::unique_lock lock(mu_);
  auto n = data_.find(ns);
  if (n == data_.end()) fail(Errc::not_found, "namespace " + ns);
  n->second[key] = value;
  const auto v = ++version_;
  commit_locked({ns, key, std::move(value), v}, lock);
  return v;
}

void Sdl::erase(const Principal& who, const std::string& ns, const std::string& key) {
  check_write(who, ns);
  std::unique_lock lock(mu_);
  auto n = data_.find(ns);
  if (n == data_.end() || n->second.erase(key) == 0) fail(Errc::not_found, ns + "/" + key);
  commit_locked({ns, key, std::nullopt, ++version_}, lock);
}

void Sdl::commit_locked(SdlChange change, std::unique_lock<std::mutex>& lock) {
  pending_.push_back(std::move(change));
  // whoever finds no active dispatcher drains the queue; writes made from
  // inside a callback are queued behind the change being delivered
  if (dispatching_) return;
  dispatching_ = true;
  drain(lock);
}

void Sdl::drain(std::unique_lock<std::mutex>& lock) {
  while (!pending_.empty()) {
    auto change = std::move(pending_.front());
    pending_.pop_front();
    std::vector<WatchFn> targets;
    for (const auto& [id, w] : watches_) {
      if (w.ns == change.ns && change.key.compare(0, w.prefix.size(), w.prefix) == 0) targets.push_back(w.fn);
    }
    lock.unlock();
    for (const auto& fn : targets) fn(change);
    lock.lock();
  }
  dispatching_ = false;
}

WatchId Sdl::watch(const std::string& ns, std::string prefix, WatchFn fn) {
  std::lock_guard lock(mu_);
  const auto id = next_watch_++;
  watches_[id] = {ns, std::move(prefix), std::move(fn)};
  return id;
}

void Sdl::unwatch(WatchId id) {
  std::lock_guard lock(mu_);
  watches_.erase(id);
}

std::uint64_t Sdl::version() const {
  std::lock_guard lock(mu_);
  return version_;
}

}  // namespace oran::ric
