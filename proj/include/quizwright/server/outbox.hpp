#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <string>

namespace qw::server {

/// Unbounded queue of encoded frames for one connection. push() never
/// blocks, so it is safe to call from monitor listeners.
class Outbox {
 public:
  void push(std::string frame) {
    {
      std::lock_guard lock(mutex_);
      if (closed_) return;
      frames_.push_back(std::move(frame));
    }
    cv_.notify_one();
  }

  /// Blocks until a frame is available or the outbox is closed and drained.
  std::optional<std::string> pop() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return !frames_.empty() || closed_; });
    return take(lock);
  }

  /// As pop(), but gives up after `timeout`.
  std::optional<std::string> pop_for(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    // system_clock maps to pthread_cond_timedwait, which ThreadSanitizer
    // understands; the steady_clock overload does not.
    cv_.wait_until(lock, std::chrono::system_clock::now() + timeout, [&] { return !frames_.empty() || closed_; });
    return take(lock);
  }

  /// Later pushes are dropped; frames already queued are still delivered.
  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::optional<std::string> take(std::unique_lock<std::mutex>&) {
    if (frames_.empty()) return std::nullopt;
    std::string frame = std::move(frames_.front());
    frames_.pop_front();
    return frame;
  }

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> frames_;
  bool closed_ = false;
};

}  // namespace qw::server
