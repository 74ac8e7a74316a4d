#pragma once

#include <functional>
#include <string_view>

namespace partysim::log {

using Handler = std::function<void(std::string_view)>;

// Non-fatal diagnostics (skipped sentences, degenerate inputs). The default
// handler writes "warning: <msg>" to stderr.
void warn(std::string_view message);

// Installs a handler and returns the previous one.
Handler set_warning_handler(Handler handler);

// Restores the previous handler on destruction; handy in tests.
class ScopedHandler {
 public:
  explicit ScopedHandler(Handler handler)
      : previous_(set_warning_handler(std::move(handler))) {}
  ~ScopedHandler() { set_warning_handler(std::move(previous_)); }
  ScopedHandler(const ScopedHandler&) = delete;
  ScopedHandler& operator=(const ScopedHandler&) = delete;

 private:
  Handler previous_;
};

}  // namespace partysim::log
