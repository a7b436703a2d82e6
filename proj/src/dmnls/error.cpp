#include "dmnls/error.hpp"

#include <cstdio>
#include <mutex>

namespace dmnls {
namespace {

void stderr_sink(std::string_view message, void*) {
  std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(message.size()), message.data());
}

std::mutex sink_mutex;
WarningSink current_sink = stderr_sink;
void* current_user = nullptr;

}  // namespace

void set_warning_sink(WarningSink sink, void* user) {
  std::lock_guard lock(sink_mutex);
  current_sink = sink ? sink : stderr_sink;
  current_user = sink ? user : nullptr;
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  current_sink(message, current_user);
}

}  // namespace dmnls
