#include "partysim/error.hpp"
#include "partysim/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace partysim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::usage: return "usage";
    case ErrorCode::io: return "io";
    case ErrorCode::schema: return "schema";
    case ErrorCode::uniqueness: return "uniqueness";
    case ErrorCode::empty_corpus: return "empty_corpus";
    case ErrorCode::labeling: return "labeling";
    case ErrorCode::format: return "format";
    case ErrorCode::out_of_vocabulary: return "out_of_vocabulary";
    case ErrorCode::shape: return "shape";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::data: return "data";
    case ErrorCode::undefined_cosine: return "undefined_cosine";
    case ErrorCode::degenerate_party: return "degenerate_party";
    case ErrorCode::no_overlap: return "no_overlap";
    case ErrorCode::normalization: return "normalization";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::value: return "value";
    case ErrorCode::too_few_groups: return "too_few_groups";
    case ErrorCode::alignment: return "alignment";
    case ErrorCode::matrix_role: return "matrix_role";
    case ErrorCode::construction: return "construction";
  }
  return "unknown";
}

namespace log {
namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

Handler& current_handler() {
  static Handler h = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return h;
}

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (current_handler()) current_handler()(message);
}

Handler set_warning_handler(Handler handler) {
  std::lock_guard lock(handler_mutex());
  Handler previous = std::move(current_handler());
  current_handler() = std::move(handler);
  return previous;
}

}  // namespace log
}  // namespace partysim
