#pragma once

#include <optional>

#include "axon/error.hpp"
#include "doctest.h"

namespace axon::testing {

template <class F>
std::optional<ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// The thrown error, for checks on its message or line.
template <class F>
std::optional<Error> caught(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  return std::nullopt;
}

}  // namespace axon::testing

#define CHECK_FAILS_WITH(expr, code)                                                   \
  do {                                                                                 \
    const auto axon_code_ = ::axon::testing::error_of([&] { (void)(expr); });          \
    CHECK_MESSAGE(axon_code_.has_value(), "expected " #code);                          \
    if (axon_code_) CHECK_EQ(::axon::error_code_name(*axon_code_), ::axon::error_code_name(code)); \
  } while (0)
