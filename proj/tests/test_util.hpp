#pragma once

#include <doctest.h>

#include <functional>

#include "wise/error.hpp"

namespace wise::testing {

// Error code thrown by fn; fails the test when nothing is thrown.
inline ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_config;
}

}  // namespace wise::testing
